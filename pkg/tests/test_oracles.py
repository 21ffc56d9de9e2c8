import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest
import sympy as sp

from coneflow import oracles
from coneflow.errors import BranchUnavailable, DomainError, OracleError
from coneflow.flows import Flow, FlowKind, rhs_asd, rhs_dirac, rhs_ricci_berger, rhs_ricci_round
from coneflow.geometry import TwoParamJet, asd_residual
from coneflow.integrator import IntegratorConfig, StopEvent, StopReason, Trajectory, integrate


def run(flow, init, k=0, **cfg):
    return integrate(FlowKind(flow, k), init, IntegratorConfig(**cfg))


def synthetic(flow, t, y, reason=StopReason.REACHED_T_END):
    t = np.asarray(t, dtype=float)
    return Trajectory(FlowKind(flow), t, np.asarray(y, dtype=float), StopEvent(reason, float(t[-1])))


# ---------------------------------------------------------------- closed forms


def test_closed_form_examples():
    assert oracles.closed_form(oracles.DiracProfile(1), math.pi / 2).vars == pytest.approx((1.0, 0.0), abs=1e-16)
    assert oracles.closed_form(oracles.RicciRoundProfile(1.0), 0.5).vars == (2.0,)
    assert oracles.closed_form(oracles.Bolt(1.0), 0.25).vars == (0.0, 12.0)
    assert oracles.closed_form(oracles.Nut(1.0), 0.5).vars == (4.0, 4.0)
    assert oracles.closed_form(oracles.DiracProfile(0), 0.3).vars == (0.3, 1.0)


def test_closed_form_domain():
    with pytest.raises(DomainError):
        oracles.closed_form(oracles.Nut(1.0), 1.0)
    with pytest.raises(OracleError):
        oracles.closed_form(oracles.EguchiHanson(1.0), 0.5)


_T = sp.symbols("t")
_T0 = sp.Rational(13, 10)
_SYMBOLIC = {
    "round": [sp.sqrt(8 * (_T0 - _T))],
    "nut": [8 * (_T0 - _T), 8 * (_T0 - _T)],
    "bolt": [sp.Integer(0), 16 * (_T0 - _T)],
}


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.29))
def test_closed_forms_solve_their_flows(t):
    t0 = float(_T0)
    for name, kind, rhs in (
        ("round", oracles.RicciRoundProfile(t0), rhs_ricci_round),
        ("nut", oracles.Nut(t0), rhs_ricci_berger),
        ("bolt", oracles.Bolt(t0), rhs_ricci_berger),
    ):
        state = oracles.closed_form(kind, t).vars
        exact = [float(sp.diff(e, _T).subs(_T, t)) for e in _SYMBOLIC[name]]
        assert rhs(*state) == pytest.approx(exact, rel=1e-12, abs=1e-12)
    for k, f in ((1, sp.sin(_T)), (0, _T), (-1, sp.sinh(_T))):
        state = oracles.closed_form(oracles.DiracProfile(k), t).vars
        exact = [float(sp.diff(f, _T).subs(_T, t)), float(sp.diff(f, _T, 2).subs(_T, t))]
        assert rhs_dirac(state, k) == pytest.approx(exact, rel=1e-12, abs=1e-12)


# ---------------------------------------------------------------- Eguchi-Hanson


def test_eh_profile_examples():
    a1, a2, rate = oracles.eh_profile(1.0, 1.0)
    assert (a1, a2, rate) == (0.0, 1.0, math.inf)
    a1, a2, _ = oracles.eh_profile(1.0, math.sqrt(2.0))
    assert a1 == pytest.approx(math.sqrt(1.5), rel=1e-15)
    assert a2 == math.sqrt(2.0)
    a1, a2, _ = oracles.eh_profile(1.0, 1e4)
    assert a1 / a2 == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        oracles.eh_profile(1.0, 0.5)


_R, _A = sp.symbols("r a", positive=True)
_U = 1 - (_A / _R) ** 4
_A1_R = sp.diff(_R * sp.sqrt(_U), _R)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(1.0001, 20.0))
def test_eh_profile_solves_asd(a, ratio):
    r = a * ratio
    a1, a2, dt_dr = oracles.eh_profile(a, r)
    da1_dr = float(_A1_R.subs({_R: r, _A: a}))
    expected = rhs_asd(a1, a2)
    assert da1_dr / dt_dr == pytest.approx(expected[0], rel=1e-12, abs=1e-12)
    assert 1.0 / dt_dr == pytest.approx(expected[1], rel=1e-12, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(1.01, 20.0))
def test_eh_jet(a, ratio):
    jet = oracles.eh_jet(a, a * ratio)
    res = asd_residual(jet)
    assert abs(res.rho1) < 1e-12 * (1 + abs(jet.da1 / jet.a1))
    assert abs(res.rho2) < 1e-12
    assert oracles.ricci_flat_residual(jet) < 1e-10 / a**2


def test_eh_match_exact_samples():
    r = np.linspace(1.0, 3.0, 50)
    y = [oracles.eh_profile(1.0, x)[:2] for x in r]
    rep = oracles.eh_match(synthetic(Flow.ASD, r, y), 1.0)
    assert rep.max_abs_deviation <= 1e-15
    assert rep.passed and rep.n_points == 50


def test_eh_match_negative_control():
    t = np.linspace(0.0, 2.0, 41)
    with np.errstate(divide="ignore"):
        rep = oracles.eh_match(synthetic(Flow.ASD, t, np.c_[t, t]), 1.0)
    assert rep.max_abs_deviation > 0.1
    assert not rep.passed


def test_eh_match_non_monotone():
    t = np.linspace(0.0, 1.0, 5)
    y = np.c_[t, [1.0, 1.2, 1.1, 1.3, 1.4]]
    with pytest.raises(OracleError):
        oracles.eh_match(synthetic(Flow.ASD, t, y), 1.0)


def test_eh_trajectory():
    traj = run(Flow.ASD, (0.0, 1.0), t_end=2.0, step=1e-4)
    assert oracles.eh_match(traj, 1.0).max_abs_deviation <= 1e-6
    t, jets = oracles.trajectory_jets(traj)
    assert max(oracles.ricci_flat_residual(j) for j in jets) <= 1e-5


# ---------------------------------------------------------------- Berger Ricci flow


def test_beta_residual_exact_lines():
    t = np.linspace(0.0, 0.5, 11)
    nut = synthetic(Flow.RICCI_BERGER, t, np.c_[8 * (1 - t), 8 * (1 - t)])
    bolt = synthetic(Flow.RICCI_BERGER, t, np.c_[0 * t, 16 * (1 - t)])
    for traj in (nut, bolt):
        _, res = oracles.beta_second_order_residual(traj)
        assert np.max(np.abs(res)) < 1e-9


def test_beta_residual_generic():
    traj = run(Flow.RICCI_BERGER, (4.0, 9.0), t_end=10.0, step=1e-3)
    t, res = oracles.beta_second_order_residual(traj)
    assert len(t) > 100
    assert np.max(np.abs(res)) <= 1e-4


def test_beta_residual_too_short():
    t = np.linspace(0.0, 0.1, 4)
    with pytest.raises(OracleError):
        oracles.beta_second_order_residual(synthetic(Flow.RICCI_BERGER, t, np.c_[t + 1, t + 2]))
    with pytest.raises(OracleError):
        oracles.beta_second_order_residual(run(Flow.ASD, (0.0, 1.0), t_end=0.1))


def test_implicit7():
    traj = run(Flow.RICCI_BERGER, (9.0, 4.0), t_end=10.0, step=1e-3)
    fit = oracles.implicit7_check(traj)
    assert len(fit.t) > 100
    assert np.max(np.abs(fit.residual)) <= 1e-6
    assert np.max(np.abs(fit.rate[1:-1] - 1.0)) <= 1e-6
    c1, c2, residual = fit.as_tuple()
    assert math.isfinite(c1) and math.isfinite(c2)


def test_implicit7_nut_branch_unavailable():
    traj = run(Flow.RICCI_BERGER, (8.0, 8.0), t_end=10.0)
    with pytest.raises(BranchUnavailable):
        oracles.implicit7_check(traj)


@pytest.mark.parametrize("init", [(4.0, 9.0), (8.0, 8.0), (0.01, 9.0)])
def test_singularity_slopes(init):
    traj = run(Flow.RICCI_BERGER, init, t_end=10.0, step=1e-3)
    da, db = oracles.singularity_slopes(traj)
    assert da == pytest.approx(-8.0, abs=0.16)
    assert db == pytest.approx(-8.0, abs=0.16)
    if init == (8.0, 8.0):
        assert (da, db) == (-8.0, -8.0)


def test_singularity_slopes_needs_collapse():
    traj = run(Flow.RICCI_BERGER, (4.0, 9.0), t_end=0.1)
    with pytest.raises(OracleError):
        oracles.singularity_slopes(traj)


# ---------------------------------------------------------------- Einstein


@pytest.mark.parametrize("t", [0.2, 1.0, 2.9])
def test_einstein_closed_form_jets(t):
    assert oracles.einstein_residual(TwoParamJet.conformal(math.sin(t), math.cos(t), -math.sin(t)), 1) < 1e-12
    assert oracles.einstein_residual(TwoParamJet.conformal(t, 1.0, 0.0), 0) < 1e-12 / t**2
    assert oracles.einstein_residual(TwoParamJet.conformal(math.sinh(t), math.cosh(t), math.sinh(t)), -1) < 1e-11


def test_einstein_hyperbolic_trajectory():
    traj = run(Flow.DIRAC, (0.0, 1.0), k=-1, t_end=3.0, step=1e-3)
    # the three-point stencil alone leaves exactly h^2 = 1e-6 in ric00 for sinh
    _, jets = oracles.trajectory_jets(traj, order=2)
    assert max(oracles.einstein_residual(j, -1) for j in jets) <= 1e-5
    _, jets = oracles.trajectory_jets(traj, order=4)
    assert max(oracles.einstein_residual(j, -1) for j in jets) <= 1e-6


# ---------------------------------------------------------------- finite differences


def test_central_differences_orders():
    t = np.linspace(0.0, 1.0, 101)
    y = np.sin(3 * t)
    for order, tol in ((2, 1e-3), (4, 1e-6)):
        idx, dy, ddy = oracles.central_differences(t, y, order)
        assert np.max(np.abs(dy - 3 * np.cos(3 * t[idx]))) < tol
        assert np.max(np.abs(ddy + 9 * np.sin(3 * t[idx]))) < 10 * tol
    with pytest.raises(ValueError):
        oracles.central_differences(t, y, 3)


def test_uniform_run():
    assert oracles.uniform_run([0.0, 0.1, 0.2, 0.25, 0.3]) == 3
    assert oracles.uniform_run(np.linspace(0, 1, 11)) == 11


def test_report():
    rep = oracles.report(np.array([0.0, 1.0, 2.0]), [0.1, -0.3, 0.2], 0.25)
    assert rep.max_abs_deviation == 0.3
    assert rep.location_of_max == 1.0
    assert not rep.passed
    rep = oracles.report(np.array([0.0, 1.0]), [0.0, math.nan], 1.0)
    assert not rep.passed


def test_volume():
    assert oracles.volume(2.0, 1.0) == 2.0
