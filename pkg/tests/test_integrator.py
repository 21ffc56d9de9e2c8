import math

import numpy as np
import pytest

from coneflow.errors import IntegrationError, InvalidInitialState
from coneflow.flows import Flow, FlowKind, FlowState
from coneflow.integrator import IntegratorConfig, StopReason, integrate


def run(flow, init, k=0, backend=None, **cfg):
    return integrate(FlowKind(flow, k), init, IntegratorConfig(**cfg), backend=backend)


def test_dirac_sine(backend):
    traj = run(Flow.DIRAC, (0.0, 1.0), k=1, backend=backend, t_end=1.5, step=1e-3)
    assert traj.stop.reason is StopReason.REACHED_T_END
    assert len(traj) == 1501
    assert traj.final.vars[0] == pytest.approx(math.sin(1.5), abs=1e-8)
    assert np.all(np.diff(traj.t) > 0)


def test_round_collapse(backend):
    traj = run(Flow.RICCI_ROUND, (math.sqrt(8.0),), backend=backend, t_end=5.0)
    assert traj.stop.reason is StopReason.COLLAPSE
    assert traj.stop.component == "f"
    assert traj.stop.t_stop == pytest.approx(1.0, abs=1e-6)


def test_nut(backend):
    traj = run(Flow.RICCI_BERGER, (8.0, 8.0), backend=backend, t_end=5.0)
    assert traj.stop.reason is StopReason.COLLAPSE
    assert traj.stop.t_stop == pytest.approx(1.0, abs=1e-6)
    assert np.max(np.abs(traj.column("alpha") - traj.column("beta"))) <= 1e-9


def test_bolt(backend):
    traj = run(Flow.RICCI_BERGER, (0.0, 16.0), backend=backend, t_end=5.0)
    assert traj.stop.reason is StopReason.COLLAPSE
    assert traj.stop.component == "beta"
    assert np.all(traj.column("alpha") == 0.0)


def test_backends_agree():
    from coneflow import kernels

    if len(kernels.AVAILABLE) < 2:
        pytest.skip("compiled kernel not built")
    for flow, init in ((Flow.RICCI_BERGER, (4.0, 9.0)), (Flow.ASD, (0.0, 1.0)), (Flow.NORMALIZED_BERGER, (2.0, 1.0))):
        a = run(flow, init, backend="python", t_end=2.0, step=1e-2)
        b = run(flow, init, backend="compiled", t_end=2.0, step=1e-2)
        assert np.array_equal(a.t, b.t)
        assert np.max(np.abs(a.y - b.y)) <= 1e-12
        assert a.stop == b.stop


def test_fixed_step_grid(backend):
    traj = run(Flow.ASD, (0.0, 1.0), backend=backend, t_end=1.0, step=0.01, adaptive=False)
    assert len(traj) == 101
    assert np.allclose(np.diff(traj.t), 0.01, rtol=1e-9)


def test_flow9_from_bolt_exits(backend):
    traj = run(Flow.FLOW9, (0.0, 1.0), backend=backend, t_end=1.0)
    assert traj.stop.reason is StopReason.DOMAIN_EXIT
    assert len(traj) == 1


def test_flow9_tracks_asd(backend):
    a = run(Flow.FLOW9, (1.0, 1.0), backend=backend, t_end=2.0, step=1e-3)
    assert a.final.vars == pytest.approx((3.0, 3.0), rel=1e-10)


def test_start_time(backend):
    traj = integrate(FlowKind(Flow.RICCI_ROUND), FlowState(0.5, (2.0,)), IntegratorConfig(t_end=2.0), backend=backend)
    assert traj.t[0] == 0.5
    assert traj.stop.t_stop == pytest.approx(1.0, abs=1e-6)


def test_invalid_initial_state():
    with pytest.raises(InvalidInitialState):
        run(Flow.RICCI_BERGER, (1.0, -1.0))
    with pytest.raises(InvalidInitialState):
        run(Flow.ASD, (1.0,))
    with pytest.raises(InvalidInitialState):
        run(Flow.ASD, (math.nan, 1.0))


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(step=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=-1.0)
    with pytest.raises(ValueError):
        run(Flow.ASD, (0.0, 1.0), t_end=-1.0)


def test_budget_exhausted(backend):
    with pytest.raises(IntegrationError):
        run(Flow.ASD, (0.0, 1.0), backend=backend, t_end=1.0, step=1e-3, max_samples=10)


def test_continue_past_collapse(backend):
    traj = run(Flow.RICCI_BERGER, (4.0, 9.0), backend=backend, t_end=1.2, continue_past_collapse=True)
    assert traj.stop.reason is StopReason.COLLAPSE
    assert traj.t[-1] == pytest.approx(1.2)
    flagged = traj.nonriemannian
    assert flagged.any() and not flagged[0]
    assert np.all(traj.column("alpha")[flagged] == 0.0)
    assert np.all(np.diff(traj.column("beta")[flagged]) < 0)


def test_continue_only_ricci2():
    with pytest.raises(ValueError):
        run(Flow.ASD, (0.0, 1.0), continue_past_collapse=True)


def test_trajectory_accessors():
    traj = run(Flow.ASD, (0.0, 1.0), t_end=0.1, step=0.05, adaptive=False)
    assert traj.components == ("a1", "a2")
    assert len(traj.samples) == len(traj) == 3
    assert traj.samples[-1] == traj.final


def test_kernel_selection():
    from coneflow import kernels

    assert kernels.get("python") is kernels.AVAILABLE["python"]
    assert kernels.get() is kernels.AVAILABLE[kernels.DEFAULT]
    with pytest.raises(ValueError):
        kernels.get("fortran")


def test_fallback_without_extension():
    import subprocess
    import sys

    code = (
        "import sys; sys.modules['coneflow._kernels'] = None\n"
        "from coneflow import kernels, integrate, FlowKind, Flow\n"
        "assert kernels.DEFAULT == 'python' and 'compiled' not in kernels.AVAILABLE\n"
        "print(integrate(FlowKind(Flow.ASD), (0.0, 1.0)).stop.reason.value)\n"
    )
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "ReachedTEnd"
