"""Closed-form solutions, first integrals and matchers for checking trajectories.

Nothing here calls the integrator or the kernels; trajectories are only read.
"""

from dataclasses import dataclass
import math

import numpy as np

from coneflow.errors import BranchUnavailable, DomainError, OracleError
from coneflow.flows import Flow, FlowState
from coneflow.geometry import TwoParamJet, ricci_ambient
from coneflow.integrator import StopReason


# --------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class DiracProfile:
    k: int


@dataclass(frozen=True)
class RicciRoundProfile:
    t0: float


@dataclass(frozen=True)
class Nut:
    t0: float


@dataclass(frozen=True)
class Bolt:
    t0: float


@dataclass(frozen=True)
class EguchiHanson:
    a: float


def closed_form(kind, t):
    """Exact state of the named solution at parameter t."""
    if isinstance(kind, DiracProfile):
        if kind.k == 1:
            return FlowState(t, (math.sin(t), math.cos(t)))
        if kind.k == -1:
            return FlowState(t, (math.sinh(t), math.cosh(t)))
        if kind.k == 0:
            return FlowState(t, (t, 1.0))
        raise ValueError(f"K must be -1, 0 or +1, got {kind.k!r}")
    if isinstance(kind, (RicciRoundProfile, Nut, Bolt)):
        if not t < kind.t0:
            raise DomainError(f"t={t!r} is at or past the collapse time {kind.t0!r}")
        left = kind.t0 - t
        if isinstance(kind, RicciRoundProfile):
            return FlowState(t, (math.sqrt(8.0 * left),))
        if isinstance(kind, Nut):
            return FlowState(t, (8.0 * left, 8.0 * left))
        return FlowState(t, (0.0, 16.0 * left))
    if isinstance(kind, EguchiHanson):
        raise OracleError("the Eguchi-Hanson profile is parametrized by r; use eh_profile")
    raise TypeError(f"unknown oracle kind {kind!r}")


def eh_profile(a, r):
    """(a1, a2, dt/dr) of the Eguchi-Hanson metric at radius r.

    dt/dr is infinite at the bolt r = a.
    """
    if not a > 0:
        raise ValueError(f"a must be positive, got {a!r}")
    if r < a:
        raise DomainError(f"r={r!r} is inside the bolt radius a={a!r}")
    u = 1.0 - (a / r) ** 4
    if u == 0.0:
        return 0.0, r, math.inf
    return r * math.sqrt(u), r, 1.0 / math.sqrt(u)


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class MatchReport:
    max_abs_deviation: float
    location_of_max: float
    n_points: int
    passed: bool
    tolerance: float

    def as_dict(self):
        return {
            "max_abs_deviation": self.max_abs_deviation,
            "location_of_max": self.location_of_max,
            "n_points": self.n_points,
            "passed": self.passed,
            "tolerance": self.tolerance,
        }


def report(t, deviation, tolerance):
    """Summarize a deviation series sampled at t."""
    deviation = np.abs(np.asarray(deviation, dtype=float))
    if deviation.size == 0:
        raise OracleError("no points to compare")
    if not np.all(np.isfinite(deviation)):
        i = int(np.argmin(np.isfinite(deviation)))
        return MatchReport(math.inf, float(t[i]), int(deviation.size), False, tolerance)
    i = int(np.argmax(deviation))
    worst = float(deviation[i])
    return MatchReport(worst, float(np.asarray(t)[i]), int(deviation.size), worst <= tolerance, tolerance)


def match_closed_form(traj, kind, tolerance, columns=None):
    """Max deviation of the chosen state columns from a closed-form solution."""
    columns = range(traj.y.shape[1]) if columns is None else columns
    mask = ~traj.nonriemannian
    if isinstance(kind, (RicciRoundProfile, Nut, Bolt)):
        mask &= traj.t < kind.t0
    t = traj.t[mask]
    exact = np.array([closed_form(kind, float(s)).vars for s in t])
    dev = np.max(np.abs(traj.y[mask][:, list(columns)] - exact[:, list(columns)]), axis=1)
    return report(t, dev, tolerance)


# --------------------------------------------------------------------------
# finite-difference jets


def uniform_run(t, rtol=1e-6):
    """Length of the leading run of samples with constant spacing."""
    t = np.asarray(t, dtype=float)
    if len(t) < 2:
        return len(t)
    dt = np.diff(t)
    bad = np.nonzero(np.abs(dt - dt[0]) > rtol * dt[0])[0]
    return len(t) if bad.size == 0 else int(bad[0]) + 1


def central_differences(t, y, order=2):
    """First and second derivatives at interior points of a uniform grid.

    Returns ``(index, dy, ddy)`` where ``index`` selects the interior samples.
    ``order=4`` uses five-point stencils.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    h = (t[-1] - t[0]) / (len(t) - 1)
    if order == 2:
        if len(t) < 3:
            raise OracleError("need at least 3 uniformly spaced samples")
        index = np.arange(1, len(t) - 1)
        dy = (y[2:] - y[:-2]) / (2.0 * h)
        ddy = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / (h * h)
        return index, dy, ddy
    if order == 4:
        if len(t) < 5:
            raise OracleError("need at least 5 uniformly spaced samples")
        index = np.arange(2, len(t) - 2)
        ym2, ym1, y0, yp1, yp2 = y[:-4], y[1:-3], y[2:-2], y[3:-1], y[4:]
        dy = (ym2 - 8.0 * ym1 + 8.0 * yp1 - yp2) / (12.0 * h)
        ddy = (-ym2 + 16.0 * ym1 - 30.0 * y0 + 16.0 * yp1 - yp2) / (12.0 * h * h)
        return index, dy, ddy
    raise ValueError(f"order must be 2 or 4, got {order!r}")


def trajectory_jets(traj, stride=1, order=2):
    """Jets (value, first and second derivative) along the uniform part of a trajectory.

    Dirac trajectories carry f' in the state, so only f'' is differenced;
    all other flows difference the scale functions directly.
    Returns ``(t, jets)``.
    """
    n = uniform_run(traj.t)
    t = traj.t[:n:stride]
    y = traj.y[:n:stride]
    flow = traj.kind.flow
    if flow is Flow.DIRAC:
        index, _, _ = central_differences(t, y[:, 0], order)
        _, ddf, _ = central_differences(t, y[:, 1], order)
        jets = [TwoParamJet.conformal(f, df, dd) for f, df, dd in zip(y[index, 0], y[index, 1], ddf)]
        return t[index], jets
    if flow is Flow.RICCI_ROUND:
        index, df, ddf = central_differences(t, y[:, 0], order)
        return t[index], [TwoParamJet.conformal(f, d, dd) for f, d, dd in zip(y[index, 0], df, ddf)]
    if flow is Flow.RICCI_BERGER:
        y = np.sqrt(np.clip(y, 0.0, None))
    index, d1, dd1 = central_differences(t, y[:, 0], order)
    _, d2, dd2 = central_differences(t, y[:, 1], order)
    jets = [
        TwoParamJet(a1, a2, p1, p2, q1, q2)
        for a1, a2, p1, p2, q1, q2 in zip(y[index, 0], y[index, 1], d1, d2, dd1, dd2)
    ]
    return t[index], jets


# --------------------------------------------------------------------------
# Eguchi-Hanson


def eh_match(traj, a, tolerance=1e-6):
    """Compare a1 against the Eguchi-Hanson profile as a function of a2.

    Free of the t <-> r reparametrization: the profile predicts
    a1 = a2 sqrt(1 - (a/a2)^4).
    """
    a1 = traj.y[:, 0]
    a2 = traj.y[:, 1]
    if np.any(np.diff(a2) < 0):
        raise OracleError("a2 is not monotone along the trajectory; cannot reparametrize by r")
    # rounding can leave a2 a hair below a on the first samples
    ratio = np.clip(a / a2, None, 1.0)
    predicted = a2 * np.sqrt(1.0 - ratio**4)
    return report(traj.t, a1 - predicted, tolerance)


def asd_defects(a1, a2, da1, da2):
    """Anti-self-duality equations with denominators cleared (valid at a1 = 0)."""
    return da1 - (2.0 - a1**2 / a2**2), da2 - a1 / a2


# --------------------------------------------------------------------------
# Berger Ricci flow


def alpha_first_integral(alpha, beta, dbeta):
    """alpha - beta (beta' + 16) / 8; zero along the Berger Ricci flow."""
    return alpha - beta * (dbeta + 16.0) / 8.0


def _require_berger(traj):
    if traj.kind.flow is not Flow.RICCI_BERGER:
        raise OracleError(f"needs a ricci2 trajectory, got {traj.kind.name}")


def beta_second_order_residual(traj):
    """beta beta'' + 2 beta'^2 + 48 beta' + 256 by central differences.

    Uses the leading uniformly spaced samples. Returns ``(t, residual)``.
    """
    _require_berger(traj)
    n = uniform_run(traj.t)
    if n < 5:
        raise OracleError("need at least 5 uniformly spaced samples")
    t, beta = traj.t[:n], traj.y[:n, 1]
    index, db, ddb = central_differences(t, beta, order=2)
    b = beta[index]
    return t[index], b * ddb + 2.0 * db**2 + 48.0 * db + 256.0


@dataclass(frozen=True)
class Implicit7Result:
    c1: float
    c2: float
    t: np.ndarray
    residual: np.ndarray
    rate: np.ndarray  # d/dt of the implicit left-hand side; should be 1

    def as_tuple(self):
        return self.c1, self.c2, self.residual


def _implicit_lhs(beta, c1, s):
    # the branch of arctan is continued through s = 0 by unwrapping
    angle = np.unwrap(np.arctan(4.0 * math.sqrt(2.0) * beta / s), period=math.pi)
    return -beta / 16.0 - math.sqrt(2.0) / 128.0 * c1 * angle


def implicit7_check(traj):
    """Fit the integration constants of the closed-form implicit solution and test it.

    beta' comes from the state through beta' = 8 alpha/beta - 16. On the
    real branch (beta' > -8, i.e. alpha > beta) the constant c1 is fixed by
    the first valid sample via s^2 = beta^2 beta'^2 / (8 + beta'),
    c1 = -s (16 + beta') / beta'; then s = -c1 beta' / (16 + beta') at
    every sample, and c2 follows from the first sample.
    """
    _require_berger(traj)
    alpha, beta = traj.y[:, 0], traj.y[:, 1]
    ok = ~traj.nonriemannian & (beta > 0)
    dbeta = np.full_like(beta, -math.inf)
    dbeta[ok] = 8.0 * alpha[ok] / beta[ok] - 16.0
    valid = ok & (dbeta > -8.0) & (dbeta != 0.0)
    # use the leading contiguous stretch of the real branch
    if not valid.any():
        raise BranchUnavailable("beta' <= -8 throughout (alpha <= beta): real branch not reached")
    first = int(np.argmax(valid))
    stop = first + (int(np.argmin(valid[first:])) if not valid[first:].all() else len(valid) - first)
    if stop - first < 2:
        raise BranchUnavailable("fewer than two samples on the real branch")
    t = traj.t[first:stop]
    b, db = beta[first:stop], dbeta[first:stop]
    s0 = math.sqrt(b[0] ** 2 * db[0] ** 2 / (8.0 + db[0]))
    c1 = -s0 * (16.0 + db[0]) / db[0]
    s = -c1 * db / (16.0 + db)
    lhs = _implicit_lhs(b, c1, s)
    c2 = float(lhs[0] - t[0])
    residual = lhs - t - c2
    rate = np.gradient(lhs, t) if len(t) > 2 else np.ones_like(t)
    return Implicit7Result(float(c1), c2, t, residual, rate)


def singularity_slopes(traj):
    """(alpha', beta') at the last sample where alpha < 1e-3 alpha(0)."""
    _require_berger(traj)
    if traj.stop.reason is not StopReason.COLLAPSE:
        raise OracleError("trajectory did not reach a collapse")
    alpha0 = traj.y[0, 0]
    if not alpha0 > 0:
        raise OracleError("singularity slopes need alpha(0) > 0")
    riemannian = np.nonzero(~traj.nonriemannian)[0]
    small = [i for i in riemannian if traj.y[i, 0] < 1e-3 * alpha0]
    if not small:
        raise OracleError("alpha never dropped below 1e-3 alpha(0)")
    alpha, beta = traj.y[small[-1]]
    q = alpha / beta
    return -8.0 * q * q, 8.0 * q - 16.0


# --------------------------------------------------------------------------
# curvature checks


def einstein_residual(jet, k):
    """Max |Ric_ii - 6K| of the ambient 4-metric (Einstein constant 6K in these units)."""
    return max(abs(r - 6.0 * k) for r in ricci_ambient(jet).diagonal())


def ricci_flat_residual(jet):
    return einstein_residual(jet, 0)


def volume(a1, a2):
    """sqrt(det g) of the 3-metric, preserved by the normalized flow."""
    return a1 * a2 * a2


def eh_jet(a, r):
    """t-jet of the Eguchi-Hanson scale functions at radius r > a.

    With u = 1 - (a/r)^4 and d/dt = sqrt(u) d/dr:
    a2' = sqrt(u), a1' = 1 + (a/r)^4, a2'' = 2a^4/r^5, a1'' = -4a^4 sqrt(u)/r^5.
    """
    a1, a2, _ = eh_profile(a, r)
    w = (a / r) ** 4
    root = math.sqrt(1.0 - w)
    return TwoParamJet(a1, a2, 1.0 + w, root, -4.0 * w * root / r, 2.0 * w / r)
