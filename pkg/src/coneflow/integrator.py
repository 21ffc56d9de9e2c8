"""Classical RK4 integration of the reduced flows with collapse detection."""

from dataclasses import dataclass, field
import enum

import numpy as np

from coneflow import _pykernels as codes
from coneflow import kernels
from coneflow.errors import DomainError, DomainExit, IntegrationError, InvalidInitialState
from coneflow.flows import Flow, FlowKind, FlowState

_FLOW_CODE = {
    Flow.RICCI_ROUND: codes.RICCI_ROUND,
    Flow.DIRAC: codes.DIRAC,
    Flow.RICCI_BERGER: codes.RICCI_BERGER,
    Flow.NORMALIZED_BERGER: codes.NORMALIZED_BERGER,
    Flow.ASD: codes.ASD,
    Flow.FLOW9: codes.FLOW9,
    Flow.HITCHIN: codes.HITCHIN,
}


class StopReason(enum.Enum):
    REACHED_T_END = "ReachedTEnd"
    COLLAPSE = "Collapse"
    DOMAIN_EXIT = "DomainExit"
    STEP_UNDERFLOW = "StepUnderflow"


@dataclass(frozen=True)
class StopEvent:
    reason: StopReason
    t_stop: float
    component: str | None = None
    detail: str = ""


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration settings.

    ``step`` is the initial and maximal step. With ``adaptive`` the step is
    halved whenever a step-doubling error estimate exceeds the tolerances,
    and regrown up to ``step`` once the error is small again; that keeps
    the grid uniform away from singularities and resolves the approach to
    a collapse. A collapse is reported when a metric component drops below
    ``collapse_eps`` or its extrapolated time to zero drops below
    ``step * 1e-3``.
    """

    t_end: float = 1.0
    step: float = 1e-3
    adaptive: bool = True
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    collapse_eps: float = 1e-6
    max_samples: int = 10_000_000
    step_floor: float = 1e-12
    continue_past_collapse: bool = False

    def __post_init__(self):
        for name in ("step", "rel_tol", "abs_tol", "collapse_eps", "step_floor"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.max_samples < 2:
            raise ValueError("max_samples must be at least 2")

    @property
    def collapse_tol(self):
        return self.step * 1e-3


@dataclass
class Trajectory:
    kind: FlowKind
    t: np.ndarray
    y: np.ndarray
    stop: StopEvent
    nonriemannian: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.nonriemannian is None:
            self.nonriemannian = np.zeros(len(self.t), dtype=bool)

    def __len__(self):
        return len(self.t)

    @property
    def components(self):
        return self.kind.flow.components

    def column(self, name):
        return self.y[:, self.components.index(name)]

    @property
    def samples(self):
        return [FlowState(float(t), tuple(float(v) for v in row)) for t, row in zip(self.t, self.y)]

    @property
    def final(self):
        return FlowState(float(self.t[-1]), tuple(float(v) for v in self.y[-1]))


def _as_state(kind, init):
    if isinstance(init, FlowState):
        t0, values = init.t, init.vars
    else:
        t0, values = 0.0, init
    values = tuple(float(v) for v in values)
    if len(values) != len(kind.flow.components):
        raise InvalidInitialState(
            f"{kind.name} expects state {kind.flow.components}, got {len(values)} values"
        )
    if not np.all(np.isfinite(values)):
        raise InvalidInitialState(f"non-finite initial state {values}")
    return float(t0), values


def integrate(kind, init, cfg=None, backend=None):
    """Integrate ``kind`` from ``init`` (a FlowState or a tuple at t = 0)."""
    cfg = cfg or IntegratorConfig()
    t0, y0 = _as_state(kind, init)
    if not cfg.t_end > t0:
        raise ValueError(f"t_end={cfg.t_end!r} must exceed the initial time {t0!r}")
    if cfg.continue_past_collapse and kind.flow is not Flow.RICCI_BERGER:
        raise ValueError("continuation past collapse is only defined for ricci2")
    names = kind.flow.components

    try:
        kind.rhs(y0)
    except DomainExit as exc:
        stop = StopEvent(StopReason.DOMAIN_EXIT, t0, None, str(exc))
        return Trajectory(kind, np.array([t0]), np.array([y0]), stop)
    except DomainError as exc:
        raise InvalidInitialState(str(exc)) from exc

    impl = kernels.get(backend)
    ts, ys, reason, comp, t_stop = impl.run(
        _FLOW_CODE[kind.flow], float(kind.k), y0, t0, cfg.t_end, cfg.step, cfg.adaptive,
        cfg.rel_tol, cfg.abs_tol, cfg.collapse_eps, cfg.collapse_tol, cfg.step_floor,
        cfg.max_samples,
    )
    component = names[comp] if comp >= 0 else None
    if reason == codes.BUDGET:
        raise IntegrationError(f"sample budget {cfg.max_samples} exhausted at t={t_stop!r}")
    if reason == codes.REACHED_T_END:
        stop = StopEvent(StopReason.REACHED_T_END, t_stop)
    elif reason == codes.COLLAPSE:
        stop = StopEvent(StopReason.COLLAPSE, t_stop, component)
    elif reason == codes.STEP_UNDERFLOW:
        stop = StopEvent(StopReason.STEP_UNDERFLOW, t_stop, None, "step fell below the floor")
    elif reason == codes.NOT_FINITE:
        stop = StopEvent(StopReason.DOMAIN_EXIT, t_stop, component, "non-finite state")
    else:
        stop = StopEvent(StopReason.DOMAIN_EXIT, t_stop, component)
    traj = Trajectory(kind, ts, ys, stop)

    if stop.reason is StopReason.COLLAPSE and cfg.continue_past_collapse and t_stop < cfg.t_end:
        traj = _continue_berger(traj, cfg, impl)
    return traj


def _continue_berger(traj, cfg, impl):
    # the fiber stays collapsed and the base follows beta' = -16 through zero
    start = (0.0, float(traj.y[-1, 1]))
    ts, ys, *_ = impl.run(
        codes.BERGER_CONTINUATION, 0.0, start, float(traj.t[-1]), cfg.t_end, cfg.step, False,
        cfg.rel_tol, cfg.abs_tol, cfg.collapse_eps, cfg.collapse_tol, cfg.step_floor,
        cfg.max_samples,
    )
    flags = np.concatenate([np.zeros(len(traj.t), dtype=bool), np.ones(len(ts) - 1, dtype=bool)])
    return Trajectory(
        traj.kind,
        np.concatenate([traj.t, ts[1:]]),
        np.concatenate([traj.y, ys[1:]]),
        traj.stop,
        flags,
    )
