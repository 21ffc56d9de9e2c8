"""Right-hand sides of the reduced flows and the t <-> tau reparametrizations."""

from dataclasses import dataclass
import cmath
import enum
import math

from coneflow.errors import DomainError, DomainExit
from coneflow.geometry import ricci_bar


class Flow(enum.Enum):
    """Reduced ODE systems. Values are the CLI names."""

    RICCI_ROUND = "ricci"
    DIRAC = "dirac"
    RICCI_BERGER = "ricci2"
    NORMALIZED_BERGER = "nricci2"
    ASD = "asd"
    FLOW9 = "flow9"
    HITCHIN = "hitchin"

    @property
    def components(self):
        return _COMPONENTS[self]

    @property
    def metric_mask(self):
        """Which state components are metric scales (and so may collapse)."""
        if self is Flow.DIRAC:
            return (True, False)
        return (True,) * len(self.components)


_COMPONENTS = {
    Flow.RICCI_ROUND: ("f",),
    Flow.DIRAC: ("f", "df"),
    Flow.RICCI_BERGER: ("alpha", "beta"),
    Flow.NORMALIZED_BERGER: ("a1", "a2"),
    Flow.ASD: ("a1", "a2"),
    Flow.FLOW9: ("a1", "a2"),
    Flow.HITCHIN: ("a1", "a2"),
}


@dataclass(frozen=True)
class FlowKind:
    flow: Flow
    k: int = 0

    def __post_init__(self):
        if self.k not in (-1, 0, 1):
            raise ValueError(f"curvature sign K must be -1, 0 or +1, got {self.k!r}")
        if self.flow is not Flow.DIRAC and self.k != 0:
            raise ValueError(f"K only applies to the dirac flow, not {self.flow.value}")

    @classmethod
    def parse(cls, name, k=0):
        return cls(Flow(name), int(k) if name == "dirac" else 0)

    @property
    def name(self):
        if self.flow is Flow.DIRAC:
            return f"dirac[K={self.k:+d}]" if self.k else "dirac[K=0]"
        return self.flow.value

    def rhs(self, state):
        """Evaluate the right-hand side on a state tuple (checked, raising)."""
        if self.flow is Flow.DIRAC:
            return rhs_dirac(state, self.k)
        return _RHS[self.flow](*state)


@dataclass(frozen=True)
class FlowState:
    t: float
    vars: tuple


def rhs_ricci_round(f):
    """f' for the round sphere under Ricci flow: 2f'/f = -8/f^2."""
    if not f > 0:
        raise DomainError(f"f must be positive, got {f!r}", component=0)
    return (-4.0 / f,)


def rhs_dirac(state, k):
    """Second-order form f'' = -K f of the constant-curvature profile flow.

    Regular at f = 0, so it starts from f(0) = 0, f'(0) = 1 where the
    square-root form is 0/0. The first integral f'^2 + K f^2 = 1 is
    monitored by :func:`dirac_constraint`, never imposed.
    """
    f, df = state
    return (df, -k * f)


def dirac_constraint(f, df, k):
    return df * df + k * f * f - 1.0


def rhs_ricci_berger(alpha, beta):
    """Ricci flow on the Berger sphere in alpha = A1^2, beta = A2^2."""
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta!r}", component=1)
    if alpha < 0:
        raise DomainError(f"alpha must be non-negative, got {alpha!r}", component=0)
    q = alpha / beta
    return (-8.0 * q * q, 8.0 * q - 16.0)


def rhs_normalized_berger(a1, a2):
    """Volume-preserving normalized Ricci flow; a1 * a2^2 is a first integral."""
    if not a2 > 0:
        raise DomainError(f"a2 must be positive, got {a2!r}", component=1)
    if not a1 > 0:
        raise DomainError(f"a1 must be positive, got {a1!r}", component=0)
    gap = a1 * a1 - a2 * a2
    return (-16.0 / 3.0 * a1 / a2**4 * gap, 8.0 / 3.0 * gap / a2**3)


def rhs_asd(a1, a2):
    """Anti-self-duality system with denominators cleared.

    ``a1 = 0`` is a regular point (the bolt), where the slope of a1 is 2.
    """
    if not a2 > 0:
        raise DomainError(f"a2 must be positive, got {a2!r}", component=1)
    if a1 < 0:
        raise DomainError(f"a1 must be non-negative, got {a1!r}", component=0)
    q = a1 / a2
    return (2.0 - q * q, q)


def rhs_flow9(a1, a2):
    """The metric flow d/dt g = 1/2 sqrt(det Ric) Ric^-1, via the Ricci tensor.

    Uses the two component identities that express the ASD right-hand sides
    through the restricted Ricci curvature. Defined only while both Ricci
    components are positive; leaving that region raises :class:`DomainExit`.
    """
    if not a2 > 0:
        raise DomainError(f"a2 must be positive, got {a2!r}", component=1)
    if not a1 > 0:
        raise DomainExit(f"flow9 undefined at a1={a1!r}")
    ric = ricci_bar(a1, a2)
    if not ric.ric22 > 0:
        raise DomainExit(f"flow9 undefined where a1^2 >= 2 a2^2 (a1={a1!r}, a2={a2!r})")
    root = math.sqrt(ric.ric11)
    return (a1 * 0.5 * ric.ric22 / root, a2 * 0.5 * root)


def rhs_hitchin(a1, a2):
    """Derivatives solving (*psi)' = dbar psi for psi = eps1 and psi = eps2.

    The two contact-form equations are the linear system
    [[0, 2 a2], [a2, a1]] (a1', a2') = (2 a1, 2 a2), solved by Cramer's rule.
    """
    if not a2 > 0:
        raise DomainError(f"a2 must be positive, got {a2!r}", component=1)
    if a1 < 0:
        raise DomainError(f"a1 must be non-negative, got {a1!r}", component=0)
    det = -2.0 * a2 * a2
    b1, b2 = 2.0 * a1, 2.0 * a2
    return ((b1 * a1 - 2.0 * a2 * b2) / det, (-b1 * a2) / det)


def hitchin_residuals(a1, a2, da1, da2):
    """Defects of (*psi)' - dbar psi for psi = eps1, eps2, eps3."""
    if not a2 > 0:
        raise DomainError(f"a2 must be positive, got {a2!r}", component=1)
    if not a1 > 0:
        raise DomainError(f"a1 must be positive, got {a1!r}", component=0)
    r1 = 2.0 * a2 * da2 - 2.0 * a1
    r2 = da1 * a2 + a1 * da2 - 2.0 * a2
    return (r1, r2, r2)


_RHS = {
    Flow.RICCI_ROUND: rhs_ricci_round,
    Flow.RICCI_BERGER: rhs_ricci_berger,
    Flow.NORMALIZED_BERGER: rhs_normalized_berger,
    Flow.ASD: rhs_asd,
    Flow.FLOW9: rhs_flow9,
    Flow.HITCHIN: rhs_hitchin,
}


# --------------------------------------------------------------------------
# reparametrization of the round Ricci flow


def _check_profile_domain(k, t):
    if k not in (-1, 0, 1):
        raise ValueError(f"K must be -1, 0 or +1, got {k!r}")
    if not t > 0 or (k == 1 and not t < math.pi):
        raise DomainError(f"t={t!r} outside the domain of the K={k:+d} profile")


def _profile(k, t):
    # accepts complex t for complex-step differentiation
    if k == 1:
        return cmath.sin(t) if isinstance(t, complex) else math.sin(t)
    if k == -1:
        return cmath.sinh(t) if isinstance(t, complex) else math.sinh(t)
    return t


def tau_reparametrization(k, t, constant=0.0):
    """Ricci-flow time tau = C - f_K(t)^2 / 8 for the constant-curvature profile f_K.

    The same sign is used for every K: d tau/dt = -f f'/4 is what turns the
    radial growth of the spheres into a solution of d/dtau g = -2 Ric.
    """
    _check_profile_domain(k, t)
    return _tau(k, t, constant)


def _tau(k, t, constant=0.0):
    return constant - _profile(k, t) ** 2 / 8.0


def verify_prop1(k, t, step=1e-20):
    """|(d g/dt) / (d tau/dt) + 2 Ric| in the orthonormal frame at t.

    Both derivatives are taken by complex-step differentiation, so no closed
    form for f' enters the check.
    """
    _check_profile_domain(k, t)
    z = complex(t, step)
    dtau = _tau(k, z).imag / step
    f = _profile(k, t)
    metric_rate = (_profile(k, z) ** 2).imag / step / (f * f)
    if dtau == 0.0:
        raise DomainError(f"d tau/dt vanishes at t={t!r}")
    return abs(metric_rate / dtau + 2.0 * ricci_bar(f, f).ric11)
