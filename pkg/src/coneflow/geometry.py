"""Cartan-frame geometry of the cone metrics dt^2 + A1^2 (e1)^2 + A2^2 ((e2)^2 + (e3)^2).

Conventions
-----------
The left-invariant coframe on S^3 satisfies de1 = 2 e2^e3 (cyclically), so the
round unit sphere has Ricci tensor ``4 * identity`` in these units: a curvature
block coefficient is read as half of R^i_{jkl}, and every Ricci component below
is twice the textbook value. All values are in the orthonormal coframe
eps0 = dt, eps1 = A1 e1, eps2 = A2 e2, eps3 = A2 e3.

Index pairs (i, j) always have i < j; antisymmetry is applied on lookup.
"""

from dataclasses import dataclass, field

from coneflow.errors import DomainError, MissingDerivativeError


@dataclass(frozen=True)
class FrameConvention:
    structure_constant: float = 2.0
    curvature_factor: float = 2.0


FRAME = FrameConvention()


@dataclass(frozen=True)
class TwoParamJet:
    """Values and t-derivatives of the two scale functions at one point.

    The conformally round ansatz is the special case ``a1 == a2 == f``; build
    it with :meth:`conformal`.
    """

    a1: float
    a2: float
    da1: float = 0.0
    da2: float = 0.0
    dda1: float | None = None
    dda2: float | None = None

    @classmethod
    def conformal(cls, f, df=0.0, ddf=None):
        return cls(f, f, df, df, ddf, ddf)

    @property
    def has_second(self):
        return self.dda1 is not None and self.dda2 is not None


def _require_positive(a1, a2):
    if not a2 > 0:
        raise DomainError(f"a2 must be positive, got {a2!r}", component=1)
    if not a1 > 0:
        raise DomainError(
            f"connection form undefined at a1={a1!r} (collapsed Hopf fiber)",
            component=0,
        )


def _require_second(jet):
    if not jet.has_second:
        raise MissingDerivativeError("jet carries no second derivatives")


# --------------------------------------------------------------------------
# connection form


@dataclass(frozen=True)
class ConnectionForm:
    """Nonzero coefficients of omega^i_j = c * eps^k, keyed by (i, j, k), i < j.

    ``entries`` holds the Levi-Civita connection itself, i.e. the solution of
    d eps^i = -omega^i_j ^ eps^j. The table usually quoted for this ansatz is -omega; see
    :meth:`displayed`.
    """

    entries: dict = field(default_factory=dict)

    def coefficient(self, i, j, k):
        if i == j:
            return 0.0
        if i < j:
            return self.entries.get((i, j, k), 0.0)
        return -self.entries.get((j, i, k), 0.0)

    def displayed(self):
        """Entries of the matrix -omega, the form in which it is usually tabulated."""
        return {key: -c for key, c in self.entries.items()}


def connection_form(jet):
    a1, a2 = jet.a1, jet.a2
    _require_positive(a1, a2)
    r1 = jet.da1 / a1
    r2 = jet.da2 / a2
    twist = a1 / a2**2
    fiber = (a1**2 - 2.0 * a2**2) / (a1 * a2**2)
    return ConnectionForm({
        (0, 1, 1): -r1,
        (0, 2, 2): -r2,
        (0, 3, 3): -r2,
        (1, 2, 3): twist,
        (1, 3, 2): -twist,
        (2, 3, 1): -fiber,
    })


# --------------------------------------------------------------------------
# curvature form


@dataclass(frozen=True)
class CurvatureBlocks:
    """Omega^i_j as lists of (k, l, coefficient) terms of eps^k ^ eps^l, k < l."""

    blocks: dict = field(default_factory=dict)

    def coefficient(self, i, j, k, l):
        if i == j or k == l:
            return 0.0
        sign = 1.0
        if i > j:
            i, j, sign = j, i, -sign
        if k > l:
            k, l, sign = l, k, -sign
        for kk, ll, c in self.blocks.get((i, j), ()):
            if (kk, ll) == (k, l):
                return sign * c
        return 0.0

    def sectional(self, i, j):
        """Coefficient of eps^i ^ eps^j in Omega^i_j (half the sectional curvature R^i_{jij})."""
        return self.coefficient(i, j, i, j)


# eps1 -> -eps1, eps2 <-> eps3: an isometry of the ansatz that preserves the
# structure equations (a bare 2<->3 swap reverses the sign of de1).
_SWAP = {0: 0, 1: 1, 2: 3, 3: 2}
_SIGN = {0: 1.0, 1: -1.0, 2: 1.0, 3: 1.0}


def _swap_term(k, l, c):
    k2, l2 = _SWAP[k], _SWAP[l]
    c = c * _SIGN[k] * _SIGN[l]
    if k2 > l2:
        k2, l2, c = l2, k2, -c
    return k2, l2, c


def swap_symmetry(blocks):
    """Image of a block set under the fiber-reversing swap of eps2 and eps3."""
    out = {}
    for (i, j), terms in blocks.blocks.items():
        i2, j2 = _SWAP[i], _SWAP[j]
        sign = _SIGN[i] * _SIGN[j]
        if i2 > j2:
            i2, j2, sign = j2, i2, -sign
        out[(i2, j2)] = sorted(_swap_term(k, l, sign * c) for k, l, c in terms)
    return CurvatureBlocks(out)


def curvature_blocks(jet):
    _require_second(jet)
    a1, a2 = jet.a1, jet.a2
    _require_positive(a1, a2)
    d1, d2, dd1, dd2 = jet.da1, jet.da2, jet.dda1, jet.dda2

    mixed = d1 / a2**2 - a1 * d2 / a2**3
    fiber_plane = a1**2 / a2**4 - d1 * d2 / (a1 * a2)
    base_plane = 4.0 / a2**2 - 3.0 * a1**2 / a2**4 - d2**2 / a2**2

    # Omega^0_3 and Omega^1_3 follow from the fiber-reversing swap below
    direct = {
        (0, 1): [(0, 1, -dd1 / a1), (2, 3, -2.0 * mixed)],
        # eps3 ^ eps1 = -(eps1 ^ eps3)
        (0, 2): [(0, 2, -dd2 / a2), (1, 3, -mixed)],
        (1, 2): [(0, 3, mixed), (1, 2, fiber_plane)],
        (2, 3): [(0, 1, -2.0 * mixed), (2, 3, base_plane)],
    }
    mirrored = swap_symmetry(CurvatureBlocks({k: direct[k] for k in ((0, 2), (1, 2))}))
    blocks = dict(direct)
    blocks.update(mirrored.blocks)
    return CurvatureBlocks({key: sorted(terms) for key, terms in sorted(blocks.items())})


# --------------------------------------------------------------------------
# Ricci curvature


@dataclass(frozen=True)
class RicciDiagnostics:
    ric00: float | None
    ric11: float
    ric22: float
    ric33: float
    scalar: float
    is_ambient: bool

    def diagonal(self):
        if self.ric00 is None:
            return (self.ric11, self.ric22, self.ric33)
        return (self.ric00, self.ric11, self.ric22, self.ric33)


def ricci_bar(a1, a2):
    """Ricci tensor of the 3-metric A1^2 (e1)^2 + A2^2 ((e2)^2 + (e3)^2).

    Depends only on the values, never on t-derivatives. ``a1 = 0`` is
    allowed: it is the bolt locus where the Hopf fiber has collapsed.
    """
    if not a2 > 0:
        raise DomainError(f"a2 must be positive, got {a2!r}", component=1)
    if a1 < 0:
        raise DomainError(f"a1 must be non-negative, got {a1!r}", component=0)
    q = a1**2 / a2**2
    ric11 = 4.0 * q / a2**2
    ric22 = 4.0 / a2**2 * (2.0 - q)
    return RicciDiagnostics(None, ric11, ric22, ric22, ric11 + 2.0 * ric22, False)


def ricci_ambient(jet):
    """Diagonal Ricci tensor of the 4-metric, summed from the curvature blocks.

    Off-diagonal components vanish for this ansatz and are not reported.
    """
    blocks = curvature_blocks(jet)
    ric = [
        FRAME.curvature_factor * sum(blocks.sectional(i, j) for j in range(4) if j != i)
        for i in range(4)
    ]
    return RicciDiagnostics(ric[0], ric[1], ric[2], ric[3], sum(ric), True)


def ricci_conformal_ambient(f, df, ddf):
    """Closed-form Ricci tensor of dt^2 + f^2 g_round."""
    if not f > 0:
        raise DomainError(f"f must be positive, got {f!r}", component=0)
    ric00 = -6.0 * ddf / f
    ric11 = (4.0 - 4.0 * df**2 - 2.0 * ddf * f) / f**2
    scalar = 3.0 / f**2 * (4.0 - 4.0 * df**2 - 4.0 * ddf * f)
    return RicciDiagnostics(ric00, ric11, ric11, ric11, scalar, True)


# --------------------------------------------------------------------------
# hypersurface quantities


@dataclass(frozen=True)
class SecondFundamentalForm:
    orthonormal: float  # diagonal value in the eps basis
    invariant_basis: float  # diagonal value in the e basis
    metric_rate: float  # d/dtau of the e-basis metric diagonal; equals -2 * invariant_basis


def second_fundamental_round(tau):
    """Second fundamental form of the radius-tau sphere in flat R^4."""
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau!r}")
    return SecondFundamentalForm(-1.0 / tau, -tau, 2.0 * tau)


@dataclass(frozen=True)
class AsdResidual:
    rho1: float  # eps1 coefficient of omega^0_1 + omega^2_3
    rho2: float  # eps2 coefficient of omega^0_2 - omega^1_3


def asd_residual(jet):
    """Anti-self-duality defects, read off the tabulated (-omega) connection matrix.

    rho1 = a1'/a1 + (a1^2 - 2 a2^2)/(a1 a2^2), rho2 = a2'/a2 - a1/a2^2.
    The overall sign is a convention; both vanish exactly on ASD jets.
    """
    shown = ConnectionForm(connection_form(jet).displayed())
    return AsdResidual(
        shown.coefficient(0, 1, 1) + shown.coefficient(2, 3, 1),
        shown.coefficient(0, 2, 2) - shown.coefficient(1, 3, 2),
    )


def contact_pairing(index, a1, a2):
    """Coefficient of eps1^eps2^eps3 in psi ^ dbar psi for psi = eps^index.

    dbar is the differential along S^3 only. A nonzero value certifies that
    psi is a contact form.
    """
    if not a2 > 0:
        raise DomainError(f"a2 must be positive, got {a2!r}", component=1)
    if not a1 > 0:
        raise DomainError(f"contact condition degenerates at a1={a1!r}", component=0)
    if index == 1:
        return 2.0 * a1 / a2**2
    if index in (2, 3):
        return 2.0 / a1
    raise ValueError(f"index must be 1, 2 or 3, got {index!r}")


def hodge_dbar_pair(index, jet):
    """Both sides of (*psi)' = dbar psi for psi = eps^index, in the e basis.

    Returns ``(rate, dbar)``: the t-derivative of the coefficient of
    *psi (e2^e3 for index 1, e3^e1 / e1^e2 otherwise) and the coefficient
    of dbar psi on the same 2-form.
    """
    a1, a2 = jet.a1, jet.a2
    if not a2 > 0:
        raise DomainError(f"a2 must be positive, got {a2!r}", component=1)
    if not a1 > 0:
        raise DomainError(f"a1 must be positive, got {a1!r}", component=0)
    if index == 1:
        return 2.0 * a2 * jet.da2, FRAME.structure_constant * a1
    if index in (2, 3):
        return jet.da1 * a2 + a1 * jet.da2, FRAME.structure_constant * a2
    raise ValueError(f"index must be 1, 2 or 3, got {index!r}")

