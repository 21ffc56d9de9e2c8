"""Exception types shared across the package."""


class DomainError(ValueError):
    """A quantity was evaluated outside the region where it is defined.

    ``component`` names the offending state index when the violation is a
    metric coefficient reaching zero; the integrator uses it to report the
    collapsing component.
    """

    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class DomainExit(ArithmeticError):
    """A flow left the region where its right-hand side is defined.

    Distinct from :class:`DomainError`: this is an expected outcome of a
    trajectory (reported as a stop event), not a programming error.
    """


class MissingDerivativeError(ValueError):
    """An operation needed second derivatives that the jet does not carry."""


class InvalidInitialState(ValueError):
    pass


class IntegrationError(RuntimeError):
    pass


class OracleError(ValueError):
    """An oracle cannot be applied to the given trajectory."""


class BranchUnavailable(OracleError):
    """The real branch of the implicit Berger solution is not reached."""
