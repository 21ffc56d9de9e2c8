"""Reduced geometric flows on cone metrics over S^3: curvature, integration and checks."""

from coneflow.errors import (
    BranchUnavailable,
    DomainError,
    DomainExit,
    IntegrationError,
    InvalidInitialState,
    MissingDerivativeError,
    OracleError,
)
from coneflow.flows import Flow, FlowKind, FlowState
from coneflow.geometry import (
    TwoParamJet,
    asd_residual,
    connection_form,
    curvature_blocks,
    ricci_ambient,
    ricci_bar,
)
from coneflow.integrator import IntegratorConfig, StopEvent, StopReason, Trajectory, integrate

__version__ = "0.1.0"

__all__ = [
    "BranchUnavailable",
    "DomainError",
    "DomainExit",
    "Flow",
    "FlowKind",
    "FlowState",
    "IntegrationError",
    "IntegratorConfig",
    "InvalidInitialState",
    "MissingDerivativeError",
    "OracleError",
    "StopEvent",
    "StopReason",
    "Trajectory",
    "TwoParamJet",
    "asd_residual",
    "connection_form",
    "curvature_blocks",
    "integrate",
    "ricci_ambient",
    "ricci_bar",
]
