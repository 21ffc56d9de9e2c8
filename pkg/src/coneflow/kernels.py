"""Chooses the integration kernel at import: compiled if built, else pure Python."""

from coneflow import _pykernels

try:
    from coneflow import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

AVAILABLE = {"python": _pykernels}
if _compiled is not None:
    AVAILABLE["compiled"] = _compiled

DEFAULT = "compiled" if _compiled is not None else "python"


def get(name=None):
    """Kernel module by name; ``None`` selects the default backend."""
    name = name or DEFAULT
    try:
        return AVAILABLE[name]
    except KeyError:
        raise ValueError(
            f"unknown or unavailable backend {name!r}; available: {sorted(AVAILABLE)}"
        ) from None
