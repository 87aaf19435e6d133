"""Kernel selection: compiled extension when importable, numpy otherwise."""
from __future__ import annotations

from . import _kernel_py

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None


def available_backends():
    """Mapping name -> evolve function for every backend that imports."""
    out = {"python": _kernel_py.evolve_arrow}
    if _kernel is not None:
        out["cython"] = _kernel.evolve_arrow
    return out


BACKEND = "cython" if _kernel is not None else "python"


def get_evolver(backend=None):
    """Evolve function for ``backend`` (default: the one selected at import)."""
    backends = available_backends()
    name = backend or BACKEND
    if name not in backends:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(backends)}")
    return backends[name]
