"""Backend selection for the enumeration / sampling kernels.

Set ``CHORDSTATS_DISABLE_NUMBA=1`` to force the vectorized numpy kernels
even when numba is importable.  Both backends produce identical tallies.
"""

from __future__ import annotations

import os

_FALSY = {"", "0", "false", "no", "off"}

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is optional
    NUMBA_AVAILABLE = False

NUMBA_DISABLED_BY_ENV = (
    os.environ.get("CHORDSTATS_DISABLE_NUMBA", "").strip().lower() not in _FALSY
)

BACKENDS = ("numba", "numpy")


def default_backend() -> str:
    if NUMBA_AVAILABLE and not NUMBA_DISABLED_BY_ENV:
        return "numba"
    return "numpy"


def resolve_backend(backend: str | None) -> str:
    if backend is None:
        return default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
