"""Numerical backend selection.

Hot kernels exist twice: a numba @njit version and a pure-numpy version.
The active path is chosen once at import from the CASCADE_LAB_BACKEND
environment variable ("numba" or "numpy"); default is numba when it
imports, numpy otherwise.  `set_backend` switches at runtime (tests use
this; results of the two paths agree statistically but are not
bit-identical because the numpy path draws from a single vectorized
stream while the numba path re-seeds one stream per replicate).
"""
from __future__ import annotations

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency, but stay importable
    numba = None
    HAS_NUMBA = False

_VALID = ("numba", "numpy")
_active = os.environ.get("CASCADE_LAB_BACKEND", "").strip().lower()
if _active not in _VALID:
    _active = "numba" if HAS_NUMBA else "numpy"
if _active == "numba" and not HAS_NUMBA:
    _active = "numpy"


def active_backend() -> str:
    return _active


def set_backend(name: str) -> str:
    """Switch the kernel path; returns the previous setting."""
    global _active
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}; expected one of {_VALID}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    prev = _active
    _active = name
    return prev


def use_numba() -> bool:
    return _active == "numba"


def set_workers(workers: int | None) -> int:
    """Cap numba's thread pool at `workers` (clamped to what exists).

    The numpy path is single-threaded and ignores this.  Estimates are
    bit-identical for any worker count by construction (per-replicate
    seeding), so the cap only affects speed.
    """
    if workers is None:
        env = os.environ.get("CASCADE_LAB_WORKERS", "")
        workers = int(env) if env.strip() else 0
    if workers <= 0 or not HAS_NUMBA:
        return 0
    limit = numba.config.NUMBA_NUM_THREADS
    eff = max(1, min(int(workers), limit))
    numba.set_num_threads(eff)
    return eff
