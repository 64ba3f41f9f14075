"""Batched statistics kernels with backend selection at import.

The compiled Cython module is preferred; the numpy implementation is used
when the extension is missing or when the environment variable
CGWITNESS_PURE_PYTHON=1 forces it (useful for parity testing).
"""

import os

if os.environ.get("CGWITNESS_PURE_PYTHON") == "1":
    from . import _core_py as _backend
else:
    try:
        from . import _core as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _core_py as _backend

batch_weighted_moments = _backend.batch_weighted_moments
batch_entropy = _backend.batch_entropy


def backend_name() -> str:
    """Return which kernel backend is active: 'cython' or 'python'."""
    return _backend.BACKEND


__all__ = ["batch_weighted_moments", "batch_entropy", "backend_name"]
