"""Kernel selection: compiled Cython core when built, numpy otherwise.

``COLLFRIC_BACKEND=python`` forces the numpy kernel even when the extension
is importable.
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py.collision_trajectory}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.collision_trajectory

_requested = os.environ.get("COLLFRIC_BACKEND", "").strip().lower()
if _requested and _requested not in ("python", "cython"):
    raise ImportError(f"COLLFRIC_BACKEND must be 'python' or 'cython', got {_requested!r}")
if _requested == "python" or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"
collision_trajectory = BACKENDS[BACKEND]
