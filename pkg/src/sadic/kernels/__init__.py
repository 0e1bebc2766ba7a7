"""Hot loops: compiled Cython extension with a pure-Python fallback.

The extension is used when it imports; set ``SADIC_PURE_PYTHON=1`` to force
the fallback.  ``BACKEND`` names the active implementation.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("SADIC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

vec_log_growth = _impl.vec_log_growth
mat_log_growth = _impl.mat_log_growth
brun_digits = _impl.brun_digits
window_extrema = _impl.window_extrema
grid_query = _impl.grid_query

__all__ = ["BACKEND", "vec_log_growth", "mat_log_growth", "brun_digits",
           "window_extrema", "grid_query", "python_backend", "compiled_backend"]
