"""Backend selection for the numeric kernels.

The numba backend is used when numba imports, unless ``IMPRAND_DISABLE_NUMBA``
is set to a true value. Both backends are importable directly for comparison.
"""
import os

from . import _kernels_numpy as numpy_backend

_disabled = os.environ.get("IMPRAND_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

numba_backend = None
if not _disabled:
    try:
        from . import _kernels_numba as numba_backend
    except ImportError:  # pragma: no cover - numba is optional
        numba_backend = None

backend = numba_backend if numba_backend is not None else numpy_backend
BACKEND_NAME = "numba" if backend is numba_backend else "numpy"

log_capital = backend.log_capital
mixture_log_capital = backend.mixture_log_capital
cap_mix_log = backend.cap_mix_log
backward_lower = backend.backward_lower
