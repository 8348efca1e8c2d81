"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is chosen once at import time.  Set ``PSEUDOLOGIT_DISABLE_NUMBA=1``
to force the numpy path (useful for debugging and for benchmarking the two
against each other); if numba cannot be imported the numpy path is used
silently.
"""

import os

from . import _numpy

_DISABLED = os.environ.get("PSEUDOLOGIT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

if _DISABLED:
    _impl = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _impl = _numpy
        BACKEND = "numpy"

logistic_logpdf_std = _impl.logistic_logpdf_std
loglik = _impl.loglik
loglik_grad = _impl.loglik_grad
pairs_from_uniforms = _impl.pairs_from_uniforms

__all__ = ["BACKEND", "logistic_logpdf_std", "loglik", "loglik_grad", "pairs_from_uniforms"]
