"""Numba switch.

Set ``FLEXLOSS_DISABLE_NUMBA=1`` (before import) to run every kernel on the
pure-numpy fallback path. Numba is also skipped when it is not installed.
"""

from __future__ import annotations

import os

ENV_FLAG = "FLEXLOSS_DISABLE_NUMBA"


def _env_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    if _env_disabled():
        raise ImportError
    import numba as _numba
except ImportError:
    _numba = None

NUMBA_ENABLED = _numba is not None
BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def njit(fn):
    """Compile ``fn`` with numba when enabled; otherwise return it unchanged."""
    if _numba is None:
        return fn
    # numpy error model: float division by zero gives inf/nan instead of raising, as on the fallback
    return _numba.njit(cache=True, nogil=True, error_model="numpy")(fn)
