"""Backend selection for the hot kernels.

The compiled Cython extension is used when importable; the numpy
implementation is the fallback. Set ``QUANTCAP_PURE=1`` to force the
fallback (used by the benchmark and the backend-parity tests).
"""

import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("QUANTCAP_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

simplex_max = _impl.simplex_max
sign_tally = _impl.sign_tally

__all__ = ["BACKEND", "simplex_max", "sign_tally"]
