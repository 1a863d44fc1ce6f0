"""Kernel selection.

The compiled ``_kernels`` extension is used when it was built; otherwise the
numpy implementations in ``_pykernels`` take over. Set
``SDRCODESIGN_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

IMPLEMENTATION = "python"
_impl = _pykernels

if os.environ.get("SDRCODESIGN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        IMPLEMENTATION = "cython"
    except ImportError:
        _impl = _pykernels

viterbi_soft = _impl.viterbi_soft
fir_complex = _impl.fir_complex
fir_real = _impl.fir_real
fir_int = _impl.fir_int
autocorr = _impl.autocorr
fixed_fft = _impl.fixed_fft


def compiled():
    """Return the compiled kernel module, or None when it is unavailable."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
