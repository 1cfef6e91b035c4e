"""Backend selection for the hot kernels.

The numba backend is used when numba imports cleanly and the environment
variable ``DSMOOTH_DISABLE_NUMBA`` is unset (or ``0``). Both backends are
importable directly for benchmarking.
"""
import os

from . import _numpy

BACKEND = "numpy"
_impl = _numpy

if os.environ.get("DSMOOTH_DISABLE_NUMBA", "0") in ("", "0"):
    try:
        from . import _numba
    except ImportError:  # pragma: no cover
        pass
    else:
        _impl = _numba
        BACKEND = "numba"

convolve_symmetric = _impl.convolve_symmetric
prox_l1_box = _impl.prox_l1_box
prox_absdev_box = _impl.prox_absdev_box
conj_l1_box = _impl.conj_l1_box
conj_absdev_box = _impl.conj_absdev_box
reflect_index = _numpy.reflect_index

__all__ = ["BACKEND", "convolve_symmetric", "prox_l1_box", "prox_absdev_box",
           "conj_l1_box", "conj_absdev_box", "reflect_index"]
