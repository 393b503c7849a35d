"""Backend selection for the hot Fourier-sum kernel.

The Cython extension ``mzsim._kernels`` is used when it was built; otherwise
the numpy implementation in ``mzsim._fallback`` is used. Setting the
environment variable ``MZSIM_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from . import _fallback

if os.environ.get("MZSIM_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"


def fourier_sum(nodes, weights, k0, dk, count, sign=-1):
    """Evaluate a non-uniform Fourier sum on a uniform output grid.

    Parameters
    ----------
    nodes : array_like of float
        Sample positions x_j (any order, any spacing).
    weights : array_like of complex
        Coefficients w_j attached to each node.
    k0, dk : float
        First output wave number and output spacing.
    count : int
        Number of output samples.
    sign : {-1, +1}
        Sign of the exponent.

    Returns
    -------
    numpy.ndarray
        ``out[m] = sum_j w_j exp(sign * i * (k0 + m dk) * x_j)``.
    """
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    if _compiled is not None:
        return _compiled.fourier_sum(nodes, weights, float(k0), float(dk), int(count), int(sign))
    return _fallback.fourier_sum(nodes, weights, k0, dk, count, sign)
