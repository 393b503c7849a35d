"""Pure-numpy implementations of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

# Bounds the (count x block) phase matrix to ~32 MB.
_BLOCK_ELEMENTS = 1 << 21


def fourier_sum(nodes, weights, k0, dk, count, sign=-1):
    """out[m] = sum_j weights[j] * exp(sign * 1j * (k0 + m*dk) * nodes[j])."""
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    if nodes.shape != weights.shape:
        raise ValueError("nodes and weights differ in length")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    kgrid = k0 + dk * np.arange(count)
    out = np.zeros(count, dtype=np.complex128)
    block = max(1, _BLOCK_ELEMENTS // max(count, 1))
    for start in range(0, nodes.size, block):
        x = nodes[start:start + block]
        w = weights[start:start + block]
        out += np.exp(sign * 1j * np.outer(kgrid, x)) @ w
    return out
