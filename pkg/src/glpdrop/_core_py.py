"""Pure-numpy implementation of the compiled kernels."""
import numpy as np


def stencil_sum(src, offsets, weights):
    """out[x] = sum_s weights[s] * src[x - offsets[s]] with periodic wrap."""
    src = np.asarray(src, dtype=float)
    out = np.zeros_like(src)
    for off, w in zip(np.asarray(offsets), np.asarray(weights)):
        if w != 0.0:
            out += w * np.roll(src, tuple(int(o) for o in off), axis=(0, 1, 2))
    return out
