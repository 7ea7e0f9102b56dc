"""Numpy fallback for the dyadic aggregation kernel."""

import numpy as np


def subcube_reduce(j, k, w, root_j, root_k, use_max=False):
    """For every root cube, sum (or max) of ``w`` over entries whose cube lies inside it."""
    out = np.zeros(len(root_j))
    if len(j) == 0:
        return out
    for r in range(len(root_j)):
        shift = j - root_j[r]
        inside = shift >= 0
        shifted = np.right_shift(k, np.clip(shift, 0, 62)[:, None])
        inside &= np.all(shifted == root_k[r], axis=1)
        if not inside.any():
            continue
        vals = w[inside]
        if use_max:
            out[r] = max(0.0, float(vals.max()))
        else:
            # cumsum accumulates left to right, matching the compiled loop bit for bit
            out[r] = np.cumsum(vals)[-1]
    return out
