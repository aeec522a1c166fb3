"""Pure-numpy fallback for the pooling scan kernel.

Same contract as the compiled extension in ``_pool.pyx``: identical group
boundaries for the same inputs (both accumulate dot products and norms in
float64, so decisions can only diverge on cosines within ~1 ulp of tau).
"""

from __future__ import annotations

import numpy as np

_ZERO_EPS = 1e-12


def pool_boundaries(data: np.ndarray, tau: float, omega: int) -> np.ndarray:
    """Group start indices for the greedy lookback-window merging scan.

    data must be a C-contiguous float32 (T, d) matrix.  A token joins the
    current group when its cosine against ANY of the last min(group size,
    omega) raw tokens of that group reaches tau; otherwise a new group
    starts.  Zero-norm tokens compare as 0.0.
    """
    T = data.shape[0]
    if T == 0:
        return np.empty(0, dtype=np.int64)
    work = data.astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", work, work))
    live = norms >= _ZERO_EPS

    boundaries = [0]
    group_start = 0
    for t in range(1, T):
        k = min(t - group_start, omega)
        lo = t - k
        if live[t]:
            sims = work[lo:t] @ work[t]
            denom = norms[lo:t] * norms[t]
            ok = live[lo:t]
            s_max = np.max(np.where(ok, sims / np.where(ok, denom, 1.0), 0.0))
        else:
            s_max = 0.0
        if s_max >= tau:
            continue
        boundaries.append(t)
        group_start = t
    return np.asarray(boundaries, dtype=np.int64)
