"""Independent reference for the greedy similarity-pooling scan.

Written before the production kernels, as a direct transcription of the
published pseudocode, and kept deliberately naive: python lists of raw
token vectors, one cosine call per comparison.  The production path must
agree with this on group structure and pooled rows; nothing here may be
shared with or imported from the production implementation.
"""

import numpy as np

ZERO_EPS = 1e-12


def _cos(u, v):
    u = u.astype(np.float64)
    v = v.astype(np.float64)
    nu = np.sqrt(np.dot(u, u))
    nv = np.sqrt(np.dot(v, v))
    if nu < ZERO_EPS or nv < ZERO_EPS:
        return 0.0
    return np.dot(u, v) / (nu * nv)


def reference_pool(rows: np.ndarray, tau: float, omega: int):
    """Return (pooled rows as float32 array, list of group start indices)."""
    T = rows.shape[0]
    if T == 0:
        return np.empty((0, rows.shape[1]), dtype=np.float32), []

    merged = []            # pooled output rows
    starts = [0]           # start index of each emitted/open group
    group = [rows[0]]      # raw tokens of the current group

    for t in range(1, T):
        k = min(len(group), omega)
        window = group[-k:]
        s_max = max(_cos(rows[t], w) for w in window)
        if s_max >= tau:
            group.append(rows[t])
        else:
            pooled = np.mean([g.astype(np.float64) for g in group], axis=0)
            merged.append(pooled.astype(np.float32))
            group = [rows[t]]
            starts.append(t)

    pooled = np.mean([g.astype(np.float64) for g in group], axis=0)
    merged.append(pooled.astype(np.float32))
    return np.stack(merged), starts
