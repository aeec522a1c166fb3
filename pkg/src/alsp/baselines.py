"""Signal-agnostic budget baselines: linear interpolation of the rows."""

from __future__ import annotations

import numpy as np

from .affinity import budget_group_count
from .core import HiddenSequence


def interpolate(seq: HiddenSequence, k_percent: float) -> HiddenSequence:
    """Uniformly resample the sequence down to max(1, floor(K/100 * T)) rows.

    Output row j sits at fractional input position j*(T-1)/(m-1), so the
    endpoints are preserved whenever m >= 2 and every output row is a
    convex combination of at most two adjacent input rows.  m=1 returns
    the global mean: a single token should summarize, not truncate.
    """
    if seq.rows < 2:
        raise ValueError("interpolation needs at least two rows")
    if not (0.0 < k_percent <= 100.0):
        raise ValueError("k_percent must lie in (0, 100]")
    m = budget_group_count(seq.rows, k_percent)
    work = seq.data.astype(np.float64)
    if m == 1:
        return seq.with_data(work.mean(axis=0, keepdims=True).astype(np.float32))
    positions = np.arange(m, dtype=np.float64) * (seq.rows - 1) / (m - 1)
    left = np.minimum(positions.astype(np.intp), seq.rows - 2)
    frac = positions - left
    out = work[left] * (1.0 - frac)[:, None] + work[left + 1] * frac[:, None]
    return seq.with_data(out.astype(np.float32))
