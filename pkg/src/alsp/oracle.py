"""Word-aligned intervention operators: random drop, uniform drop, uniform merge.

Each compresses every aligned semantic unit down to a fixed budget of R
tokens; unaligned gap tokens (silence) pass through untouched.  Units at
or under budget are kept whole.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Alignment,
    GroupMap,
    HiddenSequence,
    SelectionRecord,
    apply_groupmap,
    apply_selection,
)
from .errors import AlignmentMismatch

RANDOM_DROP = "random_drop"
UNIFORM_DROP = "uniform_drop"
UNIFORM_MERGE = "uniform_merge"
OPERATORS = (RANDOM_DROP, UNIFORM_DROP, UNIFORM_MERGE)


@dataclass(frozen=True)
class InterventionSpec:
    operator: str
    budget_r: int
    layer: int = 0
    seed: int = 0  # consumed by random_drop only

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise ValueError(f"unknown operator {self.operator!r}")
        if self.budget_r < 1:
            raise ValueError("budget_r must be >= 1")


def _check(seq: HiddenSequence, align: Alignment):
    if align.covers != seq.rows:
        raise AlignmentMismatch(
            f"alignment covers {align.covers} tokens, sequence has {seq.rows}"
        )


def random_drop(seq: HiddenSequence, align: Alignment, budget_r: int, seed: int):
    """Keep R random tokens per unit (seeded, temporal order preserved)."""
    _check(seq, align)
    rng = np.random.default_rng(seed)
    kept = []
    cursor = 0
    for u in align.units:
        kept.extend(range(cursor, u.start))  # gap tokens pass through
        if u.size <= budget_r:
            kept.extend(range(u.start, u.end))
        else:
            picks = rng.choice(u.size, size=budget_r, replace=False)
            kept.extend(sorted(u.start + int(p) for p in picks))
        cursor = u.end
    kept.extend(range(cursor, align.covers))
    sel = SelectionRecord(tuple(kept), seq.rows)
    return apply_selection(seq, sel), sel


def uniform_drop(seq: HiddenSequence, align: Alignment, budget_r: int):
    """Keep R tokens per unit at regular strides: indices floor(j*n/R)."""
    _check(seq, align)
    kept = []
    cursor = 0
    for u in align.units:
        kept.extend(range(cursor, u.start))
        n = u.size
        if n <= budget_r:
            kept.extend(range(u.start, u.end))
        else:
            picks = sorted({(j * n) // budget_r for j in range(budget_r)})
            kept.extend(u.start + p for p in picks)
        cursor = u.end
    kept.extend(range(cursor, align.covers))
    sel = SelectionRecord(tuple(kept), seq.rows)
    return apply_selection(seq, sel), sel


def uniform_merge(seq: HiddenSequence, align: Alignment, budget_r: int):
    """Mean-pool each unit over min(R, n) contiguous bins.

    When n is not divisible by the bin count, the earliest bins take the
    extra token each, keeping bin sizes monotone.  Gap tokens become
    singleton groups.
    """
    _check(seq, align)
    boundaries = []
    cursor = 0
    for u in align.units:
        boundaries.extend(range(cursor, u.start))
        n = u.size
        bins = min(budget_r, n)
        base, extra = divmod(n, bins)
        start = u.start
        for b in range(bins):
            boundaries.append(start)
            start += base + (1 if b < extra else 0)
        cursor = u.end
    boundaries.extend(range(cursor, align.covers))
    gm = GroupMap(tuple(boundaries), seq.rows)
    return apply_groupmap(seq, gm), gm


def apply_intervention(seq: HiddenSequence, align: Alignment, spec: InterventionSpec):
    if spec.operator == RANDOM_DROP:
        return random_drop(seq, align, spec.budget_r, spec.seed)
    if spec.operator == UNIFORM_DROP:
        return uniform_drop(seq, align, spec.budget_r)
    return uniform_merge(seq, align, spec.budget_r)
