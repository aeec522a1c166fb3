"""Embedding-sequence primitives: sequences, group maps, alignments, pooling.

Everything here is immutable after construction and safe to share across
threads.  Pooling sums are accumulated in float64 and stored back as float32;
cosines are computed in float64.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInterval, LengthMismatch, ZeroVectorWarning

ZERO_NORM_EPS = 1e-12

AUDIO = "audio"
TEXT = "text"


@dataclass(frozen=True)
class HiddenSequence:
    """A T x d float32 matrix of token embeddings for one layer.

    frame_rate is tokens per second of source signal (25.0 or 12.5 for the
    models this toolkit targets); role distinguishes audio from text spans.
    """

    data: np.ndarray
    frame_rate: float = 25.0
    role: str = AUDIO

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got ndim={arr.ndim}")
        if arr.shape[1] < 1:
            raise ValueError("feature dimension must be >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite entries in embedding matrix")
        if self.role not in (AUDIO, TEXT):
            raise ValueError(f"unknown role {self.role!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def with_data(self, data: np.ndarray) -> "HiddenSequence":
        """New sequence with the same metadata but different rows."""
        return HiddenSequence(data, frame_rate=self.frame_rate, role=self.role)


@dataclass(frozen=True)
class GroupMap:
    """An ordered partition of [0, T) into contiguous groups.

    Stores only the group start indices; contiguity is guaranteed by every
    operator in this toolkit, so arbitrary index sets are not representable
    on purpose.
    """

    boundaries: tuple
    original_len: int

    def __post_init__(self):
        bnd = tuple(int(b) for b in self.boundaries)
        object.__setattr__(self, "boundaries", bnd)
        if self.original_len < 0:
            raise ValueError("original_len must be >= 0")
        if self.original_len == 0:
            if bnd:
                raise ValueError("empty sequence admits no groups")
            return
        if not bnd or bnd[0] != 0:
            raise ValueError("first group must start at index 0")
        for a, b in zip(bnd, bnd[1:]):
            if b <= a:
                raise ValueError("boundaries must be strictly increasing")
        if bnd[-1] >= self.original_len:
            raise ValueError("boundary beyond sequence end")

    @property
    def group_count(self) -> int:
        return len(self.boundaries)

    def intervals(self):
        """Yield (start, end) for each group, in order."""
        ends = list(self.boundaries[1:]) + [self.original_len]
        for start, end in zip(self.boundaries, ends):
            yield start, end

    @property
    def retention_ratio(self) -> float:
        """group_count / original_len; 1.0 for the empty sequence."""
        if self.original_len == 0:
            return 1.0
        return self.group_count / self.original_len

    @classmethod
    def identity(cls, length: int) -> "GroupMap":
        return cls(tuple(range(length)), length)

    @classmethod
    def single_group(cls, length: int) -> "GroupMap":
        return cls((0,) if length else (), length)


@dataclass(frozen=True)
class SelectionRecord:
    """Which original token indices survived a drop-style operator.

    The GroupMap sibling for operators that keep tokens instead of
    merging them; kept indices are strictly increasing (temporal order).
    """

    kept: tuple
    original_len: int

    def __post_init__(self):
        kept = tuple(int(i) for i in self.kept)
        object.__setattr__(self, "kept", kept)
        for a, b in zip(kept, kept[1:]):
            if b <= a:
                raise ValueError("kept indices must be strictly increasing")
        if kept and (kept[0] < 0 or kept[-1] >= self.original_len):
            raise ValueError("kept index outside [0, original_len)")

    @property
    def group_count(self) -> int:
        return len(self.kept)

    @property
    def retention_ratio(self) -> float:
        if self.original_len == 0:
            return 1.0
        return len(self.kept) / self.original_len


def apply_selection(seq: HiddenSequence, sel: SelectionRecord) -> HiddenSequence:
    """Keep only the selected rows, preserving order and metadata."""
    if sel.original_len != seq.rows:
        raise LengthMismatch(
            f"selection covers {sel.original_len} rows, sequence has {seq.rows}"
        )
    return seq.with_data(seq.data[list(sel.kept)])


@dataclass(frozen=True)
class WordUnit:
    label: str
    start: int  # inclusive token index
    end: int    # exclusive token index

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError(f"empty unit {self.label!r}")

    @property
    def size(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Alignment:
    """Ordered word units mapped to token-index intervals.

    Gaps between units (unaligned tokens, e.g. silence) are permitted.
    """

    units: tuple
    covers: int

    def __post_init__(self):
        units = tuple(self.units)
        object.__setattr__(self, "units", units)
        prev_end = 0
        for u in units:
            if u.start < prev_end:
                raise ValueError(f"unit {u.label!r} overlaps or is out of order")
            if u.end > self.covers or u.start < 0:
                raise ValueError(f"unit {u.label!r} outside [0, {self.covers})")
            prev_end = u.end

    @property
    def aligned_token_count(self) -> int:
        return sum(u.size for u in self.units)

    def gap_intervals(self):
        """Yield (start, end) for maximal runs of unaligned tokens."""
        cursor = 0
        for u in self.units:
            if u.start > cursor:
                yield cursor, u.start
            cursor = u.end
        if cursor < self.covers:
            yield cursor, self.covers


def cosine(u, v) -> float:
    """Cosine similarity in [-1, 1], computed in float64.

    A (near-)zero vector yields similarity 0.0 and a ZeroVectorWarning:
    padded or silent frames must never look similar to anything.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise LengthMismatch(f"vector lengths differ: {u.shape[0]} vs {v.shape[0]}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu < ZERO_NORM_EPS or nv < ZERO_NORM_EPS:
        warnings.warn("cosine against a zero vector; returning 0.0", ZeroVectorWarning)
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def mean_pool(seq: HiddenSequence, start: int, end: int) -> np.ndarray:
    """Arithmetic mean of rows [start, end), float64 accumulation."""
    if start >= end:
        raise EmptyInterval(f"interval [{start}, {end}) is empty")
    if start < 0 or end > seq.rows:
        raise EmptyInterval(f"interval [{start}, {end}) outside [0, {seq.rows})")
    acc = seq.data[start:end].astype(np.float64).sum(axis=0)
    return (acc / (end - start)).astype(np.float32)


def apply_groupmap(seq: HiddenSequence, gm: GroupMap) -> HiddenSequence:
    """Mean-pool each group of gm; row order and all metadata preserved."""
    if gm.original_len != seq.rows:
        raise LengthMismatch(
            f"group map covers {gm.original_len} rows, sequence has {seq.rows}"
        )
    if gm.group_count == 0:
        return seq.with_data(np.empty((0, seq.dim), dtype=np.float32))
    starts = np.asarray(gm.boundaries, dtype=np.intp)
    counts = np.diff(np.append(starts, seq.rows)).astype(np.float64)
    sums = np.add.reduceat(seq.data.astype(np.float64), starts, axis=0)
    pooled = (sums / counts[:, None]).astype(np.float32)
    return seq.with_data(pooled)
