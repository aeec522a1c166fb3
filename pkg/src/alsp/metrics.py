"""Scoring and analysis metrics: WER / clamped WER, similarity dynamics,
retention accounting.

The clamped variant caps each sample's edit distance at its reference
length before pooling, which keeps degenerate repetition loops from
dominating a corpus average.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .core import Alignment, GroupMap, HiddenSequence, SelectionRecord
from .errors import (
    EmptyReferenceCorpus,
    LengthMismatch,
    NoQualifyingUnits,
    TooShort,
)

_ZERO_EPS = 1e-12

WORD = "word"
CHAR = "char"

_PUNCT_RE = re.compile(r"[^\w']+", re.UNICODE)


def tokenize(text: str, mode: str = WORD) -> list:
    """Word mode: lowercase, strip punctuation (apostrophes kept), split on
    whitespace.  Char mode: individual non-whitespace code points."""
    if mode == WORD:
        cleaned = _PUNCT_RE.sub(" ", text.lower())
        return cleaned.split()
    if mode == CHAR:
        return [ch for ch in text if not ch.isspace()]
    raise ValueError(f"unknown tokenize mode {mode!r}")


def levenshtein(a, b) -> int:
    """Edit distance over token lists, unit insert/delete/substitute cost.

    Two-row dynamic program with common prefix/suffix stripping; the test
    suite holds an independent full-matrix oracle.
    """
    a = list(a)
    b = list(b)
    while a and b and a[0] == b[0]:
        a.pop(0)
        b.pop(0)
    while a and b and a[-1] == b[-1]:
        a.pop()
        b.pop()
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        curr = [i] + [0] * len(b)
        for j, tok_b in enumerate(b, start=1):
            cost = 0 if tok_a == tok_b else 1
            curr[j] = min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost)
        prev = curr
    return prev[-1]


@dataclass(frozen=True)
class ScoredPair:
    """One reference/hypothesis pair with its edit distance."""

    reference: tuple
    hypothesis: tuple
    edit_distance: int
    reference_len: int

    @classmethod
    def from_tokens(cls, reference, hypothesis) -> "ScoredPair":
        ref = tuple(reference)
        hyp = tuple(hypothesis)
        return cls(ref, hyp, levenshtein(ref, hyp), len(ref))

    @classmethod
    def from_texts(cls, reference: str, hypothesis: str, mode: str = WORD) -> "ScoredPair":
        return cls.from_tokens(tokenize(reference, mode), tokenize(hypothesis, mode))


def corpus_wer(pairs, clamp: bool = False) -> float:
    """Corpus error rate: sum(E_i)/sum(N_i), or sum(min(E_i, N_i))/sum(N_i)
    with clamp on.  Accepts ScoredPair objects or raw (E, N) tuples."""
    total_e = 0
    total_n = 0
    for p in pairs:
        if isinstance(p, ScoredPair):
            e, n = p.edit_distance, p.reference_len
        else:
            e, n = p
        total_e += min(e, n) if clamp else e
        total_n += n
    if total_n <= 0:
        raise EmptyReferenceCorpus("reference corpus has no tokens")
    return total_e / total_n


# --- cosine dynamics --------------------------------------------------------

TEMPORAL = "temporal"
FEATURE = "feature"


def _cosine_matrix(data: np.ndarray) -> np.ndarray:
    """Pairwise cosines in float64; zero-norm rows compare as 0."""
    work = data.astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", work, work))
    live = norms >= _ZERO_EPS
    safe = np.where(live, norms, 1.0)
    unit = work / safe[:, None]
    unit[~live] = 0.0
    return unit @ unit.T


def neighbor_similarity(seq: HiddenSequence, k: int, mode: str = TEMPORAL) -> float:
    """Mean over tokens of the average cosine to their k nearest neighbors.

    Temporal mode takes neighbors ring by ring (distance 1, 2, ...) until
    at least k are collected; a ring is never split, so ties at equal
    distance include both sides.  Feature mode takes the k largest cosines
    to any other token.  k is capped at T-1.
    """
    T = seq.rows
    if T < 2:
        raise TooShort("need at least two tokens")
    if k < 1:
        raise ValueError("k must be >= 1")
    if mode not in (TEMPORAL, FEATURE):
        raise ValueError(f"unknown mode {mode!r}")
    sims = _cosine_matrix(seq.data)
    per_token = np.empty(T)
    for i in range(T):
        others = np.delete(sims[i], i)
        if mode == FEATURE:
            kk = min(k, T - 1)
            chosen = np.sort(others)[-kk:]
        else:
            dist = np.abs(np.delete(np.arange(T), i) - i)
            order = np.argsort(dist, kind="stable")
            count = 0
            take = 0
            while take < len(order) and count < k:
                ring = dist[order[take]]
                while take < len(order) and dist[order[take]] == ring:
                    take += 1
                    count += 1
            chosen = others[order[:take]]
        per_token[i] = chosen.mean()
    return float(per_token.mean())


def global_mean_similarity(seq: HiddenSequence) -> float:
    """Mean cosine over all unordered distinct token pairs."""
    T = seq.rows
    if T < 2:
        raise TooShort("need at least two tokens")
    sims = _cosine_matrix(seq.data)
    total = (sims.sum() - np.trace(sims)) / 2.0
    return float(total / (T * (T - 1) / 2.0))


def max_within_words(seq: HiddenSequence, align: Alignment) -> float:
    """Mean over units of the max adjacent cosine inside the unit.

    Units shorter than two tokens are skipped; with none qualifying this
    raises NoQualifyingUnits.
    """
    if align.covers != seq.rows:
        raise LengthMismatch(
            f"alignment covers {align.covers} tokens, sequence has {seq.rows}"
        )
    work = seq.data.astype(np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", work, work))
    maxima = []
    for u in align.units:
        if u.size < 2:
            continue
        best = -2.0
        for i in range(u.start, u.end - 1):
            if norms[i] < _ZERO_EPS or norms[i + 1] < _ZERO_EPS:
                s = 0.0
            else:
                s = float(work[i] @ work[i + 1] / (norms[i] * norms[i + 1]))
            best = max(best, s)
        maxima.append(best)
    if not maxima:
        raise NoQualifyingUnits("no unit has two or more tokens")
    return float(np.mean(maxima))


# --- retention accounting ---------------------------------------------------


@dataclass(frozen=True)
class RetentionReport:
    """Survivor accounting for one compression record.

    Gap-inclusive counts every original token; gap-exclusive restricts
    both numerator and denominator to word-aligned tokens.  For merge
    records a group is attributed to the unit containing its first token.
    """

    retention_ratio: float
    per_unit_lengths: tuple
    gap_inclusive_ratio: float
    gap_exclusive_ratio: float


def _survivor_starts(record) -> list:
    if isinstance(record, GroupMap):
        return list(record.boundaries)
    if isinstance(record, SelectionRecord):
        return list(record.kept)
    raise TypeError(f"unsupported record type {type(record).__name__}")


def retention_report(record, align: Alignment | None = None) -> RetentionReport:
    """Retention ratios plus per-unit survivor counts (needs an alignment)."""
    starts = _survivor_starts(record)
    total = record.original_len
    overall = record.retention_ratio
    if align is None:
        return RetentionReport(overall, (), overall, overall)
    if align.covers != total:
        raise LengthMismatch(
            f"alignment covers {align.covers} tokens, record covers {total}"
        )
    per_unit = []
    aligned_survivors = 0
    for u in align.units:
        n = sum(1 for s in starts if u.start <= s < u.end)
        per_unit.append(n)
        aligned_survivors += n
    aligned_total = align.aligned_token_count
    exclusive = aligned_survivors / aligned_total if aligned_total else 1.0
    return RetentionReport(overall, tuple(per_unit), overall, exclusive)
