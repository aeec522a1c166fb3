import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alsp.core import Alignment, HiddenSequence, WordUnit, GroupMap, SelectionRecord
from alsp.errors import EmptyReferenceCorpus, NoQualifyingUnits, TooShort
from alsp.metrics import (
    FEATURE,
    ScoredPair,
    TEMPORAL,
    corpus_wer,
    global_mean_similarity,
    levenshtein,
    max_within_words,
    neighbor_similarity,
    retention_report,
    tokenize,
)

from conftest import chain_with_adjacent_cosines, random_sequence


def dp_levenshtein(a, b):
    """Textbook full-matrix dynamic program (independent oracle)."""
    m, n = len(a), len(b)
    D = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        D[i][0] = i
    for j in range(n + 1):
        D[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            D[i][j] = min(
                D[i - 1][j] + 1,
                D[i][j - 1] + 1,
                D[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return D[m][n]


class TestTokenize:
    def test_word_mode(self):
        assert tokenize("Hello, world") == ["hello", "world"]

    def test_apostrophe_kept(self):
        assert tokenize("it's") == ["it's"]

    def test_char_mode(self):
        assert tokenize("你好吗", mode="char") == ["你", "好", "吗"]

    def test_char_mode_skips_whitespace(self):
        assert tokenize("a b", mode="char") == ["a", "b"]


class TestLevenshtein:
    def test_identity_zero(self):
        assert levenshtein("kitten", "kitten") == 0

    def test_classic(self):
        assert levenshtein("kitten", "sitting") == 3

    @given(st.text("abc", max_size=25), st.text("abc", max_size=25))
    @settings(max_examples=150, deadline=None)
    def test_matches_dp_oracle(self, a, b):
        assert levenshtein(a, b) == dp_levenshtein(a, b)

    @given(
        st.text("ab", max_size=12),
        st.text("ab", max_size=12),
        st.text("ab", max_size=12),
    )
    @settings(max_examples=80, deadline=None)
    def test_triangle_inequality(self, x, y, z):
        assert levenshtein(x, z) <= levenshtein(x, y) + levenshtein(y, z)


class TestCorpusWer:
    def test_clamp_forced(self):
        pairs = [(150, 100)]
        assert corpus_wer(pairs) == pytest.approx(1.50)
        assert corpus_wer(pairs, clamp=True) == pytest.approx(1.00)

    def test_mixed_pairs(self):
        pairs = [(5, 10), (20, 10)]
        assert corpus_wer(pairs) == pytest.approx(1.25)
        assert corpus_wer(pairs, clamp=True) == pytest.approx(0.75)

    def test_perfect(self):
        pairs = [ScoredPair.from_texts("a b c", "a b c")]
        assert corpus_wer(pairs) == 0.0
        assert corpus_wer(pairs, clamp=True) == 0.0

    def test_empty_reference(self):
        with pytest.raises(EmptyReferenceCorpus):
            corpus_wer([(3, 0)])

    def test_scored_pair_from_texts(self):
        p = ScoredPair.from_texts("the cat sat", "the bat sat on")
        assert p.reference_len == 3
        assert p.edit_distance == 2

    @given(st.lists(st.tuples(st.integers(0, 50), st.integers(1, 30)), min_size=1, max_size=12))
    @settings(max_examples=100, deadline=None)
    def test_formula_and_bounds(self, en):
        wer = corpus_wer(en)
        cwer = corpus_wer(en, clamp=True)
        total_n = sum(n for _, n in en)
        assert wer == pytest.approx(sum(e for e, _ in en) / total_n)
        assert cwer == pytest.approx(sum(min(e, n) for e, n in en) / total_n)
        assert cwer <= min(wer, 1.0) + 1e-12


def brute_temporal_neighbor(data, k):
    """O(T^2) ring-based reimplementation (independent oracle)."""
    T = data.shape[0]
    work = data.astype(np.float64)
    norms = np.linalg.norm(work, axis=1)

    def cos(i, j):
        if norms[i] < 1e-12 or norms[j] < 1e-12:
            return 0.0
        return float(work[i] @ work[j] / (norms[i] * norms[j]))

    per_token = []
    for i in range(T):
        chosen = []
        dist = 1
        while len(chosen) < k and dist < T:
            ring = [j for j in (i - dist, i + dist) if 0 <= j < T]
            chosen.extend(ring)
            dist += 1
        per_token.append(np.mean([cos(i, j) for j in chosen]))
    return float(np.mean(per_token))


class TestNeighborSimilarity:
    def test_identical_rows(self):
        seq = HiddenSequence(np.ones((5, 3), dtype=np.float32))
        assert neighbor_similarity(seq, 1) == pytest.approx(1.0, abs=1e-9)
        assert neighbor_similarity(seq, 3, mode=FEATURE) == pytest.approx(1.0, abs=1e-9)

    def test_two_orthogonal(self):
        seq = HiddenSequence(np.eye(2, dtype=np.float32))
        assert neighbor_similarity(seq, 1) == pytest.approx(0.0, abs=1e-12)

    def test_temporal_matches_brute_force(self, rng):
        for _ in range(20):
            rows = int(rng.integers(2, 12))
            seq = random_sequence(rng, rows, 4)
            for k in (1, 3):
                got = neighbor_similarity(seq, k, mode=TEMPORAL)
                want = brute_temporal_neighbor(seq.data, k)
                assert got == pytest.approx(want, abs=1e-9), (rows, k)

    def test_feature_full_k_equals_global(self, rng):
        for _ in range(10):
            rows = int(rng.integers(2, 20))
            seq = random_sequence(rng, rows, 5)
            full = neighbor_similarity(seq, rows - 1, mode=FEATURE)
            assert full == pytest.approx(global_mean_similarity(seq), abs=1e-6)

    def test_modes_differ_on_nonstationary_trace(self, rng):
        # distant twin rows: temporal neighbors dissimilar, feature finds the twin
        base = rng.standard_normal(8).astype(np.float32)
        rows = rng.standard_normal((6, 8)).astype(np.float32)
        rows[0] = base
        rows[5] = base
        seq = HiddenSequence(rows)
        t = neighbor_similarity(seq, 1, mode=TEMPORAL)
        f = neighbor_similarity(seq, 1, mode=FEATURE)
        assert f > t

    def test_too_short(self, rng):
        with pytest.raises(TooShort):
            neighbor_similarity(random_sequence(rng, 1, 3), 1)


class TestGlobalMeanSimilarity:
    def test_identical(self):
        seq = HiddenSequence(np.full((4, 3), 2.0, dtype=np.float32))
        assert global_mean_similarity(seq) == pytest.approx(1.0, abs=1e-9)

    def test_antipodal(self):
        u = np.array([1.0, 2.0], dtype=np.float32)
        seq = HiddenSequence(np.stack([u, -u]))
        assert global_mean_similarity(seq) == pytest.approx(-1.0, abs=1e-6)

    def test_matches_pair_loop(self, rng):
        seq = random_sequence(rng, 10, 4)
        work = seq.data.astype(np.float64)
        norms = np.linalg.norm(work, axis=1)
        sims = [
            float(work[i] @ work[j] / (norms[i] * norms[j]))
            for i in range(10)
            for j in range(i + 1, 10)
        ]
        assert global_mean_similarity(seq) == pytest.approx(np.mean(sims), abs=1e-9)


class TestMaxWithinWords:
    def test_identical_tokens(self):
        seq = HiddenSequence(np.ones((6, 3), dtype=np.float32))
        align = Alignment((WordUnit("a", 0, 3), WordUnit("b", 3, 6)), 6)
        assert max_within_words(seq, align) == pytest.approx(1.0, abs=1e-9)

    def test_single_unit_max(self):
        seq = chain_with_adjacent_cosines([0.2, 0.9, 0.5])
        align = Alignment((WordUnit("w", 0, 4),), 4)
        assert max_within_words(seq, align) == pytest.approx(0.9, abs=1e-6)

    def test_mean_of_unit_maxima(self):
        seq = chain_with_adjacent_cosines([0.8, 0.0, 0.4])
        align = Alignment((WordUnit("a", 0, 2), WordUnit("b", 2, 4)), 4)
        assert max_within_words(seq, align) == pytest.approx(0.6, abs=1e-6)

    def test_short_units_skipped(self, rng):
        seq = random_sequence(rng, 4, 3)
        align = Alignment((WordUnit("a", 0, 1), WordUnit("b", 1, 2)), 4)
        with pytest.raises(NoQualifyingUnits):
            max_within_words(seq, align)


class TestScaleInvariance:
    def test_all_metrics_invariant_under_positive_row_scaling(self, rng):
        seq = random_sequence(rng, 12, 6)
        scales = rng.uniform(0.2, 5.0, size=12).astype(np.float32)
        scaled = HiddenSequence(seq.data * scales[:, None])
        align = Alignment((WordUnit("a", 0, 6), WordUnit("b", 6, 12)), 12)
        assert neighbor_similarity(scaled, 3) == pytest.approx(
            neighbor_similarity(seq, 3), abs=1e-6
        )
        assert global_mean_similarity(scaled) == pytest.approx(
            global_mean_similarity(seq), abs=1e-6
        )
        assert max_within_words(scaled, align) == pytest.approx(
            max_within_words(seq, align), abs=1e-6
        )


class TestRetentionReport:
    def test_identity(self):
        gm = GroupMap.identity(10)
        rep = retention_report(gm)
        assert rep.retention_ratio == 1.0

    def test_simple_ratio(self):
        sel = SelectionRecord(tuple(range(15)), 100)
        rep = retention_report(sel)
        assert rep.retention_ratio == pytest.approx(0.15)

    def test_gap_split(self):
        # 2 gap tokens + unit of 4; keep both gaps and 1 of the unit
        align = Alignment((WordUnit("w", 2, 6),), 6)
        sel = SelectionRecord((0, 1, 2), 6)
        rep = retention_report(sel, align)
        assert rep.per_unit_lengths == (1,)
        assert rep.gap_inclusive_ratio == pytest.approx(3 / 6)
        assert rep.gap_exclusive_ratio == pytest.approx(1 / 4)

    def test_groupmap_units(self):
        align = Alignment((WordUnit("a", 0, 4), WordUnit("b", 4, 8)), 8)
        gm = GroupMap((0, 4, 6), 8)
        rep = retention_report(gm, align)
        assert rep.per_unit_lengths == (1, 2)
