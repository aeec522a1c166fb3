import numpy as np
import pytest

from alsp.baselines import interpolate
from alsp.core import HiddenSequence, mean_pool

from conftest import random_sequence


class TestInterpolate:
    def test_k100_identity(self, rng):
        seq = random_sequence(rng, 10, 4)
        out = interpolate(seq, 100.0)
        assert np.allclose(out.data, seq.data, atol=1e-7)

    def test_t3_m2_endpoints(self, rng):
        seq = random_sequence(rng, 3, 4)
        out = interpolate(seq, 70.0)  # floor(0.7 * 3) = 2
        assert out.rows == 2
        assert np.array_equal(out.data[0], seq.data[0])
        assert np.array_equal(out.data[1], seq.data[2])

    def test_t5_m3_integer_positions(self, rng):
        seq = random_sequence(rng, 5, 4)
        out = interpolate(seq, 60.0)  # floor(3)
        assert out.rows == 3
        for j, i in enumerate((0, 2, 4)):
            assert np.allclose(out.data[j], seq.data[i], atol=1e-7)

    def test_m1_is_global_mean(self, rng):
        seq = random_sequence(rng, 7, 3)
        out = interpolate(seq, 14.0)  # floor(0.98) -> 1
        assert out.rows == 1
        assert np.allclose(out.data[0], mean_pool(seq, 0, 7), atol=1e-6)

    def test_endpoints_preserved_whenever_m_ge_2(self, rng):
        for _ in range(20):
            rows = int(rng.integers(2, 50))
            seq = random_sequence(rng, rows, 3)
            k = float(rng.uniform(30.0, 100.0))
            out = interpolate(seq, k)
            if out.rows >= 2:
                assert np.allclose(out.data[0], seq.data[0], atol=1e-7)
                assert np.allclose(out.data[-1], seq.data[-1], atol=1e-7)

    def test_rows_are_convex_combinations_of_neighbors(self, rng):
        seq = random_sequence(rng, 9, 4)
        out = interpolate(seq, 55.0)  # m = 4
        positions = np.arange(out.rows) * (seq.rows - 1) / (out.rows - 1)
        for j, p in enumerate(positions):
            i = min(int(np.floor(p)), seq.rows - 2)
            f = p - i
            expected = (1 - f) * seq.data[i].astype(np.float64) + f * seq.data[
                i + 1
            ].astype(np.float64)
            assert np.allclose(out.data[j], expected, atol=1e-6)

    def test_exact_output_length(self, rng):
        for k in (60.0, 75.0, 90.0):
            for rows in (2, 7, 33, 100):
                seq = random_sequence(rng, rows, 2)
                assert interpolate(seq, k).rows == max(1, int(np.floor(k / 100 * rows)))

    def test_needs_two_rows(self, rng):
        with pytest.raises(ValueError):
            interpolate(random_sequence(rng, 1, 2), 50.0)
