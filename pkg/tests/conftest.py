import numpy as np
import pytest

from alsp.core import HiddenSequence


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sequence(rng, rows, dim, frame_rate=25.0):
    return HiddenSequence(
        rng.standard_normal((rows, dim)).astype(np.float32), frame_rate=frame_rate
    )


def chain_with_adjacent_cosines(cosines):
    """2-D unit rows whose consecutive cosines equal `cosines` exactly.

    Row i sits at the cumulative angle sum of arccos of the requested
    values, so cos(row[i], row[i+1]) == cosines[i] up to float rounding.
    """
    angles = np.concatenate([[0.0], np.cumsum(np.arccos(cosines))])
    rows = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return HiddenSequence(rows.astype(np.float32))
