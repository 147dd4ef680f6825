import json

import numpy as np
from hypothesis import strategies as st

from causal_bounds.epr import PolarizerAngles

seeds = st.integers(min_value=0, max_value=2**31 - 1)
angles = st.floats(min_value=-180.0, max_value=180.0, allow_nan=False)
angle_sets = st.builds(PolarizerAngles, angles, angles, angles, angles)


def assert_close(actual, expected, tol=1e-12):
    actual = np.asarray(actual)
    expected = np.asarray(expected)
    assert actual.shape == expected.shape
    assert np.max(np.abs(actual - expected), initial=0.0) <= tol, (actual, expected)


def write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def exact_counts(dist, n_per_arm=1000):
    """Records whose empirical frequencies are exactly ``dist`` (up to rounding)."""
    records = []
    for (y, x, z), value in np.ndenumerate(dist.p):
        records += [(z, x, y)] * int(round(value * n_per_arm))
    return records
