import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lankysep.metric import euclidean, load_and_normalize

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def norm_points(pts):
    return load_and_normalize(euclidean(np.asarray(pts, dtype=float)))


@pytest.fixture
def line4():
    return norm_points([[0.0], [1.0], [2.0], [3.0]])


@pytest.fixture
def grid3():
    return norm_points(list(itertools.product(range(3), repeat=2)))


@st.composite
def point_sets(draw, min_n=2, max_n=24, dim=2):
    """Distinct points on a coarse lattice so that duplicates are easy to filter."""
    n = draw(st.integers(min_n, max_n))
    coords = draw(
        st.lists(
            st.tuples(*[st.integers(0, 40)] * dim),
            min_size=n,
            max_size=n,
            unique=True,
        )
    )
    return np.asarray(coords, dtype=float)
