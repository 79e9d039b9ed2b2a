import numpy as np
import pytest
from hypothesis import strategies as st

from mocodes.distributions import validate_and_sort

WORKED_P = (8 / 15, 4 / 15, 2 / 15, 1 / 15)


@pytest.fixture
def worked_model():
    return validate_and_sort(WORKED_P)


def random_model(rng, n, ties=False):
    p = rng.dirichlet(np.ones(n))
    if ties and n > 2:
        # force a few exactly equal probabilities
        i = rng.integers(0, n - 1)
        p[i + 1] = p[i]
        p = p / p.sum()
    return validate_and_sort(p)


@st.composite
def models(draw, min_size=2, max_size=12):
    n = draw(st.integers(min_size, max_size))
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    total = sum(raw)
    return validate_and_sort([x / total for x in raw])
