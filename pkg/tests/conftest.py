"""Shared shapes and strategies for the test suite"""

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from core.fincat import walking_arrow
from data.corpus import squares
from data.shapes import chain, divisor_lattice, random_poset

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

poset_seeds = st.integers(min_value=0, max_value=2 ** 16)
poset_sizes = st.integers(min_value=1, max_value=4)
densities = st.sampled_from([0.0, 0.3, 0.6, 1.0])


@st.composite
def random_posets(draw):
    return random_poset(draw(poset_seeds), draw(poset_sizes), draw(densities))


@pytest.fixture
def arrow():
    return walking_arrow()


@pytest.fixture
def chain3():
    return chain(3)


@pytest.fixture
def div12():
    return divisor_lattice(12)


@pytest.fixture
def squares3():
    return squares(chain(3))
