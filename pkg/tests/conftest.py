import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from hx.core import Hypergraph, to_mask  # noqa: E402


@st.composite
def hypergraphs(draw, n_max=7, r_choices=(2, 3), m_max=8):
    r = draw(st.sampled_from(r_choices))
    n = draw(st.integers(r, max(r, n_max)))
    sets = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=r, max_size=r), max_size=m_max))
    return Hypergraph.from_masks({to_mask(s) for s in sets}, n, r)


@pytest.fixture
def k3():
    return Hypergraph.from_masks([0b011, 0b101, 0b110], 3, 2)
