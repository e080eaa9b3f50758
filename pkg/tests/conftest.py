import os
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from regulus.graph import BipartiteGraph, Graph  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def graphs(draw, min_n=1, max_n=10, max_m=None):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=max_m)) if pairs else []
    return Graph(n, chosen)


@st.composite
def bigraphs(draw, max_a=6, max_b=6, min_a=1, min_b=1):
    na = draw(st.integers(min_a, max_a))
    nb = draw(st.integers(min_b, max_b))
    pairs = [(a, na + b) for a in range(na) for b in range(nb)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True))
    return BipartiteGraph.from_parts(na, nb, chosen)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
