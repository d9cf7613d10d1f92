import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from imkit.graph import Graph

settings.register_profile(
    "imkit", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile("imkit")


@st.composite
def graphs(draw, max_n=8, max_m=12, p_max=1.0, min_n=1):
    """Small simple digraphs with arbitrary arc probabilities in [0, p_max]."""
    n = draw(st.integers(min_n, max_n))
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=max_m)) if pairs else []
    probs = draw(st.lists(st.floats(0.0, p_max), min_size=len(chosen), max_size=len(chosen)))
    src = [a for a, _ in chosen]
    dst = [b for _, b in chosen]
    return Graph.from_arcs(n, src, dst, probs)


@st.composite
def graph_and_seeds(draw, **kw):
    g = draw(graphs(**kw))
    seeds = draw(st.lists(st.integers(0, g.n - 1), unique=True, min_size=1, max_size=g.n))
    return g, seeds


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# filled by test_acceptance.report(); printed after the run so the lines survive capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
