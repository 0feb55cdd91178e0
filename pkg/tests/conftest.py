import sys
import numpy as np
import pytest

from hcpspace.graph import Graph

# 1-based edges {1,3},{1,4},{1,5},{2,3},{3,4} of the encoding example, shifted to 0-based
ENCODING_EXAMPLE_EDGES = [(0, 2), (0, 3), (0, 4), (1, 2), (2, 3)]
# triangle 1-2-3 with the tail 3-4-5, 0-based
COMPLETION_EXAMPLE_EDGES = [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)]


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def random_graph(rng: np.random.Generator, n: int, p: float | None = None) -> Graph:
    p = rng.uniform(0, 1) if p is None else p
    return Graph(n, rng.random(n * (n - 1) // 2) < p)


@pytest.fixture
def completion_example() -> Graph:
    return Graph.from_edges(5, COMPLETION_EXAMPLE_EDGES)


@pytest.fixture
def encoding_example() -> Graph:
    return Graph.from_edges(5, ENCODING_EXAMPLE_EDGES)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
