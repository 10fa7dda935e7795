import copy

import networkx as nx
import pytest

from qaoa_conc import config
from qaoa_conc.graphs import Graph


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run long statistical reproductions')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


# ---------------------------------------------------------------------------
# Graph fixtures
# ---------------------------------------------------------------------------

@pytest.fixture
def k4():
    return Graph.from_networkx(nx.complete_graph(4), degree=3)


@pytest.fixture
def petersen():
    return Graph.from_networkx(nx.petersen_graph(), degree=3)


@pytest.fixture
def prism():
    """Triangular prism: triangles 0-1-2 and 3-4-5, rungs i -- i+3."""
    return Graph.from_networkx(nx.circular_ladder_graph(3), degree=3)


@pytest.fixture
def heawood():
    """3-regular, 14 vertices, girth 6."""
    return Graph.from_networkx(nx.heawood_graph(), degree=3)


@pytest.fixture
def single_edge():
    return Graph(2, ((0, 1),))


def cycle(n):
    return Graph.from_networkx(nx.cycle_graph(n), degree=2)


@pytest.fixture
def cfg():
    return copy.deepcopy(config.DEFAULTS)
