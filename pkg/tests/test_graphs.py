import itertools

import numpy as np
import pytest

from qaoa_conc import graphs
from qaoa_conc.errors import (
    GenerationError,
    ParameterError,
    ResourceCapError,
    UndefinedRatioError,
)
from qaoa_conc.graphs import EdgeP1Type, Graph
from qaoa_conc.streams import rng_stream

from conftest import cycle


def _is_simple_regular(g, d):
    pairs = [tuple(e) for e in g.edges]
    return (
        len(set(pairs)) == len(pairs)
        and all(u < v for u, v in pairs)
        and g.is_regular(d)
        and g.m == g.n * d // 2
    )


# ---- construction ----------------------------------------------------------

def test_graph_rejects_bad_edges():
    with pytest.raises(ParameterError):
        Graph(3, ((1, 0),))
    with pytest.raises(ParameterError):
        Graph(3, ((0, 3),))
    with pytest.raises(ParameterError):
        Graph(3, ((0, 1), (0, 1)))


def test_degree_tag_is_checked():
    with pytest.raises(ParameterError):
        Graph(3, ((0, 1), (1, 2)), degree=2)


def test_from_pairs_is_canonical():
    g = Graph.from_pairs(3, [(2, 1), (1, 0)])
    assert g.edges == ((0, 1), (1, 2))


# ---- generators ------------------------------------------------------------

def test_gen_regular_n4_is_k4():
    g = graphs.gen_regular(4, 3, rng_stream(11, 'test'))
    assert set(g.edges) == set(itertools.combinations(range(4), 2))


def test_gen_regular_parity_error():
    with pytest.raises(ParameterError):
        graphs.gen_regular(5, 3, rng_stream(0, 'test'))


def test_gen_regular_n20_is_simple_cubic():
    g = graphs.gen_regular(20, 3, rng_stream(7, 'test'))
    assert g.n == 20
    assert g.degree == 3
    assert _is_simple_regular(g, 3)


def test_gen_regular_is_deterministic():
    a = graphs.gen_regular(30, 3, rng_stream(5, 'graph'))
    b = graphs.gen_regular(30, 3, rng_stream(5, 'graph'))
    assert a.edges == b.edges


def test_erdos_renyi_extremes():
    assert graphs.gen_erdos_renyi(10, 0.0, rng_stream(1, 'er')).m == 0
    assert graphs.gen_erdos_renyi(10, 1.0, rng_stream(1, 'er')).m == 45


def test_erdos_renyi_mean_edge_count():
    n = 300
    p_edge = graphs.sparse_edge_probability(n)
    assert p_edge == pytest.approx(3 / 299)
    counts = [graphs.gen_erdos_renyi(n, p_edge, rng_stream(3, 'er', k)).m for k in range(200)]
    pairs = n * (n - 1) // 2
    sigma_of_mean = np.sqrt(pairs * p_edge * (1 - p_edge) / len(counts))
    assert abs(np.mean(counts) - 450) < 4 * sigma_of_mean


def test_erdos_renyi_bad_probability():
    with pytest.raises(ParameterError):
        graphs.gen_erdos_renyi(10, 1.5, rng_stream(0, 'er'))


def test_gen_regular_with_maxcut_hits_target():
    g = graphs.gen_regular_with_maxcut(4, 3, 4, rng_stream(0, 'mc'), max_tries=1)
    assert graphs.brute_force_maxcut(g)[0] == 4


def test_gen_regular_with_maxcut_reports_histogram():
    with pytest.raises(GenerationError) as info:
        graphs.gen_regular_with_maxcut(4, 3, 6, rng_stream(0, 'mc'), max_tries=5)
    assert info.value.histogram == {4: 5}


def test_gen_regular_with_maxcut_n20():
    g = graphs.gen_regular_with_maxcut(20, 3, 26, rng_stream(2, 'mc'), max_tries=2000)
    assert graphs.brute_force_maxcut(g)[0] == 26


def test_permute_edge_labels(petersen):
    shuffled = graphs.permute_edge_labels(petersen, rng_stream(4, 'perm'))
    assert sorted(shuffled.edges) == sorted(petersen.edges)
    assert shuffled.degree == 3
    empty = Graph(3, ())
    assert graphs.permute_edge_labels(empty, rng_stream(4, 'perm')) is empty


# ---- structure -------------------------------------------------------------

def test_largest_component():
    g = Graph(6, ((0, 1), (0, 2), (1, 2), (3, 4)))
    sub = graphs.largest_component(g)
    assert sub.n == 3
    assert sub.m == 3


def test_largest_component_tie_goes_to_lowest_vertex():
    g = Graph(5, ((2, 3), (0, 4)))
    sub, mapping = graphs._induced(g, {0, 4})
    assert graphs.largest_component(g).edges == sub.edges
    assert mapping == (0, 4)


def test_neighborhood_radius_zero(petersen):
    sub, mapping = graphs.neighborhood(petersen, 3, 0)
    assert sub.n == 2
    assert sub.edges == ((0, 1),)
    assert mapping == petersen.edges[3]


def test_neighborhood_tree_sizes(petersen, heawood):
    # girth 5: the radius-1 ball around any edge is a tree
    sub, _ = graphs.neighborhood(petersen, 0, 1)
    assert sub.n == graphs.qaoa_tree_size(1) == 6
    assert sub.m == 5
    # girth 6: the radius-2 ball has all 14 tree vertices
    sub, _ = graphs.neighborhood(heawood, 0, 2)
    assert sub.n == graphs.qaoa_tree_size(2) == 14


def test_neighborhood_bad_edge(k4):
    with pytest.raises(ParameterError):
        graphs.neighborhood(k4, 6, 1)


def test_qaoa_tree_sizes():
    assert [graphs.qaoa_tree_size(p) for p in range(1, 8)] == [6, 14, 30, 62, 126, 254, 510]
    with pytest.raises(ParameterError):
        graphs.qaoa_tree_size(0)


# ---- edge types --------------------------------------------------------------

def test_classify_k4(k4):
    assert all(graphs.classify_edge_p1(k4, i) is EdgeP1Type.SHARED_TWO for i in range(k4.m))


def test_classify_prism(prism):
    triangle = prism.edges.index((0, 1))
    rung = prism.edges.index((0, 3))
    assert graphs.classify_edge_p1(prism, triangle) is EdgeP1Type.SHARED_ONE
    assert graphs.classify_edge_p1(prism, rung) is EdgeP1Type.SHARED_ZERO


def test_census(k4, prism):
    assert graphs.census_p1(k4).to_dict()['w_shared2'] == 6
    census = graphs.census_p1(prism)
    assert (census.w_shared2, census.w_shared1, census.w_shared0) == (0, 6, 3)
    assert census.f_shared1 == pytest.approx(2 / 3)
    assert census.f_shared0 == pytest.approx(1 / 3)


def test_census_errors():
    with pytest.raises(ParameterError):
        graphs.census_p1(cycle(4))
    with pytest.raises(UndefinedRatioError):
        graphs.census_p1(Graph(0, ()))


def test_census_large_graphs_are_tree_like():
    g = graphs.gen_regular(1000, 3, rng_stream(8, 'census'))
    assert graphs.census_p1(g).f_shared0 >= 0.97


# ---- MaxCut --------------------------------------------------------------------

@pytest.mark.parametrize('n', [4, 5, 6, 7])
def test_maxcut_of_cycles(n):
    assert graphs.brute_force_maxcut(cycle(n))[0] == 2 * (n // 2)


def test_maxcut_known_graphs(k4, petersen):
    assert graphs.brute_force_maxcut(k4)[0] == 4
    cmax, witness = graphs.brute_force_maxcut(petersen)
    assert cmax == 12
    assert witness[0] == '0'
    assert graphs.cut_value(petersen, witness) == 12


def test_maxcut_ignores_edge_labels(heawood):
    expected = graphs.brute_force_maxcut(heawood)
    for k in range(3):
        shuffled = graphs.permute_edge_labels(heawood, rng_stream(8, 'perm', k))
        assert graphs.brute_force_maxcut(shuffled) == expected


def test_maxcut_empty_graph():
    assert graphs.brute_force_maxcut(Graph(3, ())) == (0, '000')


def test_maxcut_cap():
    with pytest.raises(ResourceCapError):
        graphs.brute_force_maxcut(Graph(12, ()), cap=10)


def test_bit_string_convention(k4):
    # character j is vertex j: vertices 0 and 1 on side 1
    assert graphs.format_bits(0b0011, 4) == '1100'
    assert graphs.parse_bits('1100') == 3
    assert graphs.cut_value(k4, '1100') == 4
    assert graphs.cut_value(k4, '1000') == 3


# ---- edge-list files -------------------------------------------------------------

def test_edge_list_file(tmp_path, prism):
    path = graphs.write_edge_list(prism, tmp_path / 'prism.txt')
    assert path.read_text().splitlines()[0] == '6 9'
    assert graphs.read_edge_list(path, degree=3) == prism


def test_edge_list_rejects_bad_text():
    with pytest.raises(ParameterError):
        graphs.from_edge_list_text('3 2\n0 1\n')
    with pytest.raises(ParameterError):
        graphs.from_edge_list_text('3 1\n1 0\n')
    with pytest.raises(ParameterError):
        graphs.from_edge_list_text('3 1\n0 x\n')
