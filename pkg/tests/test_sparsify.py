import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sfgrass.coarsen import AggregationMap, CoarsenParams, coarse_graph
from sfgrass.errors import EmbeddingMismatch, InconsistentMap, InputError, NotSubgraph
from sfgrass.generators import grid2d, path, random_connected
from sfgrass.graph import build_graph, connected_components
from sfgrass.metrics import dense_eigen, relative_condition_number
from sfgrass.smoothing import EmbeddingMatrix, EmbedParams
from sfgrass.sparsify import (
    Sparsifier,
    SparsifyParams,
    add_top_edges,
    backward_map,
    edge_distortion_scores,
    max_spanning_forest,
    sf_grass,
)

from conftest import graphs


def _kept(g, mask):
    return [e[:2] for e, k in zip(g.edges(), mask) if k]


def test_mst_triangle():
    g = build_graph([(0, 1, 3), (1, 2, 2), (0, 2, 1)], 3)
    assert _kept(g, max_spanning_forest(g)) == [(0, 1), (1, 2)]


def test_mst_tie_break(k3):
    assert _kept(k3, max_spanning_forest(k3)) == [(0, 1), (0, 2)]


def test_mst_tree_identity():
    assert max_spanning_forest(path(7)).all()


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_mst_matches_networkx_weight(g):
    mask = max_spanning_forest(g)
    h = nx.Graph()
    h.add_nodes_from(range(g.num_nodes))
    h.add_weighted_edges_from(g.edges())
    ref = nx.maximum_spanning_tree(h).size(weight="weight")
    assert mask.sum() == g.num_nodes - connected_components(g).num_components
    assert g.w[mask].sum() == pytest.approx(ref, rel=1e-12)


def test_backward_map_c4(c4):
    m = AggregationMap.from_clusters([[0, 1], [2, 3]], 4)
    gc = coarse_graph(c4, m)
    p = backward_map(Sparsifier.spanning_forest(gc), c4, m)
    assert _kept(c4, p.edge_mask) == [(0, 1), (0, 3), (2, 3)]
    assert p.num_off_tree == 0
    p.check()


def test_backward_map_singletons():
    g = random_connected(20, 30, np.random.default_rng(1))
    m = AggregationMap(np.arange(20), 20)
    gc = coarse_graph(g, m)
    p = backward_map(Sparsifier.spanning_forest(gc), g, m)
    np.testing.assert_array_equal(p.edge_mask, max_spanning_forest(g))


def test_backward_map_one_cluster():
    g = random_connected(15, 20, np.random.default_rng(2))
    m = AggregationMap(np.zeros(15, dtype=int), 1)
    p = backward_map(Sparsifier.spanning_forest(coarse_graph(g, m)), g, m)
    np.testing.assert_array_equal(p.edge_mask, max_spanning_forest(g))


def test_backward_map_off_tree_edges_stay_off_tree():
    g = grid2d(6)
    i, j = np.divmod(np.arange(36), 6)
    m = AggregationMap.from_labels((i // 2) * 3 + j // 2)  # 2x2 blocks
    gc = coarse_graph(g, m)
    p = backward_map(Sparsifier.full(gc), g, m)
    p.check()
    assert p.num_off_tree == gc.num_edges - (gc.num_nodes - 1)


def test_backward_map_inconsistent(c4):
    m = AggregationMap.from_clusters([[0, 1], [2, 3]], 4)
    with pytest.raises(InconsistentMap):
        backward_map(Sparsifier.spanning_forest(path(3)), c4, m)


def test_score_k3_fiedler(k3, p3):
    p = Sparsifier.from_subgraph(k3, p3)
    fiedler = np.array([[1.0], [0.0], [-1.0]]) / np.sqrt(2)
    s = edge_distortion_scores(k3, p, EmbeddingMatrix(fiedler))
    assert list(s.index) == [k3.edge_index(0, 2)]
    assert s.score[0] == pytest.approx(2.0, rel=1e-14)
    s2 = edge_distortion_scores(k3, p, EmbeddingMatrix(3.0 * fiedler))
    assert s2.score[0] == pytest.approx(18.0, rel=1e-14)


def test_score_zero_distance(k3, p3):
    p = Sparsifier.from_subgraph(k3, p3)
    x = EmbeddingMatrix(np.array([[1.0], [0.0], [1.0]]))
    assert edge_distortion_scores(k3, p, x).score[0] == 0.0


def test_score_embedding_mismatch(k3):
    with pytest.raises(EmbeddingMismatch):
        edge_distortion_scores(k3, Sparsifier.spanning_forest(k3), EmbeddingMatrix(np.zeros((2, 1))))


def test_scores_sorted_with_pair_tiebreak():
    g = grid2d(5)
    p = Sparsifier.spanning_forest(g)
    x = EmbeddingMatrix(np.zeros((25, 2)))
    s = edge_distortion_scores(g, p, x)
    pairs = list(zip(g.u[s.index], g.v[s.index]))
    assert pairs == sorted(pairs)


def test_add_top_edges_k3(k3, p3):
    p = Sparsifier.from_subgraph(k3, p3)
    assert relative_condition_number(k3, p).kappa == pytest.approx(3.0)
    x = EmbeddingMatrix(np.array([[1.0], [0.0], [-1.0]]))
    q = add_top_edges(p, edge_distortion_scores(k3, p, x), 1)
    assert q.num_edges == 3 and q.num_off_tree == 1
    assert relative_condition_number(k3, q).kappa == pytest.approx(1.0)
    assert add_top_edges(p, edge_distortion_scores(k3, p, x), 0) == p
    assert add_top_edges(p, edge_distortion_scores(k3, p, x), 10).graph == k3


def test_from_subgraph_rejects_foreign_edges(k3):
    with pytest.raises(NotSubgraph):
        Sparsifier.from_subgraph(path(3), k3)
    with pytest.raises(NotSubgraph):
        Sparsifier.from_subgraph(k3, build_graph([(0, 1, 2.0)], 3))


def test_sf_grass_tree_input():
    g = random_connected(300, 0, np.random.default_rng(3))
    res = sf_grass(g)
    assert res.sparsifier.graph == g


def test_sf_grass_full_budget():
    g = grid2d(12)
    res = sf_grass(g, SparsifyParams(budget_fraction=10.0))
    assert res.sparsifier.graph == g
    assert relative_condition_number(g, res.sparsifier).kappa == pytest.approx(1.0)


def test_sf_grass_zero_budget_is_tree():
    g = grid2d(20)
    p = sf_grass(g, SparsifyParams(budget_fraction=0.0)).sparsifier
    assert p.num_off_tree == 0 and p.num_edges == g.num_nodes - 1


def test_sf_grass_grid64_improvement():
    g = grid2d(64)
    tree = sf_grass(g, SparsifyParams(budget_fraction=0.0)).sparsifier
    p = sf_grass(g, SparsifyParams(budget_fraction=0.1)).sparsifier
    k_tree = relative_condition_number(g, tree).kappa
    k_p = relative_condition_number(g, p).kappa
    assert k_p <= k_tree / 5


def test_sf_grass_stats():
    g = grid2d(30)
    res = sf_grass(g, SparsifyParams(budget_fraction=0.05))
    st_ = res.stats
    assert st_["n"] == 900 and st_["num_levels"] == res.hierarchy.num_levels
    lv = st_["levels"]
    assert [s["level"] for s in lv] == list(range(len(lv)))
    assert lv[0]["edges_added"] == 45
    assert st_["off_tree_edges"] == res.sparsifier.num_off_tree
    for s in lv:
        assert 0.0 <= s["sampling_ratio"] <= 1.0


def test_params_validation():
    with pytest.raises(InputError):
        SparsifyParams(budget_fraction=-0.1)
    with pytest.raises(InputError):
        SparsifyParams(score_embedding="eigen")
    with pytest.raises(InputError):
        SparsifyParams(rounds=0)


_small = SparsifyParams(
    budget_fraction=0.1,
    embed=EmbedParams(k=4),
    coarsen=CoarsenParams(coarsest_size=8, embed=EmbedParams(k=4)),
)


@settings(max_examples=30, deadline=None)
@given(graphs(min_nodes=2, max_nodes=80))
def test_sf_grass_invariants(g):
    res = sf_grass(g, _small)
    p = res.sparsifier
    p.check()
    idx = g.edge_index(p.graph.u, p.graph.v)
    assert (idx >= 0).all()
    np.testing.assert_array_equal(g.w[idx], p.graph.w)
    np.testing.assert_array_equal(connected_components(p.graph).label,
                                  connected_components(g).label)


@settings(max_examples=25, deadline=None)
@given(graphs(min_nodes=3, max_nodes=60, connected=True), st.integers(0, 2**32 - 1))
def test_rayleigh_ratio_within_pencil(g, seed):
    p = sf_grass(g, _small).sparsifier
    pencil = relative_condition_number(g, p, "dense")
    X = np.random.default_rng(seed).normal(size=(100, g.num_nodes))
    X -= X.mean(axis=1, keepdims=True)
    LG, LP = g.laplacian, p.graph.laplacian
    for x in X:
        r = (x @ (LG @ x)) / (x @ (LP @ x))
        assert pencil.lambda_min - 1e-8 <= r <= pencil.lambda_max + 1e-8


@pytest.mark.parametrize("mode", ["sparsifier", "graph"])
def test_kappa_monotone_in_budget(mode):
    g = grid2d(30)
    ks = []
    for b in (0.0, 0.02, 0.05, 0.1, 0.2, 0.3):
        p = sf_grass(g, SparsifyParams(budget_fraction=b, score_embedding=mode)).sparsifier
        ks.append(relative_condition_number(g, p, "dense").kappa)
    assert all(b <= a * (1 + 1e-9) for a, b in zip(ks, ks[1:]))


def test_graph_mode_nests():
    g = grid2d(25)
    prev = None
    for b in (0.0, 0.05, 0.1, 0.3):
        p = sf_grass(g, SparsifyParams(budget_fraction=b, score_embedding="graph")).sparsifier
        if prev is not None:
            assert not (prev & ~p.edge_mask).any()
        prev = p.edge_mask


def test_sf_grass_deterministic():
    g = random_connected(2000, 3000, np.random.default_rng(7))
    a = sf_grass(g, SparsifyParams(embed=EmbedParams(seed=5)))
    b = sf_grass(g, SparsifyParams(embed=EmbedParams(seed=5)))
    assert a.sparsifier == b.sparsifier
    assert a.levels == b.levels
