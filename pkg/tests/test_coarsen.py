import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from sfgrass.coarsen import (
    AggregationMap,
    CoarsenParams,
    aggregate,
    build_hierarchy,
    coarse_graph,
    edge_affinities,
    mapping_operators,
)
from sfgrass.errors import EmbeddingMismatch, InputError, InvalidAggregation
from sfgrass.generators import grid2d, path
from sfgrass.graph import build_graph, connected_components
from sfgrass.metrics import dense_eigen
from sfgrass.smoothing import EmbeddingMatrix, EmbedParams, embed

from conftest import graphs


def test_mapping_operators_example():
    m = AggregationMap.from_clusters([[0, 1], [2]], 3)
    H, Hp = mapping_operators(m, 3)
    np.testing.assert_array_equal(H.toarray(), [[0.5, 0.5, 0], [0, 0, 1]])
    np.testing.assert_array_equal(Hp.toarray(), [[1, 0], [1, 0], [0, 1]])
    np.testing.assert_array_equal((H @ Hp).toarray(), np.eye(2))


def test_mapping_singletons_and_single_cluster():
    H, Hp = mapping_operators(AggregationMap(np.arange(4), 4))
    np.testing.assert_array_equal(H.toarray(), np.eye(4))
    np.testing.assert_array_equal(Hp.toarray(), np.eye(4))
    H, Hp = mapping_operators(AggregationMap(np.zeros(4, dtype=int), 1))
    np.testing.assert_array_equal(H.toarray(), [[0.25] * 4])
    np.testing.assert_array_equal(Hp.toarray(), [[1]] * 4)


def test_map_validation():
    with pytest.raises(InvalidAggregation):
        AggregationMap(np.array([0, 2]), 3)  # cluster 1 empty
    with pytest.raises(InvalidAggregation):
        AggregationMap.from_clusters([[0], [2]], 3)
    with pytest.raises(InvalidAggregation):
        mapping_operators(AggregationMap(np.zeros(3, dtype=int), 1), 4)


def test_from_labels_first_appearance():
    m = AggregationMap.from_labels([7, 3, 7, 9])
    np.testing.assert_array_equal(m.fine_to_coarse, [0, 1, 0, 2])


def test_coarse_k3(k3):
    m = AggregationMap.from_clusters([[0, 1], [2]], 3)
    c = coarse_graph(k3, m)
    assert c.edges() == [(0, 1, 2.0)]
    np.testing.assert_array_equal(c.dense_laplacian(), [[2, -2], [-2, 2]])


def test_coarse_c4(c4):
    c = coarse_graph(c4, AggregationMap.from_clusters([[0, 1], [2, 3]], 4))
    assert c.edges() == [(0, 1, 2.0)]


def test_coarse_singletons_identity(k3):
    assert coarse_graph(k3, AggregationMap(np.arange(3), 3)) == k3


@st.composite
def graph_and_partition(draw):
    g = draw(graphs(max_nodes=40))
    k = draw(st.integers(1, g.num_nodes))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    labels = np.concatenate([np.arange(k), rng.integers(0, k, g.num_nodes - k)])
    return g, AggregationMap.from_labels(rng.permutation(labels))


@settings(max_examples=60, deadline=None)
@given(graph_and_partition(), st.integers(0, 2**32 - 1))
def test_galerkin_properties(gm, seed):
    g, m = gm
    c = coarse_graph(g, m)
    _, Hp = mapping_operators(m)
    ref = (Hp.T @ g.laplacian @ Hp).toarray()
    np.testing.assert_allclose(c.dense_laplacian(), ref, rtol=1e-12, atol=1e-12)
    f2c = m.fine_to_coarse
    intra = g.w[f2c[g.u] == f2c[g.v]].sum()
    assert c.total_weight() == pytest.approx(g.total_weight() - intra, rel=1e-12, abs=1e-12)
    xc = np.random.default_rng(seed).normal(size=m.num_clusters)
    lift = Hp @ xc
    assert xc @ (c.laplacian @ xc) == pytest.approx(lift @ (g.laplacian @ lift), rel=1e-10, abs=1e-10)


def _barbell():
    e = [(i, j, 1) for i in range(4) for j in range(i + 1, 4)]
    e += [(i + 4, j + 4, 1) for i in range(4) for j in range(i + 1, 4)]
    return build_graph(e + [(3, 4, 1)], 8)


def test_affinity_scale_invariant(k3):
    X = embed(k3, EmbedParams(k=2)).data
    a = edge_affinities(k3, EmbeddingMatrix(X))
    np.testing.assert_allclose(edge_affinities(k3, EmbeddingMatrix(3.0 * X)), a)
    assert ((a >= 0) & (a <= 1 + 1e-12)).all()


def test_affinity_dimension_check(k3):
    with pytest.raises(EmbeddingMismatch):
        edge_affinities(k3, EmbeddingMatrix(np.zeros((4, 1))))


@pytest.mark.parametrize("source", ["fiedler", "smoothed"])
def test_barbell_splits_at_bridge(source):
    g = _barbell()
    if source == "fiedler":
        x = EmbeddingMatrix(dense_eigen(g).vectors[:, 1:2].copy())
    else:
        x = embed(g, EmbedParams(k=2))
    aff = edge_affinities(g, x)
    bridge = g.edge_index(3, 4)
    assert aff[bridge] == aff.min()
    m = aggregate(g, x, CoarsenParams(max_cluster_size=4))
    f2c = m.fine_to_coarse
    assert set(f2c[:4]).isdisjoint(f2c[4:])
    assert m.check_connected(g)


def test_path4_pairs():
    g = path(4)
    x = EmbeddingMatrix(dense_eigen(g).vectors[:, 1:2].copy())
    m = aggregate(g, x, CoarsenParams(max_cluster_size=2, target_ratio=0.5))
    np.testing.assert_array_equal(m.fine_to_coarse, [0, 0, 1, 1])


def test_params_validation():
    with pytest.raises(InputError):
        CoarsenParams(max_cluster_size=1)
    with pytest.raises(InputError):
        CoarsenParams(target_ratio=1.0)


@settings(max_examples=40, deadline=None)
@given(graphs(min_nodes=4, max_nodes=60), st.integers(2, 8))
def test_aggregate_invariants(g, cap):
    if g.num_edges == 0:
        return
    m = aggregate(g, embed(g, EmbedParams(k=3)), CoarsenParams(max_cluster_size=cap))
    assert m.cluster_sizes.max() <= cap
    assert m.check_connected(g)


def test_hierarchy_path8():
    h = build_hierarchy(path(8), CoarsenParams(coarsest_size=2))
    assert h.num_levels >= 2 and h.node_counts[-1] <= 2


def test_hierarchy_small_graph_single_level(k3):
    assert build_hierarchy(k3).num_levels == 1


def test_hierarchy_grid32_regression():
    h = build_hierarchy(grid2d(32))
    assert h.node_counts == [1024, 409, 163, 65, 26]
    for a, b in zip(h.node_counts, h.node_counts[1:]):
        assert b / a <= 0.4 + 0.1
    for g, m in zip(h.graphs, h.maps):
        assert m.check_connected(g)
    assert all(connected_components(g).num_components == 1 for g in h.graphs)


def test_hierarchy_preserves_components():
    g = build_graph([(i, i + 1, 1) for i in range(99)] + [(i, i + 1, 1) for i in range(100, 199)], 200)
    h = build_hierarchy(g, CoarsenParams(coarsest_size=4))
    assert all(connected_components(x).num_components == 2 for x in h.graphs)


def test_hierarchy_export(tmp_path):
    from sfgrass.matrix_io import read_edge_list, write_hierarchy

    h = build_hierarchy(grid2d(16), CoarsenParams(coarsest_size=32))
    names = write_hierarchy(h, tmp_path)
    assert len(names) == 2 * h.num_levels - 1
    assert read_edge_list(tmp_path / "level_1.tsv")[0] == h.graphs[1]
    lines = (tmp_path / "map_0.tsv").read_text().splitlines()
    assert lines[0] == "fine_node\tcluster" and len(lines) == 257
