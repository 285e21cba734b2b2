import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sfgrass.errors import InputError, IsolatedNode
from sfgrass.generators import complete, grid2d, path
from sfgrass.graph import build_graph, quadratic_form
from sfgrass.smoothing import EmbedParams, embed, gauss_seidel_sweep, random_test_vectors

from conftest import graphs


def test_random_vectors_deflated_and_unit():
    X = random_test_vectors(4, 2, seed=3).data
    np.testing.assert_allclose(X.sum(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(X, axis=0), 1.0, rtol=1e-14)


def test_random_vectors_deterministic():
    a = random_test_vectors(50, 3, seed=11).data
    b = random_test_vectors(50, 3, seed=11).data
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, random_test_vectors(50, 3, seed=12).data)


def test_random_vectors_columns_stable_in_k():
    a = random_test_vectors(20, 2, seed=5).data
    b = random_test_vectors(20, 5, seed=5).data
    np.testing.assert_array_equal(a, b[:, :2])


def test_random_vectors_single_node():
    with pytest.raises(InputError):
        random_test_vectors(1, 1)


def test_sweep_p3(p3):
    x = np.array([1.0, 0.0, -1.0])
    y = gauss_seidel_sweep(p3, x, "forward")
    np.testing.assert_allclose(y, [0.0, -0.5, -0.5])
    assert quadratic_form(p3, x) == 2.0
    assert quadratic_form(p3, y) == 0.25
    np.testing.assert_array_equal(x, [1.0, 0.0, -1.0])  # input untouched


def test_sweep_backward_p3(p3):
    y = gauss_seidel_sweep(p3, [1.0, 0.0, -1.0], "backward")
    np.testing.assert_allclose(y, [0.5, 0.5, 0.0])


def test_constant_is_fixed_point(k3):
    np.testing.assert_array_equal(gauss_seidel_sweep(k3, [2.5, 2.5, 2.5]), [2.5, 2.5, 2.5])


def test_isolated_node_rejected():
    g = build_graph([(0, 1, 1.0)], 3)
    with pytest.raises(IsolatedNode):
        gauss_seidel_sweep(g, np.zeros(3))


@settings(max_examples=60, deadline=None)
@given(graphs(connected=True), st.integers(0, 2**32 - 1), st.sampled_from(["forward", "backward"]))
def test_sweep_energy_monotone(g, seed, order):
    x = np.random.default_rng(seed).normal(size=g.num_nodes)
    for _ in range(3):
        y = gauss_seidel_sweep(g, x, order)
        assert quadratic_form(g, y) <= quadratic_form(g, x) + 1e-12
        x = y


def test_embed_path_rayleigh_quotient():
    g = path(16)
    x = embed(g, EmbedParams(k=1, sweeps=32, seed=0)).data[:, 0]
    lam2 = 2 * (1 - np.cos(np.pi / 16))
    rq = quadratic_form(g, x) / (x @ x)
    assert lam2 <= rq <= 2 * lam2


def test_embed_invariants_k3():
    X = embed(complete(3), EmbedParams(k=2)).data
    np.testing.assert_allclose(X.sum(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(X, axis=0), 1.0)


def test_embed_deflates_each_component():
    g = build_graph([(0, 1, 1), (1, 2, 1), (3, 4, 1), (4, 5, 1)], 6)
    X = embed(g, EmbedParams(k=3)).data
    np.testing.assert_allclose(X[:3].sum(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(X[3:].sum(axis=0), 0.0, atol=1e-12)


def test_embed_deterministic():
    g = grid2d(12)
    a = embed(g, EmbedParams(seed=9), stream=(0, 1)).data
    b = embed(g, EmbedParams(seed=9), stream=(0, 1)).data
    assert a.tobytes() == b.tobytes()


@pytest.mark.parametrize("kw", [{"sweeps": 0}, {"k": 0}, {"seed": -1}])
def test_params_validation(kw):
    with pytest.raises(InputError):
        EmbedParams(**kw)


def test_embed_exactly_smoothed_column_is_zero():
    g = build_graph([(2, 3, 1.0)], 4)
    X = embed(g, EmbedParams(k=2)).data
    np.testing.assert_array_equal(X, 0.0)
