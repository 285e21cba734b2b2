"""Local spectral embedding by low-pass filtering random graph signals.

A handful of Gauss-Seidel sweeps on ``L x = 0`` damps the high-frequency
content of a random vector much faster than the low-frequency content, so a
few smoothed vectors span (approximately) the leading Laplacian eigenvectors
without any eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateColumn, DimensionMismatch, InputError, IsolatedNode
from .graph import Graph, connected_components

__all__ = [
    "EmbedParams",
    "EmbeddingMatrix",
    "random_test_vectors",
    "gauss_seidel_sweep",
    "embed",
]

_MAX_RETRIES = 8


@dataclass(frozen=True)
class EmbedParams:
    k: int = 10
    sweeps: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be >= 1")
        if self.sweeps < 1:
            raise InputError("sweeps must be >= 1")
        if self.seed < 0:
            raise InputError("seed must be non-negative")


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """``N x K`` matrix whose columns are deflated, unit-norm test vectors."""

    data: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.data.shape[0]

    @property
    def k(self) -> int:
        return self.data.shape[1]

    @property
    def columns(self) -> list[np.ndarray]:
        return [self.data[:, c] for c in range(self.k)]


def _column_rng(seed: int, stream: tuple, column: int, attempt: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(*stream, column, attempt))
    return np.random.Generator(np.random.PCG64(ss))


def random_test_vectors(n: int, k: int, seed: int = 0, stream: tuple = ()) -> EmbeddingMatrix:
    """``k`` seeded uniform(-1, 1) vectors, each orthogonal to the all-one vector.

    Column ``c`` is drawn from its own substream keyed by ``(*stream, c)``, so
    raising ``k`` does not change earlier columns.
    """
    if n < 2:
        raise InputError("need at least 2 nodes for a vector orthogonal to the all-one vector")
    if k < 1:
        raise InputError("k must be >= 1")
    X = np.empty((n, k), order="F")
    for c in range(k):
        for attempt in range(_MAX_RETRIES + 1):
            x = _column_rng(seed, stream, c, attempt).uniform(-1.0, 1.0, size=n)
            x -= x.mean()
            nrm = np.linalg.norm(x)
            if nrm > 1e-12 * np.sqrt(n):
                X[:, c] = x / nrm
                break
        else:
            raise DegenerateColumn(f"column {c} vanished after deflation")
    return EmbeddingMatrix(X)


def gauss_seidel_sweep(g: Graph, x, order: str = "forward") -> np.ndarray:
    """One Gauss-Seidel sweep for ``L x = 0``; returns a new vector.

    Each node is replaced by the weighted average of its neighbours using the
    latest values, which exactly minimizes ``x^T L x`` over that coordinate.
    """
    x = np.array(x, dtype=np.float64, copy=True)
    if x.shape != (g.num_nodes,):
        raise DimensionMismatch(f"expected vector of length {g.num_nodes}")
    if order not in ("forward", "backward"):
        raise InputError("order must be 'forward' or 'backward'")
    if g.num_nodes and (g.degree <= 0).any():
        p = int(np.flatnonzero(g.degree <= 0)[0])
        raise IsolatedNode(f"node {p} has zero degree")
    A = g.adjacency
    X = x.reshape(1, -1)
    _kernels.gauss_seidel(A.indptr, A.indices, A.data, np.asarray(g.degree), X, 1,
                          order == "forward")
    return X[0]


def _deflate_components(X: np.ndarray, labels: np.ndarray, ncomp: int) -> None:
    counts = np.bincount(labels, minlength=ncomp).astype(float)
    for c in range(X.shape[1]):
        means = np.bincount(labels, weights=X[:, c], minlength=ncomp) / counts
        X[:, c] -= means[labels]


def embed(g: Graph, params: EmbedParams | None = None, stream: tuple = ()) -> EmbeddingMatrix:
    """Smoothed random test vectors for ``g``.

    Random deflated vectors get ``params.sweeps`` alternating forward/backward
    Gauss-Seidel sweeps, are deflated against every component's indicator
    vector and normalized.  Isolated nodes end up as zero rows, and a column
    that smooths into the nullspace (tiny components are solved exactly by a
    sweep) is returned as an exact zero column.
    """
    params = params or EmbedParams()
    X0 = random_test_vectors(g.num_nodes, params.k, params.seed, stream).data
    Xt = np.ascontiguousarray(X0.T)
    A = g.adjacency
    _kernels.gauss_seidel(A.indptr, A.indices, A.data, np.asarray(g.degree), Xt,
                          params.sweeps, True)
    X = np.asfortranarray(Xt.T)
    comps = connected_components(g)
    _deflate_components(X, comps.label, comps.num_components)
    norms = np.linalg.norm(X, axis=0)
    dead = norms <= 1e-12  # columns started at unit norm
    X[:, dead] = 0.0
    X[:, ~dead] /= norms[~dead]
    return EmbeddingMatrix(X)

