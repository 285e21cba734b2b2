"""Weighted undirected graphs and their Laplacians.

A :class:`Graph` stores each undirected edge once as ``(u, v, w)`` with
``u < v``, sorted lexicographically.  The CSR adjacency and the Laplacian
``L = D - A`` are derived lazily and cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, InputError, NegativeWeight, NodeIdOutOfRange

__all__ = [
    "Graph",
    "ComponentLabels",
    "build_graph",
    "laplacian_apply",
    "quadratic_form",
    "connected_components",
]


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable weighted undirected graph in canonical edge order."""

    num_nodes: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def _canonical(cls, num_nodes, u, v, w) -> "Graph":
        # caller guarantees u < v, unique pairs, lexicographic order, w > 0
        u = np.ascontiguousarray(u, dtype=np.int64)
        v = np.ascontiguousarray(v, dtype=np.int64)
        w = np.ascontiguousarray(w, dtype=np.float64)
        for a in (u, v, w):
            a.setflags(write=False)
        return cls(int(num_nodes), u, v, w)

    @classmethod
    def from_arrays(cls, num_nodes, u, v, w) -> "Graph":
        """Canonicalize raw edge arrays (see :func:`build_graph` for rules)."""
        n = int(num_nodes)
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        w = np.asarray(w, dtype=np.float64).ravel()
        if not (u.shape == v.shape == w.shape):
            raise DimensionMismatch("edge arrays differ in length")
        if n < 0:
            raise NodeIdOutOfRange("num_nodes must be non-negative")
        if u.size:
            bad = (u < 0) | (u >= n) | (v < 0) | (v >= n)
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                raise NodeIdOutOfRange(
                    f"edge ({u[i]}, {v[i]}) outside [0, {n})"
                )
            if not np.isfinite(w).all():
                raise InputError("edge weights must be finite")
            neg = w < 0
            if neg.any():
                i = int(np.flatnonzero(neg)[0])
                raise NegativeWeight(int(u[i]), int(v[i]), float(w[i]))
        keep = (u != v) & (w > 0)
        u, v, w = u[keep], v[keep], w[keep]
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if lo.size > 1:
            start = np.ones(lo.size, dtype=bool)
            start[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
            if not start.all():
                idx = np.flatnonzero(start)
                w = np.add.reduceat(w, idx)
                lo, hi = lo[idx], hi[idx]
        return cls._canonical(n, lo, hi, w)

    # -- basic queries ---------------------------------------------------
    @property
    def num_edges(self) -> int:
        return int(self.u.size)

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.u.tolist(), self.v.tolist(), self.w.tolist()))

    def edge_array(self) -> np.ndarray:
        """``(M, 3)`` float array of ``(u, v, w)`` rows."""
        return np.column_stack([self.u, self.v, self.w]).astype(float)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        n = self.num_nodes
        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([self.v, self.u])
        vals = np.concatenate([self.w, self.w])
        A = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        A.sort_indices()
        return A

    @cached_property
    def degree(self) -> np.ndarray:
        d = np.zeros(self.num_nodes)
        np.add.at(d, self.u, self.w)
        np.add.at(d, self.v, self.w)
        d.setflags(write=False)
        return d

    @cached_property
    def laplacian(self) -> sp.csr_matrix:
        L = (sp.diags(self.degree) - self.adjacency).tocsr()
        L.sort_indices()
        return L

    def dense_laplacian(self) -> np.ndarray:
        return self.laplacian.toarray()

    @cached_property
    def components(self) -> "ComponentLabels":
        return connected_components(self)

    @cached_property
    def _edge_keys(self) -> np.ndarray:
        return self.u * max(self.num_nodes, 1) + self.v

    def edge_index(self, u, v) -> np.ndarray:
        """Positions of the pairs ``(u, v)`` in this graph's edge list, -1 if absent."""
        u = np.atleast_1d(np.asarray(u, dtype=np.int64))
        v = np.atleast_1d(np.asarray(v, dtype=np.int64))
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        keys = lo * max(self.num_nodes, 1) + hi
        if self.num_edges == 0:
            return np.full(keys.shape, -1, dtype=np.int64)
        pos = np.minimum(np.searchsorted(self._edge_keys, keys), self.num_edges - 1)
        return np.where(self._edge_keys[pos] == keys, pos, -1)

    def subgraph(self, mask) -> "Graph":
        """Same node set, only the edges selected by ``mask``."""
        mask = np.asarray(mask)
        return Graph._canonical(self.num_nodes, self.u[mask], self.v[mask], self.w[mask])

    def total_weight(self) -> float:
        return float(self.w.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"


@dataclass(frozen=True)
class ComponentLabels:
    label: np.ndarray
    num_components: int

    def indicator_counts(self) -> np.ndarray:
        return np.bincount(self.label, minlength=self.num_components)

    def representatives(self) -> np.ndarray:
        """Smallest node id of each component, indexed by label."""
        # first occurrence of a label is its minimum node
        return np.unique(self.label, return_index=True)[1].astype(np.int64)


def build_graph(triples: Iterable, num_nodes: int) -> Graph:
    """Build a graph from ``(u, v, w)`` triples.

    Self-loops and zero weights are dropped; reversed or repeated pairs are
    merged by summing their weights.  Negative weights raise
    :class:`NegativeWeight`.
    """
    arr = np.asarray(list(triples) if not isinstance(triples, np.ndarray) else triples,
                     dtype=np.float64)
    if arr.size == 0:
        arr = arr.reshape(0, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise DimensionMismatch("triples must be (u, v, w)")
    uf, vf = arr[:, 0], arr[:, 1]
    if np.any(uf != np.floor(uf)) or np.any(vf != np.floor(vf)):
        raise NodeIdOutOfRange("node ids must be integers")
    return Graph.from_arrays(num_nodes, uf.astype(np.int64), vf.astype(np.int64), arr[:, 2])


def _check_len(g: Graph, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != g.num_nodes:
        raise DimensionMismatch(f"vector has length {x.shape[0]}, graph has {g.num_nodes} nodes")
    return x


def laplacian_apply(g: Graph, x) -> np.ndarray:
    """Return ``L x`` as ``D x - A x``."""
    x = _check_len(g, x)
    if x.ndim == 1:
        return g.degree * x - g.adjacency @ x
    return g.degree[:, None] * x - g.adjacency @ x


def quadratic_form(g: Graph, x) -> float:
    """``x^T L x`` accumulated edge by edge: sum of ``w (x_u - x_v)^2``."""
    x = _check_len(g, x)
    d = x[g.u] - x[g.v]
    return float(np.dot(g.w, d * d))


def connected_components(g: Graph) -> ComponentLabels:
    """Component labels numbered in order of each component's smallest node."""
    from scipy.sparse.csgraph import connected_components as _cc

    n = g.num_nodes
    if n == 0:
        return ComponentLabels(np.zeros(0, dtype=np.int64), 0)
    ncomp, raw = _cc(g.adjacency, directed=False)
    _, first = np.unique(raw, return_index=True)
    remap = np.empty(ncomp, dtype=np.int64)
    remap[np.argsort(first, kind="stable")] = np.arange(ncomp)
    label = remap[raw]
    label.setflags(write=False)
    return ComponentLabels(label, int(ncomp))
