"""Spectral coarsening by aggregating nodes that are close in the embedding.

One coarsening step contracts high-affinity edges of the embedded graph into
small connected clusters.  The Galerkin coarse graph then carries the summed
crossing weights between clusters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import EmbeddingMismatch, InputError, InvalidAggregation
from .graph import Graph, connected_components
from .smoothing import EmbeddingMatrix, EmbedParams, embed

__all__ = [
    "AggregationMap",
    "CoarsenParams",
    "Hierarchy",
    "mapping_operators",
    "coarse_graph",
    "edge_affinities",
    "aggregate",
    "build_hierarchy",
]


@dataclass(frozen=True, eq=False)
class AggregationMap:
    """Assignment of every fine node to a coarse cluster id."""

    fine_to_coarse: np.ndarray
    num_clusters: int

    def __post_init__(self):
        f2c = np.asarray(self.fine_to_coarse, dtype=np.int64)
        object.__setattr__(self, "fine_to_coarse", f2c)
        if f2c.size and (f2c.min() < 0 or f2c.max() >= self.num_clusters):
            raise InvalidAggregation("cluster ids must lie in [0, num_clusters)")
        if np.bincount(f2c, minlength=self.num_clusters).min(initial=1) == 0:
            raise InvalidAggregation("every cluster must be non-empty")

    @classmethod
    def from_labels(cls, labels) -> "AggregationMap":
        """Relabel arbitrary labels to contiguous ids in order of first appearance."""
        labels = np.asarray(labels)
        if labels.size == 0:
            return cls(np.zeros(0, dtype=np.int64), 0)
        uniq, first, inv = np.unique(labels, return_index=True, return_inverse=True)
        remap = np.empty(uniq.size, dtype=np.int64)
        remap[np.argsort(first, kind="stable")] = np.arange(uniq.size)
        return cls(remap[inv.ravel()], int(uniq.size))

    @classmethod
    def from_clusters(cls, clusters, n: int) -> "AggregationMap":
        f2c = np.full(n, -1, dtype=np.int64)
        for i, members in enumerate(clusters):
            f2c[list(members)] = i
        if (f2c < 0).any():
            raise InvalidAggregation("clusters do not cover every node")
        return cls(f2c, len(clusters))

    @property
    def num_fine(self) -> int:
        return int(self.fine_to_coarse.size)

    @property
    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.fine_to_coarse, minlength=self.num_clusters)

    def clusters(self) -> list[np.ndarray]:
        order = np.argsort(self.fine_to_coarse, kind="stable")
        bounds = np.cumsum(self.cluster_sizes)[:-1]
        return np.split(order, bounds)

    def check_connected(self, g: Graph) -> bool:
        """True when every cluster induces a connected subgraph of ``g``."""
        f2c = self.fine_to_coarse
        inside = f2c[g.u] == f2c[g.v]
        sub = g.subgraph(inside)
        comps = connected_components(sub)
        return comps.num_components == self.num_clusters


@dataclass(frozen=True)
class CoarsenParams:
    max_cluster_size: int = 8
    target_ratio: float = 0.4
    coarsest_size: int = 64
    max_levels: int = 20
    embed: EmbedParams = field(default_factory=EmbedParams)

    def __post_init__(self):
        if self.max_cluster_size < 2:
            raise InputError("max_cluster_size must be >= 2")
        if not 0.0 < self.target_ratio < 1.0:
            raise InputError("target_ratio must lie in (0, 1)")
        if self.coarsest_size < 1:
            raise InputError("coarsest_size must be >= 1")
        if self.max_levels < 1:
            raise InputError("max_levels must be >= 1")


@dataclass
class Hierarchy:
    """Graphs ``G_0 .. G_lf`` and the maps between consecutive levels."""

    graphs: list[Graph]
    maps: list[AggregationMap]
    embeddings: list[EmbeddingMatrix | None] = field(default_factory=list)

    @property
    def num_levels(self) -> int:
        return len(self.graphs)

    @property
    def node_counts(self) -> list[int]:
        return [g.num_nodes for g in self.graphs]


def mapping_operators(m: AggregationMap, n_fine: int | None = None):
    """Averaging restriction ``H`` and piecewise-constant prolongation ``H_plus``.

    ``H[i, p] = 1/|S_i|`` for ``p`` in cluster ``i``; ``H_plus[p, i] = 1``.
    """
    n = m.num_fine if n_fine is None else int(n_fine)
    if n != m.num_fine:
        raise InvalidAggregation(f"map covers {m.num_fine} nodes, expected {n}")
    cols = np.arange(n)
    sizes = m.cluster_sizes.astype(float)
    H = sp.csr_matrix((1.0 / sizes[m.fine_to_coarse], (m.fine_to_coarse, cols)),
                      shape=(m.num_clusters, n))
    H_plus = sp.csr_matrix((np.ones(n), (cols, m.fine_to_coarse)), shape=(n, m.num_clusters))
    return H, H_plus


def coarse_graph(g_fine: Graph, m: AggregationMap) -> Graph:
    """Galerkin coarse graph: crossing weights summed per cluster pair."""
    if m.num_fine != g_fine.num_nodes:
        raise InvalidAggregation("aggregation map does not match the graph")
    cu = m.fine_to_coarse[g_fine.u]
    cv = m.fine_to_coarse[g_fine.v]
    cross = cu != cv
    return Graph.from_arrays(m.num_clusters, cu[cross], cv[cross], g_fine.w[cross])


def edge_affinities(g: Graph, x: EmbeddingMatrix) -> np.ndarray:
    """Normalized squared inner product of embedding rows, per edge.

    Negatively correlated rows get affinity 0: such endpoints sit on opposite
    sides of a smooth mode and must not be merged.
    """
    if x.num_nodes != g.num_nodes:
        raise EmbeddingMismatch(f"embedding has {x.num_nodes} rows, graph has {g.num_nodes} nodes")
    X = np.ascontiguousarray(x.data)
    Xu, Xv = X[g.u], X[g.v]
    ip = np.einsum("ij,ij->i", Xu, Xv)
    nu = np.einsum("ij,ij->i", Xu, Xu)
    nv = np.einsum("ij,ij->i", Xv, Xv)
    den = nu * nv
    aff = np.zeros(g.num_edges)
    ok = (den > 0) & (ip > 0)
    aff[ok] = ip[ok] * ip[ok] / den[ok]
    return aff


def aggregate(g: Graph, x: EmbeddingMatrix, p: CoarsenParams | None = None) -> AggregationMap:
    """Greedy descending-affinity edge contraction under a cluster-size cap.

    Edges are visited by decreasing affinity (ties: smaller ``(u, v)`` pair
    first); two clusters merge when the result has at most
    ``max_cluster_size`` nodes.  Contraction stops once the cluster count is
    at most ``target_ratio * N``.  Merges only follow edges, so every cluster
    is connected.
    """
    p = p or CoarsenParams()
    aff = edge_affinities(g, x)
    order = np.lexsort((g.v, g.u, -aff))
    target = int(np.floor(p.target_ratio * g.num_nodes))
    roots = _kernels.greedy_merge(g.u, g.v, order, g.num_nodes, p.max_cluster_size, target)
    return AggregationMap.from_labels(roots)


def build_hierarchy(g: Graph, p: CoarsenParams | None = None,
                    keep_embeddings: bool = False) -> Hierarchy:
    """Repeat embed -> aggregate -> coarse_graph until the graph is small.

    Stops when ``N_l <= coarsest_size``, when ``max_levels`` graphs exist, or
    when a step fails to shrink the graph.
    """
    p = p or CoarsenParams()
    graphs, maps, embs = [g], [], []
    while len(graphs) < p.max_levels:
        cur = graphs[-1]
        if cur.num_nodes <= p.coarsest_size or cur.num_nodes < 2 or cur.num_edges == 0:
            break
        level = len(graphs) - 1
        x = embed(cur, p.embed, stream=(0, level))
        m = aggregate(cur, x, p)
        if m.num_clusters >= cur.num_nodes:
            break
        graphs.append(coarse_graph(cur, m))
        maps.append(m)
        embs.append(x if keep_embeddings else None)
    if keep_embeddings:
        embs.append(None)
    return Hierarchy(graphs, maps, embs)
