"""Multilevel solver-free sparsification.

The coarsest graph gets a maximum spanning tree plus its most distorted
off-tree edges.  Each finer sparsifier is then recovered by backward mapping
(per-cluster spanning trees plus the heaviest edge behind every coarse
sparsifier edge) and enriched with the candidate edges whose endpoints are
farthest apart in a smoothed-vector embedding.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .coarsen import AggregationMap, CoarsenParams, Hierarchy, build_hierarchy
from .errors import EmbeddingMismatch, InconsistentMap, InputError, NotSubgraph
from .graph import Graph, connected_components
from .smoothing import EmbeddingMatrix, EmbedParams, embed

__all__ = [
    "Sparsifier",
    "SparsifyParams",
    "ScoredEdges",
    "SfGrassResult",
    "max_spanning_forest",
    "backward_map",
    "edge_distortion_scores",
    "add_top_edges",
    "sf_grass",
]


@dataclass(frozen=True, eq=False)
class Sparsifier:
    """Subgraph of ``parent`` given by edge masks over the parent's edge list.

    ``tree_mask`` marks a spanning forest of the parent; the remaining kept
    edges are off-tree edges.
    """

    parent: Graph
    edge_mask: np.ndarray
    tree_mask: np.ndarray

    @classmethod
    def spanning_forest(cls, g: Graph) -> "Sparsifier":
        t = max_spanning_forest(g)
        return cls(g, t.copy(), t)

    @classmethod
    def full(cls, g: Graph) -> "Sparsifier":
        return cls(g, np.ones(g.num_edges, dtype=bool), max_spanning_forest(g))

    @classmethod
    def from_subgraph(cls, parent: Graph, sub: Graph, tags=None) -> "Sparsifier":
        """Locate ``sub``'s edges in ``parent``; weights must match exactly.

        ``tags`` ("tree"/"offtree" per edge of ``sub``) fixes the tree part;
        without tags the tree is a maximum spanning forest of ``sub``.
        """
        if sub.num_nodes != parent.num_nodes:
            raise NotSubgraph(f"sparsifier has {sub.num_nodes} nodes, graph has {parent.num_nodes}")
        idx = parent.edge_index(sub.u, sub.v)
        if (idx < 0).any():
            i = int(np.flatnonzero(idx < 0)[0])
            raise NotSubgraph(f"edge ({sub.u[i]}, {sub.v[i]}) is not in the graph")
        if not np.array_equal(parent.w[idx], sub.w):
            raise NotSubgraph("sparsifier edge weights differ from the graph's")
        mask = np.zeros(parent.num_edges, dtype=bool)
        mask[idx] = True
        tree = np.zeros(parent.num_edges, dtype=bool)
        if tags is not None:
            tags = list(tags)
            if len(tags) != sub.num_edges:
                raise InputError("need one tag per sparsifier edge")
            tree[idx[np.asarray([t == "tree" for t in tags], dtype=bool)]] = True
        else:
            tree[idx[max_spanning_forest(sub)]] = True
        return cls(parent, mask, tree)

    @cached_property
    def graph(self) -> Graph:
        return self.parent.subgraph(self.edge_mask)

    @property
    def off_tree_mask(self) -> np.ndarray:
        return self.edge_mask & ~self.tree_mask

    @property
    def tree_edges(self) -> np.ndarray:
        return np.flatnonzero(self.tree_mask)

    @property
    def off_tree_edges(self) -> np.ndarray:
        return np.flatnonzero(self.off_tree_mask)

    @property
    def num_edges(self) -> int:
        return int(self.edge_mask.sum())

    @property
    def num_off_tree(self) -> int:
        return int(self.off_tree_mask.sum())

    def tree(self) -> "Sparsifier":
        return Sparsifier(self.parent, self.tree_mask.copy(), self.tree_mask)

    def tags(self) -> list[str]:
        """"tree"/"offtree" for each edge of :attr:`graph`, in edge order."""
        kept = self.tree_mask[self.edge_mask]
        return ["tree" if t else "offtree" for t in kept.tolist()]

    def check(self) -> None:
        """Raise ``AssertionError`` if a structural invariant is violated."""
        g = self.parent
        assert self.edge_mask.shape == (g.num_edges,)
        assert not (self.tree_mask & ~self.edge_mask).any(), "tree edge outside sparsifier"
        ncomp = connected_components(g).num_components
        assert int(self.tree_mask.sum()) == g.num_nodes - ncomp, "tree size is not N - #components"
        forest = connected_components(g.subgraph(self.tree_mask))
        assert forest.num_components == ncomp, "tree does not span every component"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sparsifier):
            return NotImplemented
        return (self.parent == other.parent
                and np.array_equal(self.edge_mask, other.edge_mask)
                and np.array_equal(self.tree_mask, other.tree_mask))

    __hash__ = None


def _kruskal_mask(g: Graph, candidates: np.ndarray | None = None) -> np.ndarray:
    if candidates is None:
        order = np.lexsort((g.v, g.u, -g.w))
    else:
        c = np.flatnonzero(candidates)
        order = c[np.lexsort((g.v[c], g.u[c], -g.w[c]))]
    return _kernels.kruskal(g.u, g.v, order.astype(np.int64), g.num_nodes)


def max_spanning_forest(g: Graph) -> np.ndarray:
    """Boolean edge mask of a maximum spanning forest (Kruskal).

    Edges are taken by decreasing weight, ties broken by the smaller
    ``(u, v)`` pair.
    """
    return _kruskal_mask(g)


def backward_map(p_coarse: Sparsifier, g_fine: Graph, m: AggregationMap) -> Sparsifier:
    """Lift a coarse sparsifier to the finer graph.

    Every cluster contributes the maximum spanning tree of its induced
    subgraph; every coarse sparsifier edge ``(i, j)`` contributes the single
    heaviest fine edge between clusters ``i`` and ``j``.  Crossing edges of
    coarse tree edges become tree edges, the others off-tree edges.
    """
    if m.num_fine != g_fine.num_nodes or m.num_clusters != p_coarse.parent.num_nodes:
        raise InconsistentMap("aggregation map does not connect these graphs")
    f2c = m.fine_to_coarse
    cu, cv = f2c[g_fine.u], f2c[g_fine.v]
    inside = cu == cv
    tree = _kruskal_mask(g_fine, inside)

    cross = np.flatnonzero(~inside)
    lo = np.minimum(cu[cross], cv[cross])
    hi = np.maximum(cu[cross], cv[cross])
    order = np.lexsort((g_fine.v[cross], g_fine.u[cross], -g_fine.w[cross], hi, lo))
    lo, hi, cross = lo[order], hi[order], cross[order]
    first = np.ones(cross.size, dtype=bool)
    first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
    rep, lo, hi = cross[first], lo[first], hi[first]

    coarse_idx = p_coarse.parent.edge_index(lo, hi)
    if (coarse_idx < 0).any():
        raise InconsistentMap("fine crossing edges with no coarse counterpart")
    covered = np.zeros(p_coarse.parent.num_edges, dtype=bool)
    covered[coarse_idx] = True
    if (p_coarse.edge_mask & ~covered).any():
        raise InconsistentMap("coarse sparsifier edge has no crossing fine edge")

    keep = p_coarse.edge_mask[coarse_idx]
    is_tree = p_coarse.tree_mask[coarse_idx]
    mask = tree.copy()
    mask[rep[keep]] = True
    tree[rep[keep & is_tree]] = True
    return Sparsifier(g_fine, mask, tree)


@dataclass(frozen=True)
class ScoredEdges:
    """Candidate edge indices (into the parent graph) by decreasing score."""

    index: np.ndarray
    score: np.ndarray

    def __len__(self) -> int:
        return int(self.index.size)


def edge_distortion_scores(g: Graph, p: Sparsifier, x: EmbeddingMatrix) -> ScoredEdges:
    """Score every edge of ``g`` missing from ``p`` by ``w * ||X^T e_pq||^2``.

    Sorted by decreasing score, ties broken by the smaller ``(u, v)`` pair.
    """
    if p.parent is not g and p.parent != g:
        raise InputError("sparsifier does not belong to this graph")
    if x.num_nodes != g.num_nodes:
        raise EmbeddingMismatch(f"embedding has {x.num_nodes} rows, graph has {g.num_nodes} nodes")
    cand = np.flatnonzero(~p.edge_mask)
    X = np.ascontiguousarray(x.data)
    diff = X[g.u[cand]] - X[g.v[cand]]
    score = g.w[cand] * np.einsum("ij,ij->i", diff, diff)
    order = np.lexsort((g.v[cand], g.u[cand], -score))
    return ScoredEdges(cand[order], score[order])


def add_top_edges(p: Sparsifier, scores: ScoredEdges, budget: int) -> Sparsifier:
    """Add the ``budget`` highest-scored candidates as off-tree edges."""
    if budget < 0:
        raise InputError("budget must be non-negative")
    take = scores.index[: int(budget)]
    mask = p.edge_mask.copy()
    mask[take] = True
    return Sparsifier(p.parent, mask, p.tree_mask)


# -- driver -------------------------------------------------------------------

@dataclass(frozen=True)
class SparsifyParams:
    budget_fraction: float = 0.05
    score_embedding: str = "sparsifier"
    rounds: int = 4
    embed: EmbedParams = field(default_factory=EmbedParams)
    coarsen: CoarsenParams = field(default_factory=CoarsenParams)

    def __post_init__(self):
        if not self.budget_fraction >= 0:
            raise InputError("budget_fraction must be >= 0")
        if self.score_embedding not in ("sparsifier", "graph"):
            raise InputError("score_embedding must be 'sparsifier' or 'graph'")
        if self.rounds < 1:
            raise InputError("rounds must be >= 1")


@dataclass
class SfGrassResult:
    sparsifier: Sparsifier
    hierarchy: Hierarchy
    levels: list[dict]
    coarsen_time: float
    sparsify_time: float

    @property
    def stats(self) -> dict:
        g = self.sparsifier.parent
        return {
            "n": g.num_nodes,
            "m": g.num_edges,
            "num_levels": self.hierarchy.num_levels,
            "sparsifier_edges": self.sparsifier.num_edges,
            "tree_edges": int(self.sparsifier.tree_mask.sum()),
            "off_tree_edges": self.sparsifier.num_off_tree,
            "off_tree_fraction": self.sparsifier.num_off_tree / max(g.num_nodes, 1),
            "coarsen_time": self.coarsen_time,
            "sparsify_time": self.sparsify_time,
            "levels": self.levels,
        }


def _enrich(p: Sparsifier, level: int, params: SparsifyParams) -> tuple[Sparsifier, dict]:
    # The level budget is spent in several rounds, re-embedding in between, so
    # that one badly stretched region does not absorb every added edge.
    g = p.parent
    candidates = g.num_edges - p.num_edges
    budget = min(math.ceil(params.budget_fraction * g.num_nodes), candidates)
    on_sparsifier = params.score_embedding == "sparsifier"
    rounds = params.rounds if on_sparsifier else 1
    step = math.ceil(budget / rounds) if budget else 0
    added, r = 0, 0
    while added < budget:
        take = min(step, budget - added)
        x = embed(p.graph if on_sparsifier else g, params.embed, stream=(1, level, r))
        p = add_top_edges(p, edge_distortion_scores(g, p, x), take)
        added += take
        r += 1
    stats = {
        "level": level,
        "n": g.num_nodes,
        "m": g.num_edges,
        "off_subgraph_edges": int(candidates),
        "edges_added": int(budget),
        "sampling_ratio": budget / candidates if candidates else 0.0,
        "sparsifier_edges": p.num_edges,
        "off_tree_edges": p.num_off_tree,
    }
    return p, stats


def sf_grass(g: Graph, params: SparsifyParams | None = None) -> SfGrassResult:
    """Build the level-0 sparsifier of ``g`` through the coarsening hierarchy."""
    params = params or SparsifyParams()
    t0 = time.perf_counter()
    h = build_hierarchy(g, params.coarsen)
    t1 = time.perf_counter()
    lf = h.num_levels - 1
    p, st = _enrich(Sparsifier.spanning_forest(h.graphs[lf]), lf, params)
    levels = [st]
    for level in range(lf, 0, -1):
        p = backward_map(p, h.graphs[level - 1], h.maps[level - 1])
        p, st = _enrich(p, level - 1, params)
        levels.append(st)
    t2 = time.perf_counter()
    levels.reverse()
    return SfGrassResult(p, h, levels, t1 - t0, t2 - t1)
