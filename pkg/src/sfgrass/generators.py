"""Synthetic test graphs, mostly unit-weight meshes."""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .graph import Graph

__all__ = ["grid2d", "grid3d", "path", "complete", "star", "random_connected"]

MAX_NODES = 50_000_000


def _check(n: int) -> None:
    if n < 1:
        raise InputError("graph size must be positive")
    if n > MAX_NODES:
        raise InputError(f"graph with {n} nodes exceeds the {MAX_NODES} node limit")


def grid2d(nx: int, ny: int | None = None) -> Graph:
    """``nx x ny`` 4-neighbour mesh, node id ``i * ny + j``."""
    ny = nx if ny is None else ny
    _check(nx * ny)
    ids = np.arange(nx * ny).reshape(nx, ny)
    u = np.concatenate([ids[:, :-1].ravel(), ids[:-1, :].ravel()])
    v = np.concatenate([ids[:, 1:].ravel(), ids[1:, :].ravel()])
    return Graph.from_arrays(nx * ny, u, v, np.ones(u.size))


def grid3d(nx: int, ny: int | None = None, nz: int | None = None) -> Graph:
    """``nx x ny x nz`` 6-neighbour mesh."""
    ny = nx if ny is None else ny
    nz = nx if nz is None else nz
    _check(nx * ny * nz)
    ids = np.arange(nx * ny * nz).reshape(nx, ny, nz)
    u = np.concatenate([ids[:-1].ravel(), ids[:, :-1].ravel(), ids[:, :, :-1].ravel()])
    v = np.concatenate([ids[1:].ravel(), ids[:, 1:].ravel(), ids[:, :, 1:].ravel()])
    return Graph.from_arrays(nx * ny * nz, u, v, np.ones(u.size))


def path(n: int) -> Graph:
    _check(n)
    u = np.arange(n - 1)
    return Graph.from_arrays(n, u, u + 1, np.ones(n - 1))


def complete(n: int) -> Graph:
    _check(n)
    u, v = np.triu_indices(n, k=1)
    return Graph.from_arrays(n, u, v, np.ones(u.size))


def star(n: int, center: int = 0) -> Graph:
    _check(n)
    leaves = np.array([p for p in range(n) if p != center], dtype=np.int64)
    return Graph.from_arrays(n, np.full(leaves.size, center), leaves, np.ones(leaves.size))


def random_connected(n: int, extra_edges: int, rng: np.random.Generator,
                     weight_range: tuple[float, float] = (0.5, 2.0)) -> Graph:
    """Random spanning tree plus ``extra_edges`` random chords, random weights."""
    _check(n)
    perm = rng.permutation(n)
    parents = perm[rng.integers(0, np.arange(1, n))] if n > 1 else np.zeros(0, dtype=np.int64)
    u = list(perm[1:])
    v = list(parents)
    if n > 1:
        a = rng.integers(0, n, size=extra_edges)
        b = rng.integers(0, n, size=extra_edges)
        u += list(a)
        v += list(b)
    w = rng.uniform(*weight_range, size=len(u))
    return Graph.from_arrays(n, u, v, w)
