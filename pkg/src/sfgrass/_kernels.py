"""Numba kernels for the sequential hot loops.

Everything here works on plain numpy arrays (CSR triplets, edge arrays) so the
public modules can stay free of numba specifics.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def gauss_seidel(indptr, indices, data, degree, X, sweeps, forward_first):
    """In-place Gauss-Seidel sweeps for L x = 0 on every row of ``X``.

    ``X`` has shape (k, n); rows are independent signals.  Sweeps alternate
    direction, starting with forward when ``forward_first`` is set.  Nodes of
    zero degree are skipped.
    """
    k, n = X.shape
    for c in range(k):
        x = X[c]
        for s in range(sweeps):
            forward = forward_first if s % 2 == 0 else not forward_first
            for t in range(n):
                p = t if forward else n - 1 - t
                d = degree[p]
                if d <= 0.0:
                    continue
                acc = 0.0
                for j in range(indptr[p], indptr[p + 1]):
                    acc += data[j] * x[indices[j]]
                x[p] = acc / d


@njit(cache=True)
def kruskal(u, v, order, n):
    """Accept edges in ``order`` that join two different trees."""
    parent = np.arange(n)
    rank = np.zeros(n, dtype=np.int64)
    keep = np.zeros(u.shape[0], dtype=np.bool_)
    remaining = n - 1
    for idx in order:
        if remaining == 0:
            break
        a = find(parent, u[idx])
        b = find(parent, v[idx])
        if a == b:
            continue
        if rank[a] < rank[b]:
            a, b = b, a
        parent[b] = a
        if rank[a] == rank[b]:
            rank[a] += 1
        keep[idx] = True
        remaining -= 1
    return keep


@njit(cache=True)
def greedy_merge(u, v, order, n, max_size, target_count):
    """Contract edges in ``order`` under a cluster-size cap.

    Stops as soon as the number of clusters drops to ``target_count``.
    Returns the union-find root of every node.
    """
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    count = n
    if count > target_count:
        for idx in order:
            a = find(parent, u[idx])
            b = find(parent, v[idx])
            if a == b or size[a] + size[b] > max_size:
                continue
            # keep the smaller id as root so labels do not depend on merge order
            if b < a:
                a, b = b, a
            parent[b] = a
            size[a] += size[b]
            count -= 1
            if count <= target_count:
                break
    roots = np.empty(n, dtype=np.int64)
    for p in range(n):
        roots[p] = find(parent, p)
    return roots
