"""Grounded Laplacian factorization and preconditioned conjugate gradients.

A graph Laplacian is singular (constants per component), so each component
is grounded at its smallest node id: that row and column are deleted and the
remaining SDD matrix is positive definite.  The factorization uses SuperLU
in symmetric mode with a minimum-degree column ordering and no off-diagonal
pivoting, which for SPD input is a sparse Cholesky in LU clothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionMismatch, InputError, NumericalBreakdown
from .graph import ComponentLabels, Graph, connected_components

__all__ = [
    "SddFactorization",
    "PcgResult",
    "factorize_sdd",
    "precond_solve",
    "project_range",
    "pcg",
    "laplacian_pcg",
    "make_preconditioner",
    "random_rhs",
]


def project_range(labels: ComponentLabels, b: np.ndarray) -> np.ndarray:
    """Remove each component's mean from ``b`` (projection onto range(L))."""
    b = np.asarray(b, dtype=np.float64)
    cnt = np.bincount(labels.label, minlength=labels.num_components).astype(float)
    means = np.bincount(labels.label, weights=b, minlength=labels.num_components) / cnt
    return b - means[labels.label]


@dataclass(frozen=True, eq=False)
class SddFactorization:
    """Factorization of a Laplacian grounded at one node per component."""

    num_nodes: int
    grounded_nodes: np.ndarray
    keep: np.ndarray  # node ids of the grounded system, in matrix order
    permutation: np.ndarray
    lu: object = field(repr=False)
    labels: ComponentLabels = field(repr=False)

    @property
    def factor(self) -> sp.csc_matrix:
        """Lower-triangular factor of the permuted grounded matrix."""
        return self.lu.L

    @property
    def factor_nnz(self) -> int:
        return int(self.lu.L.nnz) if self.keep.size else 0

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve on the grounded system; grounded coordinates come back as 0."""
        x = np.zeros(self.num_nodes)
        if self.keep.size:
            x[self.keep] = self.lu.solve(np.ascontiguousarray(b[self.keep]))
        return x


def grounded_matrix(g: Graph, labels: ComponentLabels | None = None):
    labels = labels or connected_components(g)
    grounded = labels.representatives()
    keep_mask = np.ones(g.num_nodes, dtype=bool)
    keep_mask[grounded] = False
    keep = np.flatnonzero(keep_mask)
    L = g.laplacian[keep][:, keep].tocsc()
    return L, keep, grounded, labels


def factorize_sdd(g: Graph, labels: ComponentLabels | None = None) -> SddFactorization:
    """Factor ``g``'s Laplacian grounded at the minimum node of every component."""
    if g.num_nodes == 0:
        raise InputError("cannot factor an empty graph")
    L, keep, grounded, labels = grounded_matrix(g, labels)
    if keep.size == 0:
        return SddFactorization(g.num_nodes, grounded, keep, np.zeros(0, dtype=np.int64),
                                None, labels)
    try:
        lu = spla.splu(
            L,
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )
    except RuntimeError as exc:  # SuperLU reports exact singularity this way
        raise NumericalBreakdown(f"factorization failed: {exc}") from exc
    pivots = lu.U.diagonal()
    if not np.all(pivots > 0) or not np.array_equal(lu.perm_r, lu.perm_c):
        raise NumericalBreakdown("non-positive or off-diagonal pivot in grounded Laplacian")
    return SddFactorization(g.num_nodes, grounded, keep, lu.perm_c.copy(), lu, labels)


def precond_solve(f: SddFactorization, b) -> np.ndarray:
    """Apply the grounded inverse to ``b`` (projected onto the range first)."""
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (f.num_nodes,):
        raise DimensionMismatch(f"expected vector of length {f.num_nodes}")
    return f.solve(project_range(f.labels, b))


@dataclass
class PcgResult:
    solution: np.ndarray
    iterations: int
    relative_residual: float
    converged: bool
    residual_history: list[float]


def _as_operator(op) -> Callable[[np.ndarray], np.ndarray]:
    if op is None:
        return lambda r: r.copy()
    if callable(op) and not hasattr(op, "shape"):
        return op
    return lambda r: op @ r


def pcg(apply_A, precond, b, tol: float = 1e-3, maxiter: int = 1000,
        x0: np.ndarray | None = None, callback=None) -> PcgResult:
    """Preconditioned conjugate gradients.

    Parameters
    ----------
    apply_A, precond
        Callables or matrices; ``precond`` approximates ``A^{-1}`` and may be
        ``None`` for plain CG.
    b
        Right-hand side, assumed to lie in the range of ``A``.
    tol
        Stop once ``||b - A x|| / ||b|| < tol``.
    callback
        Called as ``callback(k, x)`` after every iteration.

    Returns
    -------
    PcgResult
        ``residual_history[k]`` is the recursively updated relative residual
        after ``k`` iterations; ``relative_residual`` is recomputed from the
        returned solution.
    """
    A = _as_operator(apply_A)
    M = _as_operator(precond)
    b = np.asarray(b, dtype=np.float64)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return PcgResult(np.zeros_like(b), 0, 0.0, True, [0.0])
    r = b - A(x)
    hist = [np.linalg.norm(r) / bnorm]
    z = M(r)
    d = z.copy()
    rz = float(r @ z)
    k = 0
    while hist[-1] >= tol and k < maxiter:
        q = A(d)
        dq = float(d @ q)
        if dq <= 0.0 or rz <= 0.0:
            break
        alpha = rz / dq
        x += alpha * d
        r -= alpha * q
        k += 1
        hist.append(float(np.linalg.norm(r) / bnorm))
        if callback is not None:
            callback(k, x)
        if hist[-1] < tol:
            break
        z = M(r)
        rz_new = float(r @ z)
        d = z + (rz_new / rz) * d
        rz = rz_new
    relres = float(np.linalg.norm(b - A(x)) / bnorm)
    return PcgResult(x, k, relres, relres < tol, hist)


def make_preconditioner(kind: str, g: Graph, sparsifier_graph: Graph | None = None):
    """Preconditioner operator for ``g``'s Laplacian.

    ``kind="factor"`` applies a grounded solve with ``sparsifier_graph``'s
    Laplacian; ``"jacobi"`` and ``"none"`` are the usual baselines.  Outputs
    are projected onto range(L).
    """
    labels = connected_components(g)
    if kind == "none":
        return lambda r: project_range(labels, r)
    if kind == "jacobi":
        d = np.where(g.degree > 0, g.degree, 1.0)
        return lambda r: project_range(labels, r / d)
    if kind == "factor":
        if sparsifier_graph is None:
            raise InputError("factor preconditioner needs a sparsifier graph")
        f = factorize_sdd(sparsifier_graph, labels)
        return lambda r: project_range(labels, precond_solve(f, r))
    raise InputError(f"unknown preconditioner {kind!r}")


def random_rhs(g: Graph, seed: int = 0) -> np.ndarray:
    """Seeded uniform(-1, 1) right-hand side projected onto range(L)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(2,))))
    return project_range(connected_components(g), rng.uniform(-1.0, 1.0, g.num_nodes))


def laplacian_pcg(g: Graph, b, precond, tol: float = 1e-3, maxiter: int = 1000,
                  callback=None) -> PcgResult:
    """PCG on ``L_g x = b`` with ``b`` projected onto the range of ``L_g``."""
    b = project_range(connected_components(g), b)
    L = g.laplacian
    return pcg(lambda v: L @ v, precond, b, tol=tol, maxiter=maxiter, callback=callback)
