"""Spectral quality measures and dense oracles.

Relative condition numbers of Laplacian pencils, effective resistances,
first-order eigenvalue perturbations and coarse/fine spectral similarity.
Dense routines are capped at ``DENSE_CAP`` nodes; they double as test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sl

from .coarsen import AggregationMap, mapping_operators
from .errors import (
    DifferentComponents,
    IndexOutOfRange,
    InputError,
    NotSpanning,
    NumericalError,
    TooLargeForDense,
)
from .graph import Graph, connected_components
from .linsolve import factorize_sdd, grounded_matrix

__all__ = [
    "DENSE_CAP",
    "EigenPairs",
    "PencilSpectrum",
    "RestrictedSimilarity",
    "dense_eigen",
    "relative_condition_number",
    "effective_resistance",
    "effective_resistance_eigen",
    "effective_resistance_pinv",
    "eigen_perturbation_first_order",
    "perturbation_score",
    "restricted_similarity_sigma",
    "canonical_angles",
    "principal_angles",
    "lanczos_max_pencil",
]

DENSE_CAP = 3000


@dataclass(frozen=True, eq=False)
class EigenPairs:
    values: np.ndarray
    vectors: np.ndarray  # columns


@dataclass(frozen=True)
class PencilSpectrum:
    lambda_min: float
    lambda_max: float
    kappa: float
    method: str
    converged: bool = True
    iterations: int = 0

    def as_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "method": self.method,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _check_dense(n: int, cap: int) -> None:
    if n > cap:
        raise TooLargeForDense(f"{n} nodes exceeds the dense limit of {cap}")


def dense_eigen(g: Graph, cap: int = DENSE_CAP) -> EigenPairs:
    """Full eigendecomposition of the dense Laplacian, ascending."""
    _check_dense(g.num_nodes, cap)
    vals, vecs = np.linalg.eigh(g.dense_laplacian())
    return EigenPairs(vals, vecs)


def _pencil_graph(p) -> Graph:
    return p.graph if hasattr(p, "graph") else p


def _check_spanning(g: Graph, p: Graph):
    if p.num_nodes != g.num_nodes:
        raise NotSpanning("sparsifier and graph have different node counts")
    cg, cp = connected_components(g), connected_components(p)
    if cg.num_components != cp.num_components or not np.array_equal(cg.label, cp.label):
        raise NotSpanning(
            f"sparsifier has {cp.num_components} components, graph has {cg.num_components}"
        )
    return cg


def lanczos_max_pencil(A, B, solve_B, tol: float = 1e-4, maxiter: int = 500,
                       seed: int = 0) -> tuple[float, bool, int]:
    """Largest eigenvalue of ``B^{-1} A`` for SPD ``A``, ``B``.

    Lanczos in the ``B`` inner product with full reorthogonalization; stops
    when the Ritz residual estimate ``beta_j |s_j|`` falls below
    ``tol * theta``.  Returns ``(theta, converged, iterations)``.
    """
    n = A.shape[0]
    if n == 0:
        return 0.0, True, 0
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(3,))))
    m = min(maxiter, n)
    Q = np.zeros((m + 1, n))
    BQ = np.zeros((m + 1, n))
    alphas, betas = [], []
    q = rng.uniform(-1.0, 1.0, n)
    Bq = B @ q
    s = np.sqrt(q @ Bq)
    Q[0], BQ[0] = q / s, Bq / s
    theta, converged = 0.0, False
    for j in range(m):
        w = A @ Q[j]
        alpha = float(Q[j] @ w)
        z = solve_B(w)
        z -= alpha * Q[j]
        if j > 0:
            z -= betas[-1] * Q[j - 1]
        for _ in range(2):
            z -= Q[: j + 1].T @ (BQ[: j + 1] @ z)
        Bz = B @ z
        beta = float(np.sqrt(max(z @ Bz, 0.0)))
        alphas.append(alpha)
        if len(alphas) == 1:
            ritz, vec = np.array([alpha]), np.ones((1, 1))
        else:
            ritz, vec = sl.eigh_tridiagonal(np.array(alphas), np.array(betas))
        theta = float(ritz[-1])
        if beta * abs(vec[-1, -1]) <= tol * abs(theta) or beta <= 1e-14 * abs(theta):
            converged = True
            return theta, converged, j + 1
        betas.append(beta)
        Q[j + 1], BQ[j + 1] = z / beta, Bz / beta
    return theta, converged, m


def relative_condition_number(g: Graph, p, method: str = "auto", cap: int = DENSE_CAP,
                              tol: float = 1e-4, maxiter: int = 500,
                              seed: int = 0) -> PencilSpectrum:
    """Extreme generalized eigenvalues of ``L_g v = lambda L_p v``.

    Both Laplacians are grounded at the smallest node of every component,
    which removes the shared nullspace without changing the nonzero pencil
    spectrum.  ``method`` is ``"dense"``, ``"iterative"`` or ``"auto"``.
    The iterative path runs Lanczos on ``L_p^{-1} L_g`` for the top and on
    ``L_g^{-1} L_p`` for the bottom of the spectrum.
    """
    pg = _pencil_graph(p)
    labels = _check_spanning(g, pg)
    if method == "auto":
        method = "dense" if g.num_nodes <= cap else "iterative"
    A, keep, _, _ = grounded_matrix(g, labels)
    B, _, _, _ = grounded_matrix(pg, labels)
    if keep.size == 0:
        return PencilSpectrum(1.0, 1.0, 1.0, method)
    if method == "dense":
        _check_dense(g.num_nodes, cap)
        vals = sl.eigh(A.toarray(), B.toarray(), eigvals_only=True)
        lo, hi = float(vals[0]), float(vals[-1])
        return PencilSpectrum(lo, hi, hi / lo, "dense")
    if method != "iterative":
        raise InputError(f"unknown method {method!r}")
    fb = factorize_sdd(pg, labels)
    fa = factorize_sdd(g, labels)
    hi, ok_hi, it_hi = lanczos_max_pencil(A, B, fb.lu.solve, tol, maxiter, seed)
    inv_lo, ok_lo, it_lo = lanczos_max_pencil(B, A, fa.lu.solve, tol, maxiter, seed + 1)
    lo = 1.0 / inv_lo
    return PencilSpectrum(lo, hi, hi / lo, "iterative", ok_hi and ok_lo, it_hi + it_lo)


# -- effective resistance -------------------------------------------------------

def _resistance_pair(g: Graph, u: int, v: int, cap: int):
    _check_dense(g.num_nodes, cap)
    n = g.num_nodes
    if not (0 <= u < n and 0 <= v < n):
        raise IndexOutOfRange(f"nodes ({u}, {v}) outside [0, {n})")
    comps = connected_components(g)
    if comps.label[u] != comps.label[v]:
        raise DifferentComponents(f"nodes {u} and {v} lie in different components")
    return comps


def effective_resistance_eigen(g: Graph, u: int, v: int, cap: int = DENSE_CAP) -> float:
    """``sum_i (u_i(p) - u_i(q))^2 / lambda_i`` over the non-null eigenpairs."""
    comps = _resistance_pair(g, u, v, cap)
    eig = dense_eigen(g, cap)
    c = comps.num_components
    d = eig.vectors[u, c:] - eig.vectors[v, c:]
    return float(np.sum(d * d / eig.values[c:]))


def effective_resistance_pinv(g: Graph, u: int, v: int, cap: int = DENSE_CAP) -> float:
    """``e^T L^+ e`` via ``L^+ = (L + J)^{-1} - J`` with ``J`` the component averagers."""
    comps = _resistance_pair(g, u, v, cap)
    lab = comps.label
    cnt = np.bincount(lab).astype(float)
    J = (lab[:, None] == lab[None, :]) / cnt[lab][:, None]
    e = np.zeros(g.num_nodes)
    e[u] += 1.0
    e[v] -= 1.0
    # J e = 0 for u, v in the same component
    return float(e @ np.linalg.solve(g.dense_laplacian() + J, e))


def effective_resistance(g: Graph, u: int, v: int, cap: int = DENSE_CAP,
                         check_tol: float = 1e-9) -> float:
    """Effective resistance between ``u`` and ``v`` computed two ways.

    The eigen-expansion value is returned after cross-checking it against
    the pseudoinverse quadratic form.
    """
    a = effective_resistance_eigen(g, u, v, cap)
    b = effective_resistance_pinv(g, u, v, cap)
    if abs(a - b) > check_tol * max(1.0, abs(b)):
        raise NumericalError(f"effective resistance routes disagree: {a!r} vs {b!r}")
    return a


# -- perturbation ---------------------------------------------------------------

def eigen_perturbation_first_order(eig: EigenPairs, i: int, edge) -> float:
    """First-order shift of eigenvalue ``i`` when edge ``(u, v, w)`` is added:
    ``w * (u_i(u) - u_i(v))^2``."""
    u, v, w = edge
    n = eig.values.size
    if not 1 <= i < n:
        raise IndexOutOfRange(f"eigen index {i} outside [1, {n})")
    d = eig.vectors[int(u), i] - eig.vectors[int(v), i]
    return float(w) * float(d * d)


def perturbation_score(eig: EigenPairs, K: int, edge) -> float:
    """Total first-order shift of eigenvalues ``1..K``: ``w * ||U_K^T e_uv||^2``."""
    u, v, w = edge
    n = eig.values.size
    if not 1 <= K < n:
        raise IndexOutOfRange(f"K={K} outside [1, {n})")
    d = eig.vectors[int(u), 1:K + 1] - eig.vectors[int(v), 1:K + 1]
    return float(w) * float(d @ d)


# -- coarse / fine similarity --------------------------------------------------

@dataclass(frozen=True)
class RestrictedSimilarity:
    sigma: float
    ratios: np.ndarray  # sqrt(coarse energy / fine energy) per eigenvector
    zero_energy: bool


def _nontrivial(g: Graph, k: int, cap: int) -> np.ndarray:
    eig = dense_eigen(g, cap)
    c = connected_components(g).num_components
    if c + k > g.num_nodes:
        raise InputError(f"graph has only {g.num_nodes - c} nontrivial eigenvectors")
    return eig.vectors[:, c:c + k]


def restricted_similarity_sigma(g_fine: Graph, g_coarse: Graph, m: AggregationMap, k: int,
                                cap: int = DENSE_CAP) -> RestrictedSimilarity:
    """Energy distortion of the first ``k`` nontrivial fine eigenvectors under ``x -> H x``.

    ``sigma`` is the largest ``max(r, 1/r)``, ``r = sqrt(x_c^T L_c x_c / x^T L x)``.
    A restricted vector with no coarse energy gives ``sigma = inf`` and sets
    ``zero_energy``.
    """
    _check_dense(g_fine.num_nodes, cap)
    if k > g_coarse.num_nodes:
        raise InputError("k exceeds the coarse graph size")
    H, _ = mapping_operators(m, g_fine.num_nodes)
    U = _nontrivial(g_fine, k, cap)
    Lf, Lc = g_fine.laplacian, g_coarse.laplacian
    ratios = np.empty(k)
    zero = False
    for j in range(k):
        x = U[:, j]
        xc = H @ x
        ef = float(x @ (Lf @ x))
        ec = float(xc @ (Lc @ xc))
        if ec <= 1e-14 * ef:
            zero = True
            ratios[j] = 0.0
        else:
            ratios[j] = np.sqrt(ec / ef)
    if zero:
        return RestrictedSimilarity(float("inf"), ratios, True)
    sigma = float(np.max(np.maximum(ratios, 1.0 / ratios)))
    return RestrictedSimilarity(sigma, ratios, False)


def principal_angles(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Principal angles between the column spaces of ``A`` and ``B``, ascending."""
    Qa, _ = np.linalg.qr(A)
    Qb, _ = np.linalg.qr(B)
    s = np.linalg.svd(Qa.T @ Qb, compute_uv=False)
    return np.sort(np.arccos(np.clip(s, 0.0, 1.0)))


def canonical_angles(g_fine: Graph, g_coarse: Graph, m: AggregationMap, k: int,
                     cap: int = DENSE_CAP) -> np.ndarray:
    """Angles between the fine principal eigenspace and the lifted coarse one."""
    _check_dense(g_fine.num_nodes, cap)
    if k > g_coarse.num_nodes:
        raise InputError("k exceeds the coarse graph size")
    H, _ = mapping_operators(m, g_fine.num_nodes)
    Uf = _nontrivial(g_fine, k, cap)
    Uc = _nontrivial(g_coarse, k, cap)
    return principal_angles(Uf, H.T @ Uc)
