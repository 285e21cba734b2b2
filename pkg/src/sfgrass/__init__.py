"""Solver-free multilevel spectral graph sparsification.

Typical use::

    from sfgrass import grid2d, sf_grass, SparsifyParams, relative_condition_number

    g = grid2d(64)
    res = sf_grass(g, SparsifyParams(budget_fraction=0.1))
    relative_condition_number(g, res.sparsifier).kappa
"""

from .coarsen import (
    AggregationMap,
    CoarsenParams,
    Hierarchy,
    aggregate,
    build_hierarchy,
    coarse_graph,
    mapping_operators,
)
from .errors import InputError, NumericalError, SfGrassError
from .generators import complete, grid2d, grid3d, path, random_connected, star
from .graph import Graph, build_graph, connected_components, laplacian_apply, quadratic_form
from .linsolve import factorize_sdd, laplacian_pcg, make_preconditioner, pcg, precond_solve
from .matrix_io import load_graph, parse_matrix_market, read_edge_list, write_edge_list
from .metrics import (
    canonical_angles,
    dense_eigen,
    effective_resistance,
    eigen_perturbation_first_order,
    perturbation_score,
    relative_condition_number,
    restricted_similarity_sigma,
)
from .smoothing import EmbedParams, EmbeddingMatrix, embed, gauss_seidel_sweep
from .sparsify import Sparsifier, SparsifyParams, sf_grass

__version__ = "0.1.0"

__all__ = [
    "AggregationMap", "CoarsenParams", "Hierarchy", "aggregate", "build_hierarchy",
    "coarse_graph", "mapping_operators", "InputError", "NumericalError", "SfGrassError",
    "complete", "grid2d", "grid3d", "path", "random_connected", "star", "Graph",
    "build_graph", "connected_components", "laplacian_apply", "quadratic_form",
    "factorize_sdd", "laplacian_pcg", "make_preconditioner", "pcg", "precond_solve",
    "load_graph", "parse_matrix_market", "read_edge_list", "write_edge_list",
    "canonical_angles", "dense_eigen", "effective_resistance",
    "eigen_perturbation_first_order", "perturbation_score", "relative_condition_number",
    "restricted_similarity_sigma", "EmbedParams", "EmbeddingMatrix", "embed",
    "gauss_seidel_sweep", "Sparsifier", "SparsifyParams", "sf_grass",
]
