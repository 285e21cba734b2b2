"""``sfgrass`` command line: sparsify, condnum, sweep, pcg, gen.

Single results go to stdout as JSON; bulk outputs (edge lists, CSV series,
optional PNG figures) are written under ``-o``.  Exit status is 0 on
success, 1 for input or I/O problems and 2 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import generators
from .coarsen import CoarsenParams
from .errors import InputError, NumericalError
from .linsolve import laplacian_pcg, make_preconditioner, random_rhs
from .matrix_io import load_graph, read_edge_list, write_edge_list, write_hierarchy, write_metrics
from .metrics import relative_condition_number
from .smoothing import EmbedParams
from .sparsify import Sparsifier, SparsifyParams, sf_grass

log = logging.getLogger("sfgrass")

SCHEMA_VERSION = 1
_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    s = int(text, 0)
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return s


def _budgets(text: str) -> list[float]:
    parts = [t for t in text.replace(" ", "").split(",") if t]
    try:
        vals = [float(t) for t in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad budget list {text!r}") from None
    if any(not v >= 0 for v in vals):
        raise argparse.ArgumentTypeError("budgets must be non-negative")
    return sorted(set(vals))


def _add_sparsify_flags(p: argparse.ArgumentParser, budget: bool = True) -> None:
    if budget:
        p.add_argument("--budget", type=float, default=0.05,
                       help="off-tree edges added per level, as a fraction of its node count")
    p.add_argument("--k", type=int, default=10, help="smoothed test vectors")
    p.add_argument("--sweeps", type=int, default=8, help="Gauss-Seidel sweeps per vector")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--max-cluster", type=int, default=8)
    p.add_argument("--coarsest", type=int, default=64, help="stop coarsening at this many nodes")
    p.add_argument("--score-embedding", choices=("sparsifier", "graph"), default="sparsifier")
    p.add_argument("--rounds", type=int, default=4, help="re-embedding rounds per level")


def _params(args, budget: float | None = None) -> SparsifyParams:
    ep = EmbedParams(k=args.k, sweeps=args.sweeps, seed=args.seed)
    cp = CoarsenParams(max_cluster_size=args.max_cluster, coarsest_size=args.coarsest, embed=ep)
    return SparsifyParams(
        budget_fraction=args.budget if budget is None else budget,
        score_embedding=args.score_embedding,
        rounds=args.rounds,
        embed=ep,
        coarsen=cp,
    )


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _need_outdir(args, what: str) -> None:
    if getattr(args, "plot", False) and not args.output:
        raise InputError(f"--plot needs -o to know where to write {what}")


# -- commands -----------------------------------------------------------------

def cmd_sparsify(args) -> int:
    g = load_graph(args.input)
    log.info("loaded %s: %d nodes, %d edges", args.input, g.num_nodes, g.num_edges)
    res = sf_grass(g, _params(args))
    out = _outdir(args.output)
    p = res.sparsifier
    write_edge_list(p.graph, out / "sparsifier.tsv", tags=p.tags())
    stats = {"schema_version": SCHEMA_VERSION, "input": str(args.input), "seed": args.seed,
             "budget_fraction": args.budget, "score_embedding": args.score_embedding}
    stats.update(res.stats)
    write_metrics(stats, out / "stats.json", indent=2)
    if args.export_hierarchy:
        write_hierarchy(res.hierarchy, out / "hierarchy")
    if args.plot:
        from .plotting import plot_sampling
        plot_sampling(res.levels, out / "sampling.png")
    log.info("wrote %s", out)
    return 0


def _load_sparsifier(g, path) -> Sparsifier:
    sub, meta = read_edge_list(path, num_nodes=g.num_nodes)
    return Sparsifier.from_subgraph(g, sub, meta.tags)


def cmd_condnum(args) -> int:
    g = load_graph(args.graph)
    p = _load_sparsifier(g, args.sparsifier)
    pencil = relative_condition_number(g, p, method=args.method, tol=args.tol, maxiter=args.maxiter)
    if not pencil.converged:
        log.warning("iterative estimate did not reach tolerance %g", args.tol)
    write_metrics(pencil.as_dict(), sys.stdout)
    return 0


def cmd_sweep(args) -> int:
    _need_outdir(args, "the figure")
    g = load_graph(args.graph)
    rows = []
    for b in args.budgets:
        res = sf_grass(g, _params(args, budget=b))
        pencil = relative_condition_number(g, res.sparsifier, method=args.method)
        rows.append((b, res.sparsifier.num_off_tree, pencil.kappa))
        log.info("budget %g: %d off-tree edges, kappa %.6g", *rows[-1])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["budget_fraction", "off_tree_edges", "kappa"])
    w.writerows((repr(b), n, repr(k)) for b, n, k in rows)
    if args.output:
        out = _outdir(args.output)
        (out / "sweep.csv").write_text(buf.getvalue(), encoding="utf-8")
        if args.plot:
            from .plotting import plot_sweep
            plot_sweep([r[1] for r in rows], [r[2] for r in rows], out / "sweep.png")
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_pcg(args) -> int:
    _need_outdir(args, "the figure")
    g = load_graph(args.matrix)
    t0 = time.perf_counter()
    if args.precond in ("sparsifier", "tree"):
        p = sf_grass(g, _params(args)).sparsifier
        if args.precond == "tree":
            p = p.tree()
        M = make_preconditioner("factor", g, p.graph)
    else:
        M = make_preconditioner(args.precond, g)
    t1 = time.perf_counter()
    b = random_rhs(g, args.seed)
    res = laplacian_pcg(g, b, M, tol=args.tol, maxiter=args.maxiter)
    t2 = time.perf_counter()
    if not res.converged:
        log.warning("PCG stopped after %d iterations at relres %.3g", res.iterations,
                    res.relative_residual)
    if args.output:
        out = _outdir(args.output)
        with open(out / "residuals.csv", "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "relres"])
            w.writerows((i, repr(r)) for i, r in enumerate(res.residual_history))
        if args.plot:
            from .plotting import plot_residuals
            plot_residuals({args.precond: res.residual_history}, out / "residuals.png", args.tol)
    write_metrics({
        "precond": args.precond,
        "iterations": res.iterations,
        "relres": res.relative_residual,
        "converged": res.converged,
        "setup_time": t1 - t0,
        "solve_time": t2 - t1,
    }, sys.stdout)
    return 0


_GEN = {
    "grid2d": (generators.grid2d, (1, 2)),
    "grid3d": (generators.grid3d, (1, 3)),
    "path": (generators.path, (1, 1)),
    "complete": (generators.complete, (1, 1)),
}


def cmd_gen(args) -> int:
    fn, (lo, hi) = _GEN[args.kind]
    if not lo <= len(args.size) <= hi:
        raise InputError(f"{args.kind} takes {lo} to {hi} size values")
    if any(s < 1 for s in args.size):
        raise InputError("sizes must be positive")
    if int(np.prod(args.size, dtype=object)) > generators.MAX_NODES:
        raise InputError(f"graph exceeds the {generators.MAX_NODES} node limit")
    if args.kind == "complete" and args.size[0] > 20_000:
        raise InputError("complete graph too large")
    g = fn(*args.size)
    if args.output:
        write_edge_list(g, args.output)
    else:
        write_edge_list(g, sys.stdout)
    return 0


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sfgrass", description="Solver-free multilevel spectral graph sparsification.")
    ap.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sparsify", help="build a sparsifier and write it with per-level stats")
    p.add_argument("input", help=".mtx matrix or TSV edge list")
    _add_sparsify_flags(p)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--export-hierarchy", action="store_true",
                   help="also write every level graph and aggregation map")
    p.add_argument("--plot", action="store_true", help="write sampling.png")
    p.set_defaults(func=cmd_sparsify)

    p = sub.add_parser("condnum", help="relative condition number of a graph and a sparsifier")
    p.add_argument("graph")
    p.add_argument("sparsifier", help="TSV edge list, optional tree/offtree tag column")
    p.add_argument("--method", choices=("dense", "iterative", "auto"), default="auto")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--maxiter", type=int, default=500)
    p.set_defaults(func=cmd_condnum)

    p = sub.add_parser("sweep", help="condition number over a list of budgets (CSV)")
    p.add_argument("graph")
    p.add_argument("--budgets", type=_budgets, default=[0.0, 0.02, 0.05, 0.1, 0.2, 0.3],
                   help="comma-separated budget fractions")
    _add_sparsify_flags(p, budget=False)
    p.add_argument("--method", choices=("dense", "iterative", "auto"), default="auto")
    p.add_argument("-o", "--output", help="write sweep.csv here instead of stdout")
    p.add_argument("--plot", action="store_true", help="write sweep.png (needs -o)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pcg", help="solve a seeded Laplacian system with PCG")
    p.add_argument("matrix")
    p.add_argument("--precond", choices=("sparsifier", "tree", "jacobi", "none"),
                   default="sparsifier")
    _add_sparsify_flags(p)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--maxiter", type=int, default=1000)
    p.add_argument("-o", "--output", help="write residuals.csv here")
    p.add_argument("--plot", action="store_true", help="write residuals.png (needs -o)")
    p.set_defaults(func=cmd_pcg)

    p = sub.add_parser("gen", help="write a synthetic unit-weight graph as TSV")
    p.add_argument("kind", choices=sorted(_GEN))
    p.add_argument("size", type=int, nargs="+")
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen)
    return ap


def _setup_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("SFGRASS_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="sfgrass: %(levelname)s: %(message)s")


def _set_threads(n: int | None) -> None:
    if n is None:
        return
    if n < 1:
        raise InputError("--threads must be >= 1")
    import numba

    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER = "workqueue"  # always available
    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        _set_threads(args.threads)
        return args.func(args)
    except (InputError, OSError) as exc:
        print(f"sfgrass: error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"sfgrass: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
