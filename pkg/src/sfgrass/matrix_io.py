"""Matrix Market ingestion, edge-list TSV files and metrics JSON.

Matrices become graphs by the usual circuit/FEM convention: every nonzero
strictly below the diagonal turns into an edge whose weight is the absolute
value of the entry; pattern matrices get unit weights.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import (
    EntryCountMismatch,
    IndexOutOfBounds,
    MalformedHeader,
    NonSquareMatrix,
    ParseError,
    UnsupportedField,
)
from .graph import Graph

__all__ = [
    "MatrixMarket",
    "parse_matrix_market",
    "read_matrix_market",
    "matrix_to_laplacian_graph",
    "write_edge_list",
    "read_edge_list",
    "EdgeListMeta",
    "write_metrics",
    "sanitize_metrics",
    "load_graph",
    "write_hierarchy",
]


@dataclass(frozen=True)
class MatrixMarket:
    rows: np.ndarray  # 0-based
    cols: np.ndarray
    values: np.ndarray
    num_rows: int
    num_cols: int
    symmetric: bool
    pattern: bool

    @property
    def triples(self) -> list[tuple[int, int, float]]:
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist()))


def _as_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8", errors="replace")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data


def parse_matrix_market(source) -> MatrixMarket:
    """Parse a coordinate-format Matrix Market document.

    ``source`` may be in-memory text/bytes or a readable stream.
    """
    text = _as_text(source)
    lines = text.splitlines()
    if not lines:
        raise MalformedHeader("empty Matrix Market input")
    header = lines[0].split()
    if len(header) < 5 or header[0].lower() != "%%matrixmarket":
        raise MalformedHeader(f"bad header: {lines[0]!r}")
    obj, fmt, field, symmetry = (h.lower() for h in header[1:5])
    if obj != "matrix" or fmt != "coordinate":
        raise MalformedHeader(f"only 'matrix coordinate' is supported, got {obj} {fmt}")
    if field not in ("real", "integer", "pattern"):
        raise UnsupportedField(f"unsupported field {field!r}")
    if symmetry not in ("general", "symmetric"):
        raise UnsupportedField(f"unsupported symmetry {symmetry!r}")
    pattern = field == "pattern"

    body = iter(enumerate(lines[1:], start=2))
    size = None
    for lineno, line in body:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        if len(parts) != 3:
            raise MalformedHeader(f"line {lineno}: size line needs 3 integers")
        try:
            size = tuple(int(p) for p in parts)
        except ValueError:
            raise MalformedHeader(f"line {lineno}: size line needs 3 integers") from None
        break
    if size is None:
        raise MalformedHeader("missing size line")
    nrows, ncols, nnz = size

    want = 2 if pattern else 3
    rows, cols, vals = [], [], []
    for lineno, line in body:
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        if len(parts) < want:
            raise ParseError(f"expected {want} fields", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            x = 1.0 if pattern else float(parts[2])
        except ValueError:
            raise ParseError(f"cannot parse entry {s!r}", lineno) from None
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise IndexOutOfBounds(f"line {lineno}: entry ({i}, {j}) outside {nrows}x{ncols}")
        rows.append(i - 1)
        cols.append(j - 1)
        vals.append(x)
    if len(rows) != nnz:
        raise EntryCountMismatch(f"header declares {nnz} entries, found {len(rows)}")
    return MatrixMarket(
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(vals, dtype=np.float64),
        nrows,
        ncols,
        symmetry == "symmetric",
        pattern,
    )


def read_matrix_market(path) -> MatrixMarket:
    with open(path, "rb") as fh:
        return parse_matrix_market(fh)


def matrix_to_laplacian_graph(triples, num_rows: int, num_cols: int | None = None,
                              symmetric: bool = False) -> Graph:
    """Graph whose edge weights are ``|A(p, q)|`` for ``p > q``.

    ``triples`` is a :class:`MatrixMarket` or an iterable of 0-based
    ``(row, col, value)``.  For symmetric storage an entry written in the
    upper triangle stands for its mirror image and is transposed first.
    """
    if isinstance(triples, MatrixMarket):
        mm = triples
        r, c, x = mm.rows, mm.cols, mm.values
        symmetric = mm.symmetric
    else:
        arr = np.asarray(list(triples), dtype=np.float64).reshape(-1, 3)
        r, c, x = arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2]
    if num_cols is None:
        num_cols = num_rows
    if num_rows != num_cols:
        raise NonSquareMatrix(f"matrix is {num_rows}x{num_cols}")
    if symmetric:
        r, c = np.maximum(r, c), np.minimum(r, c)
    lower = (r > c) & (x != 0)
    return Graph.from_arrays(num_rows, r[lower], c[lower], np.abs(x[lower]))


# -- edge lists -------------------------------------------------------------

def _fmt_weight(w: float) -> str:
    s = repr(float(w))
    return s[:-2] if s.endswith(".0") else s


def write_edge_list(g: Graph, sink, tags=None) -> None:
    """Write ``u<TAB>v<TAB>w`` lines (``u < v``, lexicographic).

    A leading ``# nodes N`` comment keeps trailing isolated nodes across a
    round trip.  ``tags`` optionally adds a fourth column per edge.
    """
    own = isinstance(sink, (str, os.PathLike))
    fh = open(sink, "w", encoding="utf-8") if own else sink
    try:
        fh.write(f"# nodes {g.num_nodes}\n")
        us, vs, ws = g.u.tolist(), g.v.tolist(), g.w.tolist()
        if tags is None:
            fh.writelines(f"{a}\t{b}\t{_fmt_weight(c)}\n" for a, b, c in zip(us, vs, ws))
        else:
            fh.writelines(
                f"{a}\t{b}\t{_fmt_weight(c)}\t{t}\n" for a, b, c, t in zip(us, vs, ws, tags)
            )
    finally:
        if own:
            fh.close()


@dataclass
class EdgeListMeta:
    dropped_self_loops: int = 0
    declared_nodes: int | None = None
    tags: list[str] | None = None


def read_edge_list(source, num_nodes: int | None = None) -> tuple[Graph, EdgeListMeta]:
    """Read a TSV edge list written by :func:`write_edge_list`.

    Self-loops are dropped and counted in the returned metadata.  An optional
    fourth column (e.g. ``tree``/``offtree``) is collected as ``meta.tags``.
    """
    own = isinstance(source, (str, os.PathLike))
    fh = open(source, "r", encoding="utf-8") if own else source
    meta = EdgeListMeta()
    us, vs, ws, tags = [], [], [], []
    try:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#") or s.startswith("%"):
                parts = s.lstrip("#%").split()
                if len(parts) == 2 and parts[0] == "nodes":
                    try:
                        meta.declared_nodes = int(parts[1])
                    except ValueError:
                        raise ParseError(f"bad node count {parts[1]!r}", lineno) from None
                continue
            parts = s.split()
            if len(parts) not in (2, 3, 4):
                raise ParseError(f"expected 'u v w', got {s!r}", lineno)
            try:
                a, b = int(parts[0]), int(parts[1])
                c = float(parts[2]) if len(parts) >= 3 else 1.0
            except ValueError:
                raise ParseError(f"cannot parse {s!r}", lineno) from None
            if a < 0 or b < 0:
                raise ParseError("negative node id", lineno)
            if not math.isfinite(c) or c < 0:
                raise ParseError(f"weight must be finite and non-negative, got {c!r}", lineno)
            if a == b:
                meta.dropped_self_loops += 1
                continue
            us.append(a)
            vs.append(b)
            ws.append(c)
            if len(parts) == 4:
                tags.append(parts[3])
    finally:
        if own:
            fh.close()
    n = num_nodes
    if n is None:
        n = meta.declared_nodes
    if n is None:
        n = (max(max(us), max(vs)) + 1) if us else 0
    g = Graph.from_arrays(n, us, vs, ws)
    if tags:
        if len(tags) != len(us):
            raise ParseError("tag column present on some lines only")
        # align with the canonical (sorted, merged) edge order
        aligned = [""] * g.num_edges
        for i, t in zip(g.edge_index(us, vs).tolist(), tags):
            aligned[i] = t
        meta.tags = aligned
    return g, meta


def load_graph(path) -> Graph:
    """Load a ``.mtx`` matrix (converted to a graph) or a TSV edge list."""
    path = os.fspath(path)
    if path.lower().endswith(".mtx"):
        mm = read_matrix_market(path)
        return matrix_to_laplacian_graph(mm, mm.num_rows, mm.num_cols)
    return read_edge_list(path)[0]


def write_hierarchy(hierarchy, directory) -> list[str]:
    """Write ``level_<l>.tsv`` per graph and ``map_<l>.tsv`` per coarsening step.

    Map files hold ``fine_node<TAB>cluster`` lines for the step from level
    ``l`` to ``l + 1``.  Returns the written file names.
    """
    os.makedirs(directory, exist_ok=True)
    names = []
    for lvl, g in enumerate(hierarchy.graphs):
        name = f"level_{lvl}.tsv"
        write_edge_list(g, os.path.join(directory, name))
        names.append(name)
    for lvl, m in enumerate(hierarchy.maps):
        name = f"map_{lvl}.tsv"
        with open(os.path.join(directory, name), "w", encoding="utf-8") as fh:
            fh.write("fine_node\tcluster\n")
            fh.writelines(f"{i}\t{c}\n" for i, c in enumerate(m.fine_to_coarse.tolist()))
        names.append(name)
    return names


# -- metrics JSON -------------------------------------------------------------

def sanitize_metrics(report: Any, warnings: list[str] | None = None, path: str = "$"):
    """Replace non-finite floats by ``None`` and record where they were."""
    if warnings is None:
        warnings = []
    if isinstance(report, dict):
        return {str(k): sanitize_metrics(v, warnings, f"{path}.{k}") for k, v in report.items()}
    if isinstance(report, (list, tuple)):
        return [sanitize_metrics(v, warnings, f"{path}[{i}]") for i, v in enumerate(report)]
    if isinstance(report, np.ndarray):
        return sanitize_metrics(report.tolist(), warnings, path)
    if isinstance(report, (np.bool_,)):
        return bool(report)
    if isinstance(report, np.integer):
        return int(report)
    if isinstance(report, (float, np.floating)):
        x = float(report)
        if not math.isfinite(x):
            warnings.append(f"{path}: non-finite value {x!r} written as null")
            return None
        return x
    return report


def write_metrics(report: dict, sink=None, indent: int | None = None) -> str:
    """Serialize ``report`` as one JSON document; returns the text.

    Non-finite numbers become ``null`` and a ``"warnings"`` list is appended.
    """
    warnings: list[str] = []
    clean = sanitize_metrics(report, warnings)
    if warnings:
        clean = dict(clean)
        clean["warnings"] = list(clean.get("warnings", [])) + warnings
    sep = (",", ":") if indent is None else (",", ": ")
    text = json.dumps(clean, indent=indent, separators=sep, allow_nan=False)
    if sink is not None:
        if isinstance(sink, (str, os.PathLike)):
            with open(sink, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        else:
            sink.write(text + "\n")
    return text
