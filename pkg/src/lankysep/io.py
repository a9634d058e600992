"""Reading and writing instances, graphs and reports.

Point sets:  JSON ``{"dim": d, "points": [[...], ...]}`` (``"mu"`` added for
unit ball graphs) or CSV with one point per row.  Distance matrices: JSON
``{"matrix": [[...], ...]}`` or CSV whose first line is ``# kind=matrix``.
Graphs: JSON ``{"n": n, "edges": [[u, v, w], ...]}`` or CSV ``u,v,w`` rows
under a ``# n=<n>`` line.  Weights are written with 17 significant digits so
they round-trip exactly.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .graph import WeightedGraph
from .metric import MetricInput, MetricKind, euclidean, matrix, unit_ball

__all__ = ["read_metric", "write_metric", "read_graph", "write_graph", "write_json", "fmt_float"]


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_format(path: Path, fmt: str | None) -> str:
    fmt = fmt or path.suffix.lstrip(".").lower()
    if fmt not in ("json", "csv"):
        raise ValueError(f"unsupported format {fmt!r} for {path}")
    return fmt


def read_metric(path, fmt: str | None = None) -> MetricInput:
    path = Path(path)
    fmt = _fmt_format(path, fmt)
    if fmt == "json":
        obj = json.loads(path.read_text())
        if "matrix" in obj:
            return matrix(np.asarray(obj["matrix"], dtype=float))
        pts = np.asarray(obj["points"], dtype=float).reshape(len(obj["points"]), -1)
        if "dim" in obj and pts.shape[1] != int(obj["dim"]):
            raise ValueError(f"points have dimension {pts.shape[1]}, header says {obj['dim']}")
        if obj.get("mu") is not None:
            return unit_ball(pts, float(obj["mu"]))
        return euclidean(pts)

    lines = path.read_text().splitlines()
    header = {}
    if lines and lines[0].startswith("#"):
        for tok in lines[0][1:].split():
            k, _, v = tok.partition("=")
            header[k] = v
        lines = lines[1:]
    rows = [[float(x) for x in r] for r in csv.reader(lines) if r]
    arr = np.asarray(rows, dtype=float)
    kind = header.get("kind", "euclidean")
    if kind == "matrix":
        return matrix(arr)
    if kind == "unit_ball":
        return unit_ball(arr, float(header["mu"]))
    return euclidean(arr)


def write_metric(m: MetricInput, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = _fmt_format(path, fmt)
    if fmt == "json":
        if m.kind is MetricKind.MATRIX:
            obj = {"matrix": m.dist.tolist()}
        else:
            obj = {"dim": m.dim, "points": m.points.tolist()}
            if m.kind is MetricKind.UNIT_BALL:
                obj["mu"] = m.mu
        path.write_text(json.dumps(obj))
        return path
    with path.open("w", newline="") as fh:
        if m.kind is MetricKind.MATRIX:
            fh.write("# kind=matrix\n")
            rows = m.dist
        else:
            if m.kind is MetricKind.UNIT_BALL:
                fh.write(f"# kind=unit_ball mu={fmt_float(m.mu)}\n")
            rows = m.points
        w = csv.writer(fh)
        for r in rows:
            w.writerow([fmt_float(x) for x in r])
    return path


def read_graph(path, fmt: str | None = None) -> WeightedGraph:
    path = Path(path)
    fmt = _fmt_format(path, fmt)
    if fmt == "json":
        obj = json.loads(path.read_text())
        return WeightedGraph.from_edges(int(obj["n"]), [tuple(e) for e in obj["edges"]], **obj.get("flags", {}))
    lines = path.read_text().splitlines()
    if not lines or not lines[0].startswith("# n="):
        raise ValueError(f"{path}: graph CSV must start with '# n=<vertices>'")
    n = int(lines[0][4:])
    edges = [(int(a), int(b), float(w)) for a, b, w in csv.reader(lines[1:]) if a]
    return WeightedGraph.from_edges(n, edges)


def write_graph(g: WeightedGraph, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = _fmt_format(path, fmt)
    if fmt == "json":
        edges = [[a, b, w] for a, b, w in g.edges()]
        path.write_text(json.dumps({"n": g.n, "edges": edges, "flags": g.flags}))
        return path
    with path.open("w", newline="") as fh:
        fh.write(f"# n={g.n}\n")
        w = csv.writer(fh)
        for a, b, c in g.edges():
            w.writerow([a, b, fmt_float(c)])
    return path


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True))
    return path
