"""Command-line pipelines: generate instances, build spanners, extract separators, verify, scale."""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import oracle
from .cgmz import CgmzConfig, cgmz_step1, cgmz_step2
from .generators import (
    CantorDust,
    ExpSpreadLine,
    Grid,
    UbgUniform,
    Uniform,
    generator_from_dict,
    generator_to_dict,
)
from .greedy import GreedyConfig, greedy_spanner
from .io import fmt_float, read_graph, read_metric, write_graph, write_json, write_metric
from .metric import MetricKind, PackingParams, build_net_tree, estimate_fractal_dimension, load_and_normalize
from .separator import SeparatorConfig, Variant, extract_separator, recursive_decompose

OUT_ENV = "LANKYSEP_OUT"
ALGORITHMS = ("greedy", "cgmz")
CHECKS = ("stretch", "spanner_property", "separator", "lankiness", "weak_lankiness", "thinness", "cone", "mst", "edge_count", "fractal")
DEFAULT_CHECKS = ("stretch", "spanner_property", "separator", "lankiness")
SUMMARY_FIELDS = ("n", "edges", "max_degree", "tau", "kappa", "separator_size", "largest_component_fraction", "wall_time")


@dataclass
class ExperimentSpec:
    generator: object
    algorithm: str = "greedy"
    eps: float = 0.5
    variant: str = "lanky"
    lam: float | None = None
    dim: int | None = None
    seed: int = 0
    resample_budget: int = 16
    checks: list = field(default_factory=lambda: list(DEFAULT_CHECKS))

    def __post_init__(self):
        if isinstance(self.generator, dict):
            self.generator = generator_from_dict(self.generator)
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if not (0 < self.eps <= 0.5):
            raise ValueError(f"eps must lie in (0, 1/2], got {self.eps}")
        Variant(self.variant)
        unknown = set(self.checks) - set(CHECKS)
        if unknown:
            raise ValueError(f"unknown checks {sorted(unknown)}")

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentSpec":
        obj = dict(obj)
        sep = obj.pop("separator", {}) or {}
        for k in ("variant", "lam", "seed", "resample_budget"):
            if k in sep:
                obj.setdefault(k, sep[k])
        return cls(**obj)

    def to_json(self) -> dict:
        return {
            "generator": generator_to_dict(self.generator),
            "algorithm": self.algorithm,
            "eps": self.eps,
            "dim": self.dim,
            "separator": {"variant": self.variant, "lam": self.lam, "seed": self.seed, "resample_budget": self.resample_budget},
            "checks": list(self.checks),
        }


def _dim_of(m, fallback: int | None) -> int:
    if fallback is not None:
        return fallback
    return m.dim if m.dim is not None else 1


def packing_params(m, dim: int | None, lam: float | None) -> PackingParams:
    return PackingParams(d=_dim_of(m, dim), lam=lam)


def build_spanner(m, algorithm: str, eps: float):
    """Returns ``(graph, oriented)``; ``oriented`` is ``None`` for the greedy spanner."""
    if algorithm == "greedy":
        return greedy_spanner(m, GreedyConfig(eps)), None
    cfg = CgmzConfig(eps)
    os_ = cgmz_step2(cgmz_step1(m, build_net_tree(m), cfg), cfg)
    return os_.g2, os_


def stretch_bound(algorithm: str, eps: float) -> float:
    return 1 + eps if algorithm == "greedy" else 1 + 4 * eps


def fractal_radii(m) -> list[tuple[float, float]]:
    top = max(2, int(math.floor(math.log2(max(m.spread, 2.0)))) - 1)
    return [(0.5, 2.0**k) for k in range(1, top + 1)]


def spanner_checks(m, g, oriented, algorithm: str, eps: float) -> list[oracle.CheckReport]:
    reps = [oracle.verify_stretch(g, m, stretch_bound(algorithm, eps))]
    if algorithm == "greedy":
        reps.append(oracle.verify_greedy_edge_property(g, m, 1 + eps))
    else:
        reps.append(oracle.verify_reroute_claims(m, oriented.reroute_log, eps))
    return reps


def run_experiment(spec: ExperimentSpec, out: Path | None = None, fmt: str = "json") -> tuple[int, dict, list]:
    """Run one pipeline.  Returns ``(exit_code, summary_row, reports)`` and writes artifacts to ``out``."""
    t0 = time.perf_counter()
    m = spec.generator.build()
    g, oriented = build_spanner(m, spec.algorithm, spec.eps)
    checks = set(spec.checks)
    # the spanner is always re-validated before anything is built on it
    reports: list[oracle.CheckReport] = spanner_checks(m, g, oriented, spec.algorithm, spec.eps)
    spanner_ok = all(r.passed for r in reports)

    row = {"n": m.n, "edges": g.m, "max_degree": g.max_degree()}
    res = None
    params = packing_params(m, spec.dim, spec.lam)
    if spanner_ok and "separator" in checks and m.n >= 2:
        cfg = SeparatorConfig(params, Variant(spec.variant), spec.resample_budget, spec.seed)
        res = extract_separator(g, m, cfg)
        rep = oracle.verify_separator(res, g, m, params)
        reports.append(rep)
        row["separator_size"] = len(res.s)
        row["largest_component_fraction"] = (res.components[0] / m.n) if res.components else 0.0
    if spanner_ok:
        if "lankiness" in checks:
            rep = oracle.measure_lankiness(g, m)
            reports.append(rep)
            row["tau"] = rep.measured
        if "weak_lankiness" in checks:
            reports.append(oracle.measure_weak_lankiness(g, m))
        if "thinness" in checks:
            rep = oracle.measure_thinness(g, m, random_pairs=1000, seed=spec.seed)
            reports.append(rep)
            row["kappa"] = rep.measured
        if "cone" in checks and m.dim == 2 and m.kind is not MetricKind.MATRIX:
            reports.append(oracle.verify_cone_property(g, m, spec.eps, seed=spec.seed))
        if "mst" in checks:
            reports.append(oracle.verify_mst_containment(g, m))
        if "edge_count" in checks:
            reports.append(oracle.count_edges(g))
        if "fractal" in checks and m.kind is not MetricKind.MATRIX:
            est = estimate_fractal_dimension(m, fractal_radii(m))
            target = getattr(spec.generator, "exponent", None)
            passed = target is None or abs(est - target) <= 0.3
            reports.append(oracle.CheckReport("fractal_dimension", passed, est, target))
    row["wall_time"] = time.perf_counter() - t0
    code = 0 if all(r.passed for r in reports) else 1

    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_json(spec.to_json(), out / "spec.json")
        write_metric(m, out / f"instance.{fmt}")
        write_graph(g, out / f"spanner.{fmt}")
        if oriented is not None:
            write_json(oriented.reroute_log.records(), out / "reroute_log.json")
        if res is not None:
            write_json(res.to_json(), out / "separator.json")
        (out / "checks.jsonl").write_text("".join(r.to_json() + "\n" for r in reports))
        (out / "summary.csv").write_text(summary_csv([row]))
    return code, row, reports


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def summary_csv(rows: list[dict], fields=SUMMARY_FIELDS) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_cell(r.get(k)) for k in fields])
    return buf.getvalue()


def with_size(gen, n: int):
    """Same generator family at (roughly) ``n`` points."""
    if isinstance(gen, Grid):
        return replace(gen, k=max(1, round(n ** (1.0 / gen.d))))
    if isinstance(gen, (Uniform, UbgUniform, ExpSpreadLine)):
        return replace(gen, n=n)
    if isinstance(gen, CantorDust):
        return replace(gen, depth=max(1, round(math.log(n) / math.log(2**gen.d - 1))))
    raise ValueError(f"{type(gen).__name__} has no size parameter")


def fit_slope(ns, values) -> float | None:
    ns = np.asarray(ns, dtype=float)
    vals = np.asarray(values, dtype=float)
    if len(set(ns.tolist())) < 2 or np.any(vals <= 0):
        return None
    slope, _ = np.polyfit(np.log(ns), np.log(vals), 1)
    return float(slope)


def scaling(spec: ExperimentSpec, sizes, seeds: int = 1) -> tuple[list[dict], float | None]:
    """Median separator size over ``seeds`` runs per size, plus the log-log slope."""
    rows = []
    for n in sizes:
        t0 = time.perf_counter()
        m = with_size(spec.generator, n).build()
        g, _ = build_spanner(m, spec.algorithm, spec.eps)
        params = packing_params(m, spec.dim, spec.lam)
        sizes_s = []
        for k in range(seeds):
            cfg = SeparatorConfig(params, Variant(spec.variant), spec.resample_budget, spec.seed + k)
            sizes_s.append(len(extract_separator(g, m, cfg).s))
        rows.append(
            {
                "n": m.n,
                "edges": g.m,
                "max_degree": g.max_degree(),
                "separator_size": float(np.median(sizes_s)),
                "wall_time": time.perf_counter() - t0,
            }
        )
    slope = fit_slope([r["n"] for r in rows], [r["separator_size"] for r in rows])
    return rows, slope


# command handlers


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or ".")


def _generator_from_args(args):
    kind = args.family
    if kind == "grid":
        return Grid(args.k, args.dim or 2)
    if kind == "uniform":
        return Uniform(args.n, args.dim or 2, args.seed)
    if kind == "cantor":
        return CantorDust(args.depth, args.dim or 2)
    if kind == "expline":
        return ExpSpreadLine(args.n, args.base)
    return UbgUniform(args.n, args.dim or 2, args.mu, args.seed)


def _emit(reports, stream=None):
    stream = stream or sys.stdout
    for r in reports:
        stream.write(r.to_json() + "\n")


def cmd_generate(args) -> int:
    gen = _generator_from_args(args)
    m = gen.build()
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    path = write_metric(m, out / f"instance.{args.format}")
    print(path)
    return 0


def _load_instance(path):
    return load_and_normalize(read_metric(path))


def cmd_spanner(args) -> int:
    m = _load_instance(args.instance)
    g, oriented = build_spanner(m, args.algorithm, args.eps)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    print(write_graph(g, out / f"spanner.{args.format}"))
    if oriented is not None:
        print(write_json(oriented.reroute_log.records(), out / "reroute_log.json"))
    return 0


def cmd_separator(args) -> int:
    m = _load_instance(args.instance)
    g = read_graph(args.graph)
    params = packing_params(m, args.dim, args.lam)
    res = extract_separator(g, m, SeparatorConfig(params, Variant(args.variant), args.budget, args.seed))
    rep = oracle.verify_separator(res, g, m, params)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    write_json(res.to_json(), out / "separator.json")
    _emit([rep])
    return 0 if rep.passed else 1


def cmd_verify(args) -> int:
    m = _load_instance(args.instance)
    g = read_graph(args.graph)
    checks = args.checks or ["stretch", "spanner_property"]
    reports = []
    if "stretch" in checks:
        reports.append(oracle.verify_stretch(g, m, stretch_bound(args.algorithm, args.eps)))
    if "spanner_property" in checks and args.algorithm == "greedy":
        reports.append(oracle.verify_greedy_edge_property(g, m, 1 + args.eps))
    if "lankiness" in checks:
        reports.append(oracle.measure_lankiness(g, m))
    if "weak_lankiness" in checks:
        reports.append(oracle.measure_weak_lankiness(g, m))
    if "thinness" in checks:
        reports.append(oracle.measure_thinness(g, m, seed=args.seed))
    if "cone" in checks:
        reports.append(oracle.verify_cone_property(g, m, args.eps, seed=args.seed))
    if "mst" in checks:
        reports.append(oracle.verify_mst_containment(g, m))
    if "edge_count" in checks:
        reports.append(oracle.count_edges(g))
    _emit(reports)
    return 0 if all(r.passed for r in reports) else 1


def cmd_decompose(args) -> int:
    m = _load_instance(args.instance)
    g = read_graph(args.graph)
    params = packing_params(m, args.dim, args.lam)
    tree = recursive_decompose(g, m, SeparatorConfig(params, Variant(args.variant), args.budget, args.seed), args.leaf_size)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    print(write_json(tree.to_json(), out / "decomposition.json"))
    return 0


def _load_spec(path, args) -> ExperimentSpec:
    spec = ExperimentSpec.from_json(json.loads(Path(path).read_text()))
    if args.eps is not None:
        spec.eps = args.eps
    if args.seed is not None:
        spec.seed = args.seed
    if args.variant is not None:
        spec.variant = args.variant
    if args.lam is not None:
        spec.lam = args.lam
    if args.dim is not None:
        spec.dim = args.dim
    return spec


def cmd_run(args) -> int:
    spec = _load_spec(args.spec, args)
    code, row, reports = run_experiment(spec, _out_dir(args), args.format or "json")
    failed = [r for r in reports if not r.passed]
    _emit(failed, sys.stderr)
    sys.stdout.write(summary_csv([row]))
    return code


def cmd_scaling(args) -> int:
    spec = _load_spec(args.spec, args)
    rows, slope = scaling(spec, args.sizes, args.seeds)
    fields = ("n", "edges", "max_degree", "separator_size", "slope", "wall_time")
    for r in rows:
        r["slope"] = slope
    text = summary_csv(rows, fields)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scaling.csv").write_text(text)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lankysep", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt_default="json"):
        sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
        sp.add_argument("--format", choices=("json", "csv"), default=fmt_default)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--dim", type=int, default=None)

    def sep_opts(sp):
        sp.add_argument("--lambda", dest="lam", type=float, default=None, help="doubling constant (default 4*2^d)")
        sp.add_argument("--variant", choices=[v.value for v in Variant], default="lanky")
        sp.add_argument("--budget", type=int, default=16, help="number of radii drawn")

    g = sub.add_parser("generate", help="write an instance")
    g.add_argument("family", choices=("grid", "uniform", "cantor", "expline", "ubg"))
    g.add_argument("--k", type=int, default=8, help="grid side")
    g.add_argument("--n", type=int, default=256)
    g.add_argument("--depth", type=int, default=5)
    g.add_argument("--base", type=float, default=3.0)
    g.add_argument("--mu", type=float, default=1.0)
    common(g)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("spanner", help="build a spanner of an instance")
    s.add_argument("instance")
    s.add_argument("--algorithm", choices=ALGORITHMS, default="greedy")
    s.add_argument("--eps", type=float, default=0.5)
    common(s)
    s.set_defaults(func=cmd_spanner)

    sp = sub.add_parser("separator", help="extract and verify one separator")
    sp.add_argument("instance")
    sp.add_argument("graph")
    common(sp)
    sep_opts(sp)
    sp.set_defaults(func=cmd_separator)

    v = sub.add_parser("verify", help="run oracle checks, one JSON line each")
    v.add_argument("instance")
    v.add_argument("graph")
    v.add_argument("--algorithm", choices=ALGORITHMS, default="greedy")
    v.add_argument("--eps", type=float, default=0.5)
    v.add_argument("--checks", nargs="*", choices=CHECKS)
    common(v)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decompose", help="recursive separator tree")
    d.add_argument("instance")
    d.add_argument("graph")
    d.add_argument("--leaf-size", type=int, default=2)
    common(d)
    sep_opts(d)
    d.set_defaults(func=cmd_decompose)

    for name, func, helptext in (("run", cmd_run, "full pipeline from a JSON spec"), ("scaling", cmd_scaling, "separator size across sizes")):
        r = sub.add_parser(name, help=helptext)
        r.add_argument("spec")
        r.add_argument("--out")
        r.add_argument("--format", choices=("json", "csv"), default=None)
        r.add_argument("--eps", type=float, default=None)
        r.add_argument("--seed", type=int, default=None)
        r.add_argument("--dim", type=int, default=None)
        r.add_argument("--lambda", dest="lam", type=float, default=None)
        r.add_argument("--variant", choices=[x.value for x in Variant], default=None)
        if name == "scaling":
            r.add_argument("--sizes", type=int, nargs="+", default=[256, 1024, 4096])
            r.add_argument("--seeds", type=int, default=1)
        r.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
