"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` (the lines are also shown
without ``-s``; they bypass output capture).
"""
import math
import time

import numpy as np
import pytest

from lankysep.cgmz import CgmzConfig, cgmz_step1, cgmz_step2
from lankysep.generators import CantorDust, ExpSpreadLine, Grid, UbgUniform, Uniform
from lankysep.greedy import GreedyConfig, greedy_spanner
from lankysep.metric import PackingParams, build_net_tree, build_wspd, load_and_normalize, matrix
from lankysep.oracle import (
    measure_lankiness,
    measure_lankiness_dense,
    measure_weak_lankiness,
    verify_cone_property,
    verify_greedy_edge_property,
    verify_reroute_claims,
    verify_separator,
    verify_stretch,
    wspd_edge_counts,
)
from lankysep.separator import SeparatorConfig, Variant, extract_separator

EPS = 0.5


class L1Matrix:
    """Random l1 point set handed over as a distance matrix only."""

    def __init__(self, n, seed, d=3):
        self.n, self.seed, self.d = n, seed, d

    def build(self):
        x = np.random.default_rng(self.seed).random((self.n, self.d))
        return load_and_normalize(matrix(np.abs(x[:, None, :] - x[None, :, :]).sum(axis=2)))

    def __repr__(self):
        return f"L1Matrix(n={self.n}, seed={self.seed})"


@pytest.fixture
def report(capsys):
    def emit(num, name, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {num} ({name}): {detail}")
        assert ok, f"criterion {num} failed: {detail}"

    return emit


def cgmz(m, eps=EPS):
    cfg = CgmzConfig(eps)
    return cgmz_step2(cgmz_step1(m, build_net_tree(m), cfg), cfg)


SMALL = [Grid(16), Grid(22), Uniform(400, 2, 1), Uniform(300, 3, 2), UbgUniform(300, 2, 1.0, 3), CantorDust(5), L1Matrix(300, 4), ExpSpreadLine(64, 9)]


def test_criterion_1_stretch(report):
    worst = []
    ok = True
    for gen in SMALL:
        m = gen.build()
        assert m.n <= 500
        t0 = time.perf_counter()
        g = greedy_spanner(m, GreedyConfig(EPS))
        rg = verify_stretch(g, m, 1 + EPS)
        ok &= rg.passed and time.perf_counter() - t0 <= 60
        line = f"{gen!r}: greedy {rg.measured:.4f}"
        if not isinstance(gen, UbgUniform):  # CGMZ spans the complete metric, not a unit ball host
            t0 = time.perf_counter()
            rc = verify_stretch(cgmz(m).g2, m, 1 + 4 * EPS)
            ok &= rc.passed and time.perf_counter() - t0 <= 60
            line += f", cgmz {rc.measured:.4f}"
        worst.append(line)
    report(1, "stretch <= 1+eps greedy, <= 1+4eps cgmz", ok, "; ".join(worst))


def test_criterion_2_greedy_edge_property(report):
    ok, parts = True, []
    for gen in SMALL:
        m = gen.build()
        rep = verify_greedy_edge_property(greedy_spanner(m, GreedyConfig(EPS)), m, 1 + EPS, strict=True)
        ok &= rep.passed
        parts.append(f"{gen!r} min detour ratio {rep.measured}")
    report(2, "greedy edge property", ok, "; ".join(parts))


SEP_FAMILIES = [Grid(16), Uniform(400, 2, 5), UbgUniform(300, 2, 1.0, 6), CantorDust(5), L1Matrix(200, 7), ExpSpreadLine(64, 9)]


def test_criterion_3_separator_validity(report):
    ok, runs, parts = True, 0, []
    for gen in SEP_FAMILIES:
        m = gen.build()
        g = greedy_spanner(m, GreedyConfig(EPS))
        params = PackingParams(m.dim or 1)
        bad = 0
        for variant in Variant:
            for seed in range(20):
                res = extract_separator(g, m, SeparatorConfig(params, variant, 16, seed))
                rep = verify_separator(res, g, m, params)
                runs += 1
                bad += not rep.passed
        ok &= bad == 0
        parts.append(f"{gen!r}: {bad} invalid of 40")
    report(3, "separator validity", ok, f"{runs} runs; " + "; ".join(parts))


def test_criterion_4_separator_scaling(report):
    t0 = time.perf_counter()
    ns, medians, ok = [], [], True
    for k in (16, 32, 64):
        m = Grid(k).build()
        g = greedy_spanner(m, GreedyConfig(EPS))
        params = PackingParams(2)
        sizes = [len(extract_separator(g, m, SeparatorConfig(params, rng_seed=s)).s) for s in range(10)]
        ok &= max(sizes) <= 10 * math.sqrt(m.n)
        ns.append(m.n)
        medians.append(float(np.median(sizes)))
    slope = float(np.polyfit(np.log(ns), np.log(medians), 1)[0])
    elapsed = time.perf_counter() - t0
    ok &= slope <= 0.65 and elapsed <= 600
    report(4, "separator size scaling", ok, f"n={ns} median |S|={medians} slope={slope:.3f} time={elapsed:.0f}s")


def test_criterion_5_cgmz_degree(report):
    degs, entries, holding = {}, 0, 0
    for n in (256, 1024, 4096):
        m = Uniform(n, 2, 0).build()
        os_ = cgmz(m)
        degs[n] = os_.g2.max_degree()
        rep = verify_reroute_claims(m, os_.reroute_log, EPS)
        entries += rep.notes["entries"]
        holding += rep.notes["holding"]
        del os_, m
    ratio = degs[4096] / degs[256]
    ok = ratio <= 1.5 and holding == entries
    report(5, "cgmz bounded degree", ok, f"max degree {degs} ratio {ratio:.2f} (bound 1.5); reroute claims {holding}/{entries}")


def test_criterion_6_one_edge_per_pair(report):
    ok, parts = True, []
    s = 4 / EPS
    for gen in [Uniform(400, 2, 8), Grid(20), Uniform(300, 3, 9), L1Matrix(300, 10), ExpSpreadLine(64, 3), CantorDust(5)]:
        m = gen.build()
        g = greedy_spanner(m, GreedyConfig(EPS))
        pairs = build_wspd(m, build_net_tree(m), s)
        worst = int(wspd_edge_counts(g, m, pairs).max())
        ok &= worst <= 1
        parts.append(f"{gen!r}: {len(pairs)} pairs, max {worst}")
    report(6, "one edge per 4/eps-separated pair", ok, "; ".join(parts))


def test_criterion_7_lankiness_stability(report):
    ok, parts = True, []
    for seed in range(5):
        taus = []
        for n in (256, 1024):
            m = Uniform(n, 2, seed).build()
            taus.append(measure_lankiness(greedy_spanner(m, GreedyConfig(EPS)), m, exact_limit=n).measured)
        ratio = taus[1] / taus[0]
        ok &= 0.5 <= ratio <= 2.0
        parts.append(f"seed {seed}: tau {taus[0]:.0f} -> {taus[1]:.0f}")
    report(7, "lankiness stability 256 vs 1024", ok, "; ".join(parts))


def test_criterion_8_cone_property(report):
    ok, parts = True, []
    for gen in [Uniform(400, 2, 11), Grid(16), CantorDust(5)]:
        m = gen.build()
        rep = verify_cone_property(greedy_spanner(m, GreedyConfig(EPS)), m, EPS, trials=100, seed=3)
        ok &= rep.passed
        parts.append(f"{gen!r}: {len(rep.witness or [])} violations, {rep.notes['configs_with_two_or_more_edges']} configs with >=2 edges")
    report(8, "cone property", ok, "; ".join(parts))


def test_criterion_9_weak_lankiness_spread(report):
    rows, valid = [], True
    for base in (3, 9, 81):
        m = ExpSpreadLine(64, base).build()
        g = greedy_spanner(m, GreedyConfig(EPS))
        weak = measure_weak_lankiness(g, m).measured
        params = PackingParams(1)
        for seed in range(10):
            res = extract_separator(g, m, SeparatorConfig(params, Variant.THIN, 16, seed))
            valid &= verify_separator(res, g, m, params).passed
        rows.append((math.log(m.spread), weak))
    taus = [w for _, w in rows]
    monotone = all(a <= b for a, b in zip(taus, taus[1:]))
    detail = ", ".join(f"log spread {ls:.1f}: weak tau {w:.0f}" for ls, w in rows)
    report(9, "weak lankiness vs log spread", monotone and valid, f"{detail}; thin separators valid={valid}")


def test_criterion_10_oracle_cross_validation(report):
    ok, parts = True, []
    cases = [(gen, "greedy") for gen in [Grid(10), Uniform(200, 2, 12), UbgUniform(150, 2, 1.0, 13), CantorDust(4), L1Matrix(120, 14), ExpSpreadLine(64, 3)]]
    cases += [(Uniform(40, 2, 15), "cgmz"), (L1Matrix(30, 16), "cgmz")]
    for gen, alg in cases:
        m = gen.build()
        assert m.n <= 200
        g = greedy_spanner(m, GreedyConfig(EPS)) if alg == "greedy" else cgmz(m).g2
        a = measure_lankiness(g, m).measured
        b = measure_lankiness_dense(g, m).measured
        ok &= a == b
        parts.append(f"{gen!r}/{alg}: {a:.0f} vs {b:.0f}")
    report(10, "breakpoint vs dense-grid lankiness", ok, "; ".join(parts))
