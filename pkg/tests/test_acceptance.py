"""Acceptance criteria 1-13, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import math
import random
import sys
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

from plugkit import geomcore as gc
from plugkit import insertion as ins
from plugkit import plflow as pl
from plugkit import symbolic as sym
from plugkit.cli import cmd_symbolic
from plugkit.plugalgebra import check_matched_ends, wilson_plug
from plugkit.suites import DEFAULTS, verify_annulus, verify_v_circle

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # running as a script
    ACCEPTANCE_LINES = []

GOLDEN = Path(__file__).resolve().parent.parent / "golden"

PRINTED = [
    (1, 2), (1, 1), (1, 1), (2, 1), (2, 1), (1, 4), (1, 2), (1, 1), (1, 1), (2, 1), (2, 1), (1, 3),
    (1, 2), (1, 1), (1, 1), (2, 1), (2, 1), (1, 2), (1, 1), (1, 1), (2, 1), (2, 1), (1, 1),
]


def record(n: int, ok: bool, detail: str, elapsed: float, limit: float) -> None:
    in_time = elapsed < limit
    status = "PASS" if ok and in_time else "FAIL"
    line = f"criterion {n}: {status}  {detail}  [{elapsed:.2f}s < {limit:g}s: {in_time}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert in_time, line


def test_criterion_01_golden_sequence():
    t = time.perf_counter()
    text, _ = cmd_symbolic(dict(DEFAULTS), 24)
    pairs = sym.parse_pairs(text)
    got = [(p.j, p.n) for p in pairs]
    golden = sym.parse_pairs((GOLDEN / "symbolic_24.txt").read_text())
    elapsed = time.perf_counter() - t
    # only 23 pairs are printed; the 24th is fixed by the exact double-cover trace
    geometry = sym.double_cover_entries(24)
    ok = len(got) == 24 and got[:23] == PRINTED and pairs == golden and pairs == geometry
    record(1, ok, f"23 printed pairs match, pair 24 = {pairs[23]} (geometry {geometry[23]})", elapsed, 1)


def test_criterion_02_radius_inequality():
    t = time.perf_counter()
    rep = ins.verify_radius_inequality(200)
    elapsed = time.perf_counter() - t
    record(2, rep.passed, "; ".join(f"{c.name}: {c.detail}" for c in rep.checks), elapsed, 1)


def test_criterion_03_integrator_vs_closed_form():
    t = time.perf_counter()
    ev = gc.theta_section(6.0, half=gc.Half.LOWER)
    budget = 10 * 10 + 6
    tr = gc.integrate_leaf(gc.eval_wilson_field, gc.CylPoint(0, 2, -1), 1e-3, budget, [ev])
    zs = [p.z for _, _, p in tr.events][:11]
    errs = [abs(z + (21 + 50 * n) ** -0.2) for n, z in enumerate(zs)]
    elapsed = time.perf_counter() - t
    ok = len(zs) == 11 and max(errs) < 1e-6
    record(3, ok, f"{len(zs)} crossings, max |z - z_n| = {max(errs):.2e}", elapsed, 10)


def _midpoint_oracle(n=400_000, cut=80.0):
    h = cut / n
    return sum(h / (1 + ((i + 0.5) * h) ** 6) for i in range(n)) + 1 / (5 * cut ** 5)


def test_criterion_04_A_infinity():
    t = time.perf_counter()
    a = gc.antiderivative_A(math.inf)
    elapsed = time.perf_counter() - t
    oracle = _midpoint_oracle()
    ok = abs(a - 1.0471975512) < 1e-9 and abs(a - oracle) < 1e-6
    record(4, ok, f"A(inf) = {a:.12f}, midpoint oracle {oracle:.9f}", elapsed, 1)


def test_criterion_05_asymptotics():
    t = time.perf_counter()
    recs = [gc.asymptotic_record(n) for n in range(10_001)]
    ratios = [r.theta_prime_n / gc.asymptotic_prediction(r.n) for r in recs[1000:]]
    worst = max(abs(x - 1) for x in ratios)
    gaps = [gc.sup_gap_mod([r.theta_prime_n for r in recs[: m + 1]]) for m in (100, 1000, 10_000)]
    elapsed = time.perf_counter() - t
    decreasing = gaps[0] > gaps[1] > gaps[2]
    ok = worst < 0.01 and decreasing
    detail = (
        f"ratio over n in [1000, 10000]: min {min(ratios):.4f}, max {max(ratios):.4f} (need within 0.01 of 1); "
        f"sup-gaps {', '.join(f'{g:.4g}' for g in gaps)} decreasing={decreasing}"
    )
    record(5, ok, detail, elapsed, 30)


def test_criterion_06_aperiodicity():
    t = time.perf_counter()
    grid = ins.uniform_grid(50, 50)
    rep = ins.verify_aperiodicity(ins.WilsonPlug(True), grid)
    control = ins.verify_aperiodicity(ins.WilsonPlug(False), grid)
    elapsed = time.perf_counter() - t
    found = control.data["candidates"]
    control_ok = bool(found) and all(c["frame_base"][0] == 0.0 for c in found)
    detail = "; ".join(f"{c.name}: {c.detail}" for c in rep.checks)
    record(6, rep.passed and control_ok, f"{detail}; control finds {len(found)} circles at r=0", elapsed, 120)


def test_criterion_07_stack_bound():
    t = time.perf_counter()
    grid = ins.uniform_grid(50, 50)
    parts, ok = [], True
    for eps in (0.1, 0.05):
        C, bound, seen, rep = ins.stack_height_bound(eps, grid)
        ok = ok and rep.passed
        parts.append(f"eps={eps}: C={C:.6g}, bound={bound}, observed={seen}, unfinished={rep.data['unfinished']}")
    elapsed = time.perf_counter() - t
    record(7, ok, "; ".join(parts), elapsed, 120)


def test_criterion_08_content_stopping():
    t = time.perf_counter()
    rep = ins.verify_content_stopping([-1 / 80, -1 / 40, -3 / 80])
    elapsed = time.perf_counter() - t
    detail = "; ".join(f"{c.name}: {c.detail}" for c in rep.checks) + f"; min depth {rep.data['min_depth']}"
    record(8, rep.passed, detail, elapsed, 120)


def test_criterion_09_pl_circles():
    t = time.perf_counter()
    annulus = verify_annulus(11, 20, 200, seed=0)
    circle = verify_v_circle()
    elapsed = time.perf_counter() - t
    detail = "; ".join(f"{c.name}: {c.detail}" for c in annulus.checks + circle.checks)
    record(9, annulus.passed and circle.passed, detail, elapsed, 10)


def test_criterion_10_symbolic_map():
    t = time.perf_counter()
    f = pl.build_symbolic_map()
    cont = f.continuity_violations()
    value, where = pl.min_z_displacement(f)
    pieces = {p.name: p for p in f.pieces}
    right_ok = pieces["right"].matrix == ((1, 0), (F(1, 2), 1)) and pieces["right"].offset == (0, F(-3, 2))
    left_ok = pieces["left"].matrix == ((1, 0), (-1, 1)) and pieces["left"].offset == (0, F(-3, 2))
    elapsed = time.perf_counter() - t
    ok = not cont and value == F(-3, 2) and where == [(0, 0)] and right_ok and left_ok and f.is_bijective()
    at = ", ".join(f"({a},{b})" for a, b in where)
    record(10, ok, f"continuity violations {len(cont)}, min displacement {value} at {at}, "
                   f"side pieces {right_ok and left_ok}", elapsed, 1)


def test_criterion_11_hierarchy():
    t = time.perf_counter()
    h = sym.build_hierarchy(k_max=2, n_max=6)
    rep = sym.cantor_cross_section_stats(h)
    elapsed = time.perf_counter() - t
    failed = [c.name for c in rep.checks if not c.passed]
    detail = f"disks per level {rep.data.get('disks')}, failed checks {failed}"
    record(11, rep.passed, detail, elapsed, 60)


def test_criterion_12_matching_laws():
    t = time.perf_counter()
    parts, ok = [], True
    for name, plug, draw in (
        ("W~", ins.WilsonPlug(True), lambda g: (g.uniform(-1, 1), g.uniform(0, 10))),
        ("V", pl.v_plug(True), lambda g: (F(g.randint(1, 250), 100), F(g.randint(0, 99), 100))),
    ):
        hist = ins.random_finite_histories(plug, 100, random.Random(0), draw)
        rep = ins.verify_matching_suite(plug, hist, 1e-6 if not plug.exact else 0.0)
        ok = ok and rep.passed and len(hist) == 100
        parts.append(f"{name}: " + ", ".join(c.detail for c in rep.checks))
    elapsed = time.perf_counter() - t
    record(12, ok, "; ".join(parts), elapsed, 120)


def test_criterion_13_matched_ends():
    t = time.perf_counter()
    rep = check_matched_ends(wilson_plug(), ins.uniform_grid(50, 50))
    elapsed = time.perf_counter() - t
    ok = rep.passed and bool(rep.stopped)
    record(13, ok, f"{len(rep.violations)} violations, {len(rep.stopped)} stopped, "
                   f"{rep.matched} matched, max error {rep.max_error:.2e}", elapsed, 60)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
