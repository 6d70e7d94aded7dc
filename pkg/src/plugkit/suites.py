"""Verification suites keyed by (suite, plug), shared by the CLI and the tests."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable

from . import insertion as ins
from . import plflow as pl
from . import symbolic as sym
from .insertion import Report
from .polygon import fmt
from .plugalgebra import check_matched_ends, wilson_plug

PLUGS = ("w3", "wn", "pl_wilson", "v9", "v9_double")
SUITES = ("radius", "matching", "aperiodic", "stackbound", "content", "annulus", "hierarchy", "matched_ends")

DEFAULTS: dict[str, object] = {
    "plug": "w3",
    "inserted": True,
    "seed": 0,
    "grid_r": 50,
    "grid_theta": 50,
    "max_transitions": 10_000,
    "max_depth": 100,
    "time_budget": 1e4,
    "circle_eps": 1e-4,
    "tol": 1e-6,
    "radius_grid": 200,
    "stack_eps": "0.1,0.05",
    "content_r": "-1/80,-1/40,-3/80",
    "content_theta": 50,
    "content_transitions": 1_000_000,
    "growth_threshold": 1,
    "histories": 100,
    "k_max": 2,
    "n_max": 6,
    "budget": 1e4,
    "step": 1e-3,
    "dim": 4,
    "pl_time_budget": 400,
    "pl_grid_r": 35,
    "pl_grid_theta": 10,
    "annulus_z": 11,
    "annulus_starts": 20,
    "crossings": 200,
}


class InapplicableSuite(ValueError):
    """The suite has no meaning for the chosen plug."""


def _plug_model(name: str, inserted: bool):
    if name == "w3":
        return ins.WilsonPlug(inserted)
    if name == "v9":
        return pl.v_plug(inserted)
    if name == "v9_double":
        return pl.build_double_cover() if inserted else pl.PLPlug(pl.symbolic_suspension(2), (), "v9_double-uninserted")
    if name == "pl_wilson":
        return pl.pl_wilson_plug(inserted)
    raise InapplicableSuite(f"no leaf tracer for plug {name}")


def _draw(name: str) -> Callable[[random.Random], tuple]:
    if name == "w3":
        return lambda rng: (rng.uniform(-1.0, 1.0), rng.uniform(0.0, 10.0))
    if name == "v9":
        return lambda rng: (Fraction(rng.randint(1, 250), 100), Fraction(rng.randint(0, 99), 100))
    if name == "v9_double":
        return lambda rng: (Fraction(rng.randint(1, 250), 100), Fraction(rng.randint(0, 199), 100))
    if name == "pl_wilson":
        return lambda rng: (Fraction(rng.randint(-100, 100), 200), Fraction(rng.randint(0, 199), 10))
    raise InapplicableSuite(f"no random starts for {name}")


def _floats(text) -> list[float]:
    return [float(Fraction(s.strip())) for s in str(text).split(",") if s.strip()]


def _pl_grid(name: str, nr: int, nt: int) -> list[tuple[Fraction, Fraction]]:
    if name in ("v9", "v9_double"):
        lo, hi, period = Fraction(-1), Fraction(5, 2), (1 if name == "v9" else 2)
    else:
        lo, hi, period = Fraction(-1), Fraction(1), 20
    return [(lo + (hi - lo) * k / nr, Fraction(period) * j / nt) for k in range(nr) for j in range(nt)]


def verify_sigma_v_radius(n: int = 20) -> Report:
    """Image radius against r on an exact grid of the wedge B."""
    rep = Report("radius")
    bad = []
    count = 0
    for i in range(n + 1):
        r = Fraction(5, 2) * i / n
        for j in range(n + 1):
            th = Fraction(1, 3) + r / 12 + (r / 4 - r / 12) * j / n
            R, _, _ = pl.sigma_v((r, th))
            count += 1
            x, y = pl.g_map((r, th))
            middle = -x < y < x / 2
            if (middle and R != r / 2) or (not middle and R > r / 2) or (r > 0 and not R < r) or (r == 0 and R != 0):
                bad.append((fmt(r), fmt(th), fmt(R)))
    rep.add("image_radius_at_most_half", not bad, f"{count} exact points, {len(bad)} violations {bad[:3]}")
    return rep


def verify_annulus(z_count: int = 11, starts: int = 20, crossings: int = 200, seed: int = 0) -> Report:
    """Closed leaves of length 20 through (0, 0, z), and no closure off the core."""
    rep = Report("annulus")
    s = pl.pl_wilson_plug(False).susp
    lengths = []
    for k in range(z_count):
        z = Fraction(-1) + Fraction(k, z_count - 1)
        tr = pl.trace_pl_leaf(s, (0, 0, z), crossings)
        lengths.append((z, tr.termination, tr.theta_length))
    ok = all(t == "closed_up" and L == 20 for _, t, L in lengths)
    rep.add("core_circles_length_20", ok, f"{z_count} starts, {sum(t == 'closed_up' for _, t, _ in lengths)} closed")
    rng = random.Random(seed)
    closed = []
    for _ in range(starts):
        r = Fraction(rng.choice([-1, 1]) * rng.randint(1, 200), 200)
        q = (r, Fraction(rng.randint(0, 199), 10), Fraction(rng.randint(-40, 40), 20))
        tr = pl.trace_pl_leaf(s, q, crossings)
        if tr.termination == "closed_up":
            closed.append(tuple(map(pl.fmt, q)))
    rep.add("no_closure_off_core", not closed, f"{starts} starts with r != 0, closures {closed}")
    rep.data.update(core=[(fmt(z), t, fmt(L) if L is not None else None) for z, t, L in lengths])
    return rep


def verify_v_circle() -> Report:
    rep = Report("annulus")
    tr = pl.trace_pl_leaf(pl.symbolic_suspension(1), (0, 0, Fraction(-3, 2)), 10)
    # the section at theta = 1 is theta = 0 again; (0, 1, 0) pre-map is (0, 0, -3/2) post-map
    through = ("section", (0, 0, 0)) in tr.events
    rep.add("circle_T_length_1", tr.termination == "closed_up" and tr.theta_length == 1,
            f"termination {tr.termination}, length {tr.theta_length}")
    first = ", ".join(f"{k} ({', '.join(fmt(c) for c in q)})" for k, q in tr.events[:2])
    rep.add("passes_0_1_0", through, f"events: {first}")
    return rep


def run_suite(suite: str, plug: str, params: dict) -> Report:
    p = {**DEFAULTS, **params}
    inserted = bool(p["inserted"])
    if suite not in SUITES:
        raise InapplicableSuite(f"unknown suite {suite}")
    if plug not in PLUGS:
        raise InapplicableSuite(f"unknown plug {plug}")

    if suite == "radius":
        if plug == "w3":
            return ins.verify_radius_inequality(int(p["radius_grid"]))
        if plug == "wn":
            return ins.verify_radius_inequality_n(int(p["dim"]))
        if plug == "pl_wilson":
            rep = Report("radius")
            bare = pl.pl_wilson_plug(False)
            problems = pl.verify_pl_wilson_sigma(pl.PLPlug(bare.susp, pl.build_pl_wilson_sigma()))
            rep.add("pl_sigma_checks", not problems, "; ".join(problems[:3]) or "all grid checks pass")
            return rep
        return verify_sigma_v_radius(int(p["radius_grid"]) // 10)
    if suite == "matching" and plug in ("w3", "v9", "v9_double", "pl_wilson"):
        model = _plug_model(plug, True)
        rng = random.Random(int(p["seed"]))
        budgets = dict(
            max_transitions=int(p["max_transitions"]),
            max_depth=int(p["max_depth"]),
            time_budget=float(p["time_budget"]),
        )
        hist = ins.random_finite_histories(model, int(p["histories"]), rng, _draw(plug), **budgets)
        rep = ins.verify_matching_suite(model, hist, float(p["tol"]))
        rep.checks[0].passed = len(hist) == int(p["histories"])
        return rep
    if suite == "aperiodic" and plug in ("w3", "v9", "v9_double"):
        model = _plug_model(plug, inserted)
        if plug == "w3":
            grid = ins.uniform_grid(int(p["grid_r"]), int(p["grid_theta"]))
            budget = float(p["time_budget"])
        else:
            grid = _pl_grid(plug, int(p["pl_grid_r"]), int(p["pl_grid_theta"]))
            budget = float(p["pl_time_budget"])
        return ins.verify_aperiodicity(
            model, grid, int(p["max_transitions"]), int(p["max_depth"]), budget, float(p["circle_eps"])
        )
    if suite == "stackbound" and plug == "w3":
        rep = Report("stackbound")
        grid = ins.uniform_grid(int(p["grid_r"]), int(p["grid_theta"]))
        for eps in _floats(p["stack_eps"]):
            C, bound, seen, sub = ins.stack_height_bound(
                eps, grid, ins.WilsonPlug(True), int(p["max_transitions"]), None, float(p["time_budget"])
            )
            for c in sub.checks:
                rep.add(f"{c.name}[eps={eps:g}]", c.passed, c.detail)
            rep.data[f"eps={eps:g}"] = {"C": C, "bound": bound, "observed_max": seen}
        return rep
    if suite == "content" and plug == "w3":
        return ins.verify_content_stopping(
            _floats(p["content_r"]),
            int(p["content_theta"]),
            int(p["content_transitions"]),
            int(p["max_depth"]),
            int(p["growth_threshold"]),
        )
    if suite == "annulus" and plug in ("pl_wilson", "v9"):
        if plug == "v9":
            return verify_v_circle()
        return verify_annulus(int(p["annulus_z"]), int(p["annulus_starts"]), int(p["crossings"]), int(p["seed"]))
    if suite == "hierarchy" and plug in ("v9", "v9_double"):
        h = sym.build_hierarchy(int(p["k_max"]), int(p["n_max"]))
        return sym.cantor_cross_section_stats(h)
    if suite == "matched_ends" and plug == "w3":
        rep = Report("matched_ends")
        grid = ins.uniform_grid(int(p["grid_r"]), int(p["grid_theta"]))
        res = check_matched_ends(wilson_plug(), grid, float(p["budget"]), float(p["step"]), float(p["tol"]))
        rep.add("no_violations", res.passed, f"{len(res.violations)} violations, max error {res.max_error:.3g}")
        rep.add("stopped_set_nonempty", bool(res.stopped), f"{len(res.stopped)} stopped grid points")
        rep.data.update(matched=res.matched, stopped=[list(q) for q in res.stopped[:10]])
        return rep
    raise InapplicableSuite(f"suite {suite} does not apply to plug {plug}")
