"""Command-line entry point: ``plugkit {trace,verify,symbolic,asymptotics}``.

Configuration is a flat ``key = value`` file (``--config``); any key may be
overridden by a flag of the same name.  Every output starts with a
provenance header (version, config hash, seed).
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from . import geomcore as gc
from . import insertion as ins
from . import plflow as pl
from . import symbolic as sym
from .polygon import fmt, parse_fraction
from .suites import DEFAULTS, PLUGS, SUITES, InapplicableSuite, run_suite

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# config


def _coerce(key: str, raw: str):
    default = DEFAULTS.get(key)
    text = raw.strip()
    if isinstance(default, bool):
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"{key}: expected a boolean, got {raw!r}")
    try:
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError as exc:
        raise UsageError(f"{key}: {exc}") from None
    return text


def read_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def effective_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    cfg.update(read_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = _coerce(key, value)
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    if cfg["plug"] not in PLUGS:
        raise UsageError(f"unknown plug {cfg['plug']!r}; choose from {', '.join(PLUGS)}")
    for key in ("tol", "circle_eps", "step", "budget", "time_budget"):
        if not float(cfg[key]) > 0:
            raise UsageError(f"{key} must be positive")


def config_hash(cfg: dict, extra: dict | None = None) -> str:
    items = {**cfg, **(extra or {})}
    canon = "\n".join(f"{k}={items[k]}" for k in sorted(items))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def provenance(cfg: dict, extra: dict | None = None) -> dict:
    return {"version": __version__, "config_hash": config_hash(cfg, extra), "seed": int(cfg["seed"])}


def _header_lines(prov: dict) -> str:
    return f"# plugkit {prov['version']}\n# config_hash {prov['config_hash']}\n# seed {prov['seed']}\n"


def _num(x) -> str:
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _json_default(x):
    if isinstance(x, Fraction):
        return fmt(x)
    if hasattr(x, "value"):
        return x.value
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands


def parse_start(text: str) -> list[Fraction]:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) not in (2, 3) or any(not s for s in parts):
        raise UsageError(f"start must be 'r,theta' or 'r,theta,z', got {text!r}")
    try:
        return [parse_fraction(s) for s in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad start {text!r}: {exc}") from None


def _model(cfg: dict):
    name, inserted = cfg["plug"], bool(cfg["inserted"])
    if name == "w3":
        return ins.WilsonPlug(inserted)
    if name == "v9":
        return pl.v_plug(inserted)
    if name == "v9_double":
        return pl.build_double_cover() if inserted else pl.PLPlug(pl.symbolic_suspension(2), (), "v9_double-uninserted")
    if name == "pl_wilson":
        return pl.pl_wilson_plug(inserted)
    raise UsageError(f"plug {name} has no tracer; use verify --suite radius")


def _suspension(cfg: dict):
    return {
        "v9": lambda: pl.symbolic_suspension(1),
        "v9_double": lambda: pl.symbolic_suspension(2),
        "pl_wilson": lambda: pl.pl_wilson_plug(False).susp,
    }[cfg["plug"]]()


def cmd_trace(cfg: dict, start_text: str) -> tuple[str, int]:
    start = parse_start(start_text)
    prov = provenance(cfg, {"start": start_text})
    buf = io.StringIO()
    buf.write(_header_lines(prov))
    buf.write("t,r,theta,z,half,depth\n")
    plug = cfg["plug"]
    if len(start) == 3:
        if cfg["inserted"]:
            raise UsageError("a 3-coordinate start traces the plug without insertion; pass --inserted false")
        if plug == "w3":
            p0 = gc.CylPoint(float(start[0]), float(start[1]), float(start[2]))
            if not p0.in_bounds():
                raise UsageError(f"start {start_text} outside the support")
            tr = gc.integrate_leaf(gc.eval_wilson_field, p0, float(cfg["step"]), float(cfg["time_budget"]), concatenated=True)
            stride = max(1, len(tr.samples) // 2000)
            for t, q in tr.samples[::stride]:
                buf.write(f"{_num(t)},{_num(q.r)},{_num(q.theta_mod)},{_num(q.z)},{q.half.value},1\n")
            t, q = tr.samples[-1]
            buf.write(f"# event,{tr.termination.value},{_num(t)},{_num(q.r)},{_num(q.theta_mod)}\n")
            return buf.getvalue(), EXIT_PASS
        if plug not in ("v9", "v9_double", "pl_wilson"):
            raise UsageError(f"no tracer for {plug}")
        s = _suspension(cfg)
        try:
            tr = pl.trace_pl_leaf(s, start, int(cfg["crossings"]))
        except pl.DomainError as exc:
            raise UsageError(str(exc)) from None
        th0 = tr.start[1]
        buf.write(f"0,{fmt(tr.start[0])},{fmt(th0)},{fmt(tr.start[2])},lower,1\n")
        for a, b, r, z in tr.segments:
            z_end = z + s.slant * (b - a)
            buf.write(f"{fmt(b - th0)},{fmt(r)},{fmt(b % s.length)},{fmt(z_end)},lower,1\n")
        t_end = tr.segments[-1][1] - th0 if tr.segments else Fraction(0)
        if tr.exit_point:
            last = tr.exit_point
        elif tr.segments:
            last = (tr.segments[-1][2], tr.segments[-1][1])
        else:
            last = tr.start
        buf.write(f"# event,{tr.termination},{fmt(t_end)},{fmt(last[0])},{fmt(last[1] % s.length)}\n")
        if tr.theta_length is not None:
            buf.write(f"# theta_length,{fmt(tr.theta_length)}\n")
        return buf.getvalue(), EXIT_PASS
    model = _model(cfg)
    q = (float(start[0]), float(start[1])) if plug == "w3" else (start[0], start[1])
    try:
        h = ins.follow_leaf(
            model, q, int(cfg["max_transitions"]), int(cfg["max_depth"]), float(cfg["time_budget"]), record_samples=True
        )
    except (gc.DomainError, pl.DomainError) as exc:
        raise UsageError(str(exc)) from None
    for t, p, depth in h.samples:
        buf.write(f"{_num(t)},{_num(p[0])},{_num(p[1])},{_num(p[2])},{p[3] if isinstance(p[3], str) else p[3].value},{depth}\n")
    for e in h.events:
        buf.write(f"# event,{e.kind.value},{_num(e.time)},{_num(e.base_point[0])},{_num(e.base_point[1])}\n")
    buf.write(f"# event,{h.classification.value},{_num(h.time)},{_num(q[0])},{_num(q[1])}\n")
    return buf.getvalue(), EXIT_PASS


def cmd_verify(cfg: dict, suite: str) -> tuple[str, int]:
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    rep = run_suite(suite, cfg["plug"], cfg)
    body = {
        "provenance": provenance(cfg, {"suite": suite}),
        "suite": suite,
        "plug": cfg["plug"] if cfg["inserted"] else f"{cfg['plug']}-uninserted",
        "parameters": {k: cfg[k] for k in sorted(cfg)},
        "checks": [c.as_dict() for c in rep.checks],
        "pass": rep.passed,
        "data": rep.data,
    }
    text = json.dumps(body, indent=2, default=_json_default) + "\n"
    return text, EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_symbolic(cfg: dict, count: int) -> tuple[str, int]:
    if count < 1:
        raise UsageError("count must be >= 1")
    pairs = sym.followdisks(1, sym.INFINITY, pair_budget=count)
    return _header_lines(provenance(cfg, {"count": count})) + sym.format_pairs(pairs), EXIT_PASS


def asymptotics_table(n_max: int) -> tuple[list[gc.AsymptoticRecord], float]:
    recs = [gc.asymptotic_record(n) for n in range(n_max + 1)]
    return recs, gc.sup_gap_mod([r.theta_prime_n for r in recs])


def cmd_asymptotics(cfg: dict, n_max: int) -> tuple[str, int]:
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    recs, gap = asymptotics_table(n_max)
    buf = io.StringIO()
    buf.write(_header_lines(provenance(cfg, {"n_max": n_max})))
    buf.write("n,z_n,theta_n,r_n,theta_prime_n,theta_prime_mod10,ratio\n")
    for r in recs:
        ratio = r.theta_prime_n / gc.asymptotic_prediction(r.n)
        buf.write(
            f"{r.n},{r.z_n!r},{r.theta_n!r},{r.r_n!r},{r.theta_prime_n!r},{r.theta_prime_mod10!r},{ratio!r}\n"
        )
    buf.write(f"# sup_gap,{n_max},{gap!r}\n")
    return buf.getvalue(), EXIT_PASS


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--out", "-o", help="output file (default stdout)")
    for key, default in DEFAULTS.items():
        common.add_argument(f"--{key}", default=None, metavar=type(default).__name__.upper(), help=f"default {default}")

    parser = argparse.ArgumentParser(prog="plugkit", description="Aperiodic plug toolkit.")
    parser.add_argument("--version", action="version", version=f"plugkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("trace", parents=[common], help="trace one leaf to CSV")
    p.add_argument("start", help="'r,theta' (entry base point) or 'r,theta,z' (plug without insertion)")
    p = sub.add_parser("verify", parents=[common], help="run a verification suite, JSON report")
    p.add_argument("--suite", required=True, choices=SUITES)
    p = sub.add_parser("symbolic", parents=[common], help="print the symbolic sequence")
    p.add_argument("count", type=int, nargs="?", default=24)
    p = sub.add_parser("asymptotics", parents=[common], help="CSV of the return-time quantities")
    p.add_argument("rows", type=int, nargs="?", default=100, metavar="n_max", help="last n in the table")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        cfg = effective_config(args)
        if args.command == "trace":
            text, status = cmd_trace(cfg, args.start)
        elif args.command == "verify":
            text, status = cmd_verify(cfg, args.suite)
        elif args.command == "symbolic":
            text, status = cmd_symbolic(cfg, args.count)
        else:
            text, status = cmd_asymptotics(cfg, args.rows)
    except (UsageError, InapplicableSuite, gc.DomainError, pl.DomainError, OSError) as exc:
        print(f"plugkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(text, args.out)
    return status


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
