"""Flow bordisms as data: descriptors, mirror images, concatenation.

Descriptors are immutable records.  The numeric checks (longevity,
matched ends, stopped sets) dispatch on the descriptor's dynamics
reference; the analytic plug is the only one with a numeric tracer here,
the PL descriptors are traced exactly in :mod:`plugkit.plflow`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .geomcore import (
    PERIOD,
    CylPoint,
    DomainError,
    Half,
    Termination,
    eval_wilson_field,
    integrate_leaf,
)

INFINITE = math.inf  # sentinel for leaves that outlive the budget


class CompositionError(ValueError):
    """Two bordisms cannot be glued as requested."""


class ContractError(ValueError):
    """An operation was applied to a descriptor lacking what it needs."""


class RegionKind(str, Enum):
    ENTRY = "transverse_entry"
    EXIT = "transverse_exit"
    PARALLEL = "parallel"
    CORNER = "corner_separation"


@dataclass(frozen=True)
class BoundaryRegion:
    kind: RegionKind
    geometry: str   # e.g. "z=-1"
    base: str = ""  # shape of the transverse region, used to check gluing


@dataclass(frozen=True)
class Dynamics:
    kind: str          # "field" or "suspension"
    name: str          # "wilson", "symbolic", "collar"
    theta_sign: int = 1
    reflected: bool = False  # fibre coordinate replaced by its negative


@dataclass(frozen=True)
class FlowBordismDescriptor:
    name: str
    support: tuple
    dynamics: Dynamics
    boundary_regions: tuple[BoundaryRegion, ...]
    base_map_minus: Optional[str] = None
    base_map_plus: Optional[str] = None
    parts: tuple["FlowBordismDescriptor", ...] = ()

    @property
    def has_base_maps(self) -> bool:
        return self.base_map_minus is not None and self.base_map_plus is not None

    def region(self, kind: RegionKind) -> BoundaryRegion:
        for r in self.boundary_regions:
            if r.kind is kind:
                return r
        raise ContractError(f"{self.name} has no {kind.value} region")


def _regions(base: str, bottom: str, top: str, sides: str) -> tuple[BoundaryRegion, ...]:
    return (
        BoundaryRegion(RegionKind.ENTRY, bottom, base),
        BoundaryRegion(RegionKind.EXIT, top, base),
        BoundaryRegion(RegionKind.PARALLEL, sides, ""),
        BoundaryRegion(RegionKind.CORNER, f"{sides} meets {bottom}, {top}", ""),
    )


def wilson_semiplug() -> FlowBordismDescriptor:
    base = "[-1,1] x R/10"
    return FlowBordismDescriptor(
        "W_s",
        (("r", -1, 1, False), ("theta", 0, 10, True), ("z", -1, 1, False)),
        Dynamics("field", "wilson"),
        _regions(base, "z=-1", "z=1", "r=+-1"),
    )


def symbolic_semiplug() -> FlowBordismDescriptor:
    base = "[-1,5/2] x R/1"
    return FlowBordismDescriptor(
        "V_s",
        (("r", "-1", "5/2", False), ("theta", 0, 1, True), ("z", -3, "3/2", False)),
        Dynamics("suspension", "symbolic"),
        _regions(base, "z=-3", "z=3/2", "r=-1, r=5/2"),
    )


def collar_semiplug() -> FlowBordismDescriptor:
    base = "[-1,1] x R/20"
    return FlowBordismDescriptor(
        "W_PL,s",
        (("r", -1, 1, False), ("theta", 0, 20, True), ("z", -2, 2, False)),
        Dynamics("suspension", "collar"),
        _regions(base, "z=-2", "z=2", "r=+-1"),
    )


def mirror_image(d: FlowBordismDescriptor) -> FlowBordismDescriptor:
    """Reverse the leaves, then flip the fibre so entry sits at the bottom again.

    In the new coordinates the old exit region becomes the entry region and
    the theta component of the flow changes sign.
    """
    if d.parts:
        return replace(
            d,
            name=_mirror_name(d.name),
            parts=tuple(mirror_image(p) for p in reversed(d.parts)),
            base_map_minus=d.base_map_plus,
            base_map_plus=d.base_map_minus,
        )
    dyn = replace(d.dynamics, theta_sign=-d.dynamics.theta_sign, reflected=not d.dynamics.reflected)
    return replace(d, name=_mirror_name(d.name), dynamics=dyn)


def _mirror_name(name: str) -> str:
    return name[len("mirror(") : -1] if name.startswith("mirror(") else f"mirror({name})"


def concatenate(p: FlowBordismDescriptor, q: FlowBordismDescriptor) -> FlowBordismDescriptor:
    """Glue the exit region of ``p`` to the entry region of ``q``."""
    out_p = p.region(RegionKind.EXIT)
    in_q = q.region(RegionKind.ENTRY)
    if out_p.base != in_q.base:
        raise CompositionError(f"exit of {p.name} ({out_p.base}) does not match entry of {q.name} ({in_q.base})")
    matched = q == mirror_image(p)
    regions = (
        p.region(RegionKind.ENTRY),
        q.region(RegionKind.EXIT),
        BoundaryRegion(RegionKind.PARALLEL, f"{p.region(RegionKind.PARALLEL).geometry} (both halves)", ""),
        BoundaryRegion(RegionKind.CORNER, "corners of both halves", ""),
    )
    entry_geom = p.region(RegionKind.ENTRY).geometry
    return FlowBordismDescriptor(
        f"{p.name}+{q.name}",
        p.support,
        p.dynamics,
        regions,
        base_map_minus=f"q -> (q, {entry_geom}) in {p.name}" if matched else None,
        base_map_plus=f"q -> (q, {q.region(RegionKind.EXIT).geometry}) in {q.name}" if matched else None,
        parts=(p, q),
    )


def wilson_plug() -> FlowBordismDescriptor:
    w = wilson_semiplug()
    return concatenate(w, mirror_image(w))


def symbolic_plug() -> FlowBordismDescriptor:
    v = symbolic_semiplug()
    return concatenate(v, mirror_image(v))


def transversality_samples(d: FlowBordismDescriptor, n: int = 21) -> list[str]:
    """Sampled check that the field crosses the transverse regions (analytic plug only)."""
    if d.dynamics.name != "wilson":
        return []
    problems = []
    for i in range(n):
        r = -1 + 2 * i / (n - 1)
        for z in (-1.0, 1.0):
            v = eval_wilson_field(CylPoint(r, 0.0, z))
            if v.d_z <= 0:
                problems.append(f"field tangent at r={r}, z={z}")
    return problems


# --------------------------------------------------------------------------
# numeric checks for the analytic plug


def _require_wilson(d: FlowBordismDescriptor) -> None:
    leaves = d.parts or (d,)
    if any(p.dynamics.name != "wilson" for p in leaves):
        raise ContractError(f"no numeric tracer for {d.name}")


def _involution(p: CylPoint) -> CylPoint:
    """Conjugates the reversed flow of the plug to the forward flow."""
    other = Half.UPPER if p.half is Half.LOWER else Half.LOWER
    return CylPoint(p.r, p.theta, -p.z, other)


def measure_longevity(d: FlowBordismDescriptor, p: CylPoint, budget: float = 1e4, step: float = 1e-3):
    """``(past, future)`` time to the boundary, ``INFINITE`` past the budget.

    For the plug the backward flow is the forward flow conjugated by
    ``(r, theta, z, half) -> (r, theta, -z, other half)``.  For a single
    half the same map carries the point into the mirror half.
    """
    _require_wilson(d)
    concatenated = bool(d.parts)

    def forward(q: CylPoint) -> float:
        if q.z >= 1.0 and (not concatenated or q.half is Half.UPPER):
            return 0.0
        tr = integrate_leaf(eval_wilson_field, q, step, budget, concatenated=concatenated)
        if tr.termination is Termination.EXITED:
            return tr.samples[-1][0]
        return INFINITE

    if not concatenated:
        half = Half.LOWER if d.dynamics.theta_sign > 0 else Half.UPPER
        p = CylPoint(p.r, p.theta, p.z, half)
    return forward(_involution(p)), forward(p)


@dataclass
class MatchedEndsReport:
    violations: list[tuple] = field(default_factory=list)
    stopped: list[tuple] = field(default_factory=list)
    matched: int = 0
    max_error: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations


def _theta_gain(r: np.ndarray, z0: float, z1: float, h: float, budget: float) -> np.ndarray:
    """``integral dz / (r^2 + z^6)`` from z0 to z1 by fixed-step RK4 in z, vectorised.

    Entries whose running total passes ``budget`` (or blows up) become inf.
    """
    n = max(1, int(round(abs(z1 - z0) / h)))
    dz = (z1 - z0) / n
    r2 = r * r
    total = np.zeros_like(r)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for i in range(n):
            za = z0 + i * dz
            zm = za + dz / 2
            zb = za + dz
            # the integrand is independent of theta, so RK4 reduces to Simpson
            total += dz / 6 * (1 / (r2 + za ** 6) + 4 / (r2 + zm ** 6) + 1 / (r2 + zb ** 6))
    total = np.abs(total)
    total[~np.isfinite(total) | (total > budget)] = np.inf
    return total


def _trace_grid(grid: Sequence[tuple[float, float]], budget: float, step: float):
    pts = np.asarray(grid, dtype=float).reshape(-1, 2)
    r, th = pts[:, 0], pts[:, 1]
    if np.any(np.abs(r) > 1):
        raise DomainError("grid radius outside [-1, 1]")
    up = _theta_gain(r, -1.0, 1.0, step, budget)
    # the mirror half is integrated top-down on a different mesh
    down = _theta_gain(r, 1.0, -1.0, step * 0.7, budget)
    total_time = up + down
    with np.errstate(invalid="ignore"):
        exit_theta = th + up - down
    stopped = ~np.isfinite(up) | ~np.isfinite(down) | (total_time > budget)
    return r, th, exit_theta, stopped


def check_matched_ends(
    d: FlowBordismDescriptor, grid: Sequence[tuple[float, float]], budget: float = 1e4, step: float = 1e-3, tol: float = 1e-6
) -> MatchedEndsReport:
    """Exit base point versus entry base point for every grid point that passes through."""
    if not d.has_base_maps:
        raise ContractError(f"{d.name} has no base maps; matched ends do not apply")
    _require_wilson(d)
    r, th, exit_th, stopped = _trace_grid(grid, budget, step)
    rep = MatchedEndsReport()
    for i in range(len(r)):
        q = (float(r[i]), float(th[i]))
        if stopped[i]:
            rep.stopped.append(q)
            continue
        diff = abs(exit_th[i] - th[i]) % PERIOD
        err = min(diff, PERIOD - diff)
        rep.max_error = max(rep.max_error, err)
        if err > tol:
            rep.violations.append((q, float(exit_th[i] % PERIOD), err))
        else:
            rep.matched += 1
    return rep


@dataclass
class StoppedSetSample:
    grid: list[tuple[float, float]]
    stopped: list[tuple[float, float]]


def stopped_set_sample(
    d: FlowBordismDescriptor, grid: Sequence[tuple[float, float]], budget: float = 1e4, step: float = 1e-3
) -> StoppedSetSample:
    _require_wilson(d)
    grid = [tuple(map(float, q)) for q in grid]
    if not d.parts:
        r = np.asarray([q[0] for q in grid])
        up = _theta_gain(r, -1.0, 1.0, step, budget)
        flags = ~np.isfinite(up)
    else:
        flags = _trace_grid(grid, budget, step)[3]
    return StoppedSetSample(grid, [q for q, s in zip(grid, flags) if s])
