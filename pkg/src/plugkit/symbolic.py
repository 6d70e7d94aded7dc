"""Symbolic dynamics of the plug with a 1-dimensional minimal set.

Three pieces live here: the recursive FOLLOWDISKS enumerator, the disks
``E_n`` in the wedge ``B`` with the nested hierarchy ``E_{k,n}`` computed by
exact polygon clipping, and the geometric trace of the leaf through the
double cover whose internal entries the enumerator predicts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .insertion import EventKind, Report, follow_leaf
from .plflow import (
    IMAGE_PIECES,
    SIGMA_V_INVERSE_AFFINE,
    DomainError,
    build_double_cover,
    build_symbolic_map,
    PLMap,
)
from .polygon import ConvexPolygon, connected_components, half_plane, squared_diameter

F = Fraction
INFINITY = math.inf
CALL_COUNT = 2  # how many times step 4 recurses on n - 1


@dataclass(frozen=True, order=True)
class SymbolicPair:
    j: int
    n: int

    def __post_init__(self):
        if self.j not in (1, 2) or self.n < 1:
            raise ValueError(f"invalid pair ({self.j},{self.n})")

    def __str__(self) -> str:
        return f"({self.j},{self.n})"


def iter_followdisks(j: int, n, calls: int = CALL_COUNT) -> Iterator[SymbolicPair]:
    """Lazy FOLLOWDISKS.  ``n`` is a positive int, 0 (no output) or ``INFINITY``.

    The parity tests use the caller's ``j``; the recursive calls use the
    loop variable ``i``.  With infinite ``n`` step 3 never finishes, so the
    enumeration is an infinite generator.
    """
    if n == 0:
        return
    finite = n != INFINITY
    if finite:
        yield SymbolicPair(j, int(n))
    for i in (1, 2):
        k = 1
        while not finite or k <= n - 2:
            if (j + k) % 2 == 1:
                yield from iter_followdisks(i, k, calls)
            k += 1
        for _ in range(calls):
            yield from iter_followdisks(i, int(n) - 1, calls)
        for k in range(int(n) - 2, 0, -1):
            if (j + k) % 2 == 0:
                yield from iter_followdisks(i, k, calls)


def followdisks(j: int, n, pair_budget: Optional[int] = None, calls: int = CALL_COUNT) -> list[SymbolicPair]:
    if j not in (1, 2):
        raise DomainError("j must be 1 or 2")
    if n != INFINITY and (n < 0 or int(n) != n):
        raise DomainError("n must be a nonnegative integer or INFINITY")
    if n == INFINITY and pair_budget is None:
        raise DomainError("an infinite call needs a pair budget")
    gen = iter_followdisks(j, n, calls)
    if pair_budget is not None:
        gen = itertools.islice(gen, pair_budget)
    return list(gen)


def format_pairs(pairs: Sequence[SymbolicPair]) -> str:
    return "".join(f"{p}\n" for p in pairs)


def parse_pairs(text: str) -> list[SymbolicPair]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        j, n = line.strip("()").split(",")
        out.append(SymbolicPair(int(j), int(n)))
    return out


# --------------------------------------------------------------------------
# the disks E_n


@dataclass(frozen=True)
class DiskInterval:
    n: int
    r_lo: Fraction
    r_hi: Fraction

    def polygon(self) -> ConvexPolygon:
        """The disk as the part of ``B`` over ``[r_lo, r_hi]``."""
        third = F(1, 3)
        lo, hi = self.r_lo, self.r_hi
        return ConvexPolygon(
            [(lo, third + lo / 12), (lo, third + lo / 4), (hi, third + hi / 4), (hi, third + hi / 12)]
        )

    def contains_radius(self, r) -> bool:
        return self.r_lo <= r <= self.r_hi


def disk_E(n: int) -> DiskInterval:
    if n < 1:
        raise DomainError("n must be >= 1")
    a, b = F(4, 2 ** n), F(2, 4 ** n)
    return DiskInterval(n, a - b, a + b)


def disk_index(r, n_max: int = 200) -> Optional[int]:
    """Index n with r in E_n, or None."""
    r = F(r)
    for n in range(1, n_max + 1):
        d = disk_E(n)
        if d.contains_radius(r):
            return n
        if r > d.r_hi:
            return None
    return None


# --------------------------------------------------------------------------
# tubes and their pull-backs


_TOP = F(3, 2)
_BELOW_TOP = half_plane(0, -1, _TOP)


def _first_section(poly: ConvexPolygon) -> ConvexPolygon:
    # a leaf entering at (r, theta) reaches theta = 1 at z = -3 + 3/2 (1 - theta)
    return poly.affine_image(((F(1), F(0)), (F(0), F(-3, 2))), (F(0), F(-3, 2)))


def tube_sections(base: ConvexPolygon, f: Optional[PLMap] = None) -> list[ConvexPolygon]:
    """Cross-sections of the tube of leaves entering over ``base`` with theta = 1.

    Returned in the representation before ``f`` is applied, lap by lap,
    while the tube stays below the top ``z = 3/2``.
    """
    f = f or build_symbolic_map()
    out: list[ConvexPolygon] = []
    cur = [_first_section(base)]
    while cur:
        cur = [p.clip(_BELOW_TOP) for p in cur]
        cur = [p for p in cur if p.area() > 0]
        out.extend(cur)
        nxt = []
        for p in cur:
            for q in f.image_of_polygon(p):
                q = q.translate(0, _TOP)
                if q.area() > 0:
                    nxt.append(q)
        cur = nxt
    return out


def pull_back(sections: Sequence[ConvexPolygon]) -> list[ConvexPolygon]:
    """``sigma^{-1}`` of the sections, piece by piece of ``Im(sigma|_B)``."""
    out = []
    for s in sections:
        for name, piece in IMAGE_PIECES.items():
            part = s.intersect(piece)
            if part.area() > 0:
                m, off = SIGMA_V_INVERSE_AFFINE[name]
                out.append(part.affine_image(m, off))
    return out


@dataclass
class Disk:
    level: int
    index: int
    polygons: list[ConvexPolygon]
    source: Optional[int] = None   # index (one level up) of the disk whose tube produced this one
    parent: Optional[int] = None   # index (one level up) of the disk containing this one
    e_index: Optional[int] = None  # n with this disk inside E_n

    def bounds(self):
        bs = [p.bounds() for p in self.polygons]
        return (min(b[0] for b in bs), max(b[1] for b in bs), min(b[2] for b in bs), max(b[3] for b in bs))

    def area(self) -> Fraction:
        return sum((p.area() for p in self.polygons), Fraction(0))

    def squared_diameter(self) -> Fraction:
        return squared_diameter(self.polygons)


@dataclass
class DiskHierarchy:
    k_max: int
    n_max: int
    levels: list[list[Disk]] = field(default_factory=list)
    partial: bool = False

    def in_range(self, disk: Disk) -> bool:
        """Whether all children of ``disk`` come from computed tubes.

        A level-0 disk ``E_m`` collects children from the tubes of ``E_m'``
        with ``m' > m``; a deeper disk collects them from the children of
        the disk whose tube produced it.
        """
        if disk.level >= self.k_max:
            return False
        while disk.level > 0:
            disk = self.levels[disk.level - 1][disk.source]
        return disk.index + 1 < self.n_max


def _covered_area(child: ConvexPolygon, parent: Sequence[ConvexPolygon]) -> Fraction:
    return sum((child.intersect(p).area() for p in parent), Fraction(0))


def _boxes_meet(a, b) -> bool:
    return not (a[1] < b[0] or b[1] < a[0] or a[3] < b[2] or b[3] < a[2])


def build_hierarchy(k_max: int = 2, n_max: int = 6, max_disks: int = 5000) -> DiskHierarchy:
    if k_max < 0 or n_max < 1:
        raise DomainError("need k_max >= 0 and n_max >= 1")
    f = build_symbolic_map()
    h = DiskHierarchy(k_max, n_max)
    level0 = [Disk(0, n - 1, [disk_E(n).polygon()], e_index=n) for n in range(1, n_max + 1)]
    h.levels.append(level0)
    for k in range(k_max):
        nxt: list[Disk] = []
        for src in h.levels[k]:
            secs = [s for p in src.polygons for s in tube_sections(p, f)]
            pieces = pull_back(secs)
            for comp in connected_components(pieces):
                nxt.append(Disk(k + 1, len(nxt), [pieces[i] for i in comp], source=src.index))
            if len(nxt) > max_disks:
                h.partial = True
                break
        _assign_parents(h.levels[k], nxt)
        for d in nxt:
            d.e_index = _e_index(d)
        h.levels.append(nxt)
        if h.partial:
            break
    return h


def _e_index(d: Disk) -> Optional[int]:
    for n in itertools.count(1):
        e = disk_E(n)
        if e.r_hi < d.bounds()[0]:
            return None
        poly = e.polygon()
        if all(p.subset_of(poly) for p in d.polygons):
            return n
        if n > 400:
            return None


def _assign_parents(parents: Sequence[Disk], children: Sequence[Disk]) -> None:
    pboxes = [p.bounds() for p in parents]
    for c in children:
        cb = c.bounds()
        owners = []
        for idx, (p, pb) in enumerate(zip(parents, pboxes)):
            if _boxes_meet(cb, pb) and any(_covered_area(cp, p.polygons) > 0 for cp in c.polygons):
                owners.append(idx)
        c.parent = owners[0] if len(owners) == 1 else None


def cantor_cross_section_stats(h: DiskHierarchy) -> Report:
    """Finite-level certificate: containment, multiplicity, disjointness, shrinking."""
    rep = Report("hierarchy")
    if len(h.levels) < 3:
        rep.add("depth", False, "hierarchy needs at least levels 0, 1, 2")
        return rep
    # level 1 is sigma^{-1} of the tubes of E_1..E_nmax: each disk must lie in some E_k
    outside = [d.index for d in h.levels[1] if d.e_index is None]
    rep.add("preimage_in_union_of_E", not outside, f"{len(h.levels[1])} disks, outside: {outside[:5]}")
    stats = {"disks": [], "max_sq_diameter": [], "multiplicities": []}
    for k, level in enumerate(h.levels):
        stats["disks"].append(len(level))
        stats["max_sq_diameter"].append(max(d.squared_diameter() for d in level))
        if k > 0:
            bad = []
            for d in level:
                if d.parent is None:
                    bad.append((d.index, "no unique parent"))
                    continue
                parent = h.levels[k - 1][d.parent]
                for p in d.polygons:
                    if _covered_area(p, parent.polygons) != p.area():
                        bad.append((d.index, "not contained"))
                        break
                if d.squared_diameter() >= parent.squared_diameter():
                    bad.append((d.index, "diameter not smaller than parent"))
            rep.add(f"containment_level_{k}", not bad, f"{len(level)} disks; problems {bad[:3]}")
        # pairwise disjointness as closed sets
        boxes = [d.bounds() for d in level]
        touching = []
        for a in range(len(level)):
            for b in range(a + 1, len(level)):
                if _boxes_meet(boxes[a], boxes[b]) and any(
                    p.intersects(q) for p in level[a].polygons for q in level[b].polygons
                ):
                    touching.append((a, b))
        rep.add(f"disjoint_level_{k}", not touching, f"touching pairs {touching[:3]}")
    for k in range(h.k_max):
        counts = {}
        for d in h.levels[k + 1]:
            if d.parent is not None:
                counts[d.parent] = counts.get(d.parent, 0) + 1
        in_range = [d for d in h.levels[k] if h.in_range(d)]
        mult = [counts.get(d.index, 0) for d in in_range]
        stats["multiplicities"].append(mult)
        rep.add(
            f"multiplicity_level_{k}",
            bool(mult) and min(mult) >= 2,
            f"{len(in_range)} disks in range, child counts {mult[:12]}{'...' if len(mult) > 12 else ''}",
        )
    diam = stats["max_sq_diameter"]
    rep.add(
        "diameters_decrease",
        all(b < a for a, b in zip(diam, diam[1:])),
        "max squared diameters " + ", ".join(f"{float(x):.4g}" for x in diam),
    )
    rep.add("complete", not h.partial, "disk budget not exceeded" if not h.partial else "partial hierarchy")
    rep.data.update(stats)
    return rep


# --------------------------------------------------------------------------
# geometry of the leaf through the double cover


def double_cover_entries(count: int, max_transitions: Optional[int] = None) -> list[SymbolicPair]:
    """``(j, n)`` of the first ``count`` internal entries of the leaf entering at ``(0, 1/3)``.

    ``j`` is the sheet of the entry base point (theta in [0,1) or [1,2))
    and ``n`` the index of the disk ``E_n`` containing its radius.  The
    trace is exact.
    """
    plug = build_double_cover()
    budget = max_transitions or 4 * count + 10
    hist = follow_leaf(plug, (F(0), F(1, 3)), max_transitions=budget, max_depth=10_000, time_budget=math.inf)
    out = []
    for e in hist.events:
        if e.kind is not EventKind.INTERNAL_ENTRY:
            continue
        r, th = e.base_point
        n = disk_index(r)
        if n is None:
            raise AssertionError(f"entry base {e.base_point} lies in no E_n")
        out.append(SymbolicPair(1 if th < 1 else 2, n))
        if len(out) == count:
            break
    return out
