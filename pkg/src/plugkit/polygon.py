"""Exact convex polygons over the rationals.

Everything here works on ``fractions.Fraction`` coordinates so that the
piecewise-linear constructions can be checked with zero tolerance.
Polygons are closed sets; degenerate results (a point or a segment) are
kept, because touching is a meaningful outcome for containment and
disjointness tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Point = tuple[Fraction, Fraction]


def frac(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: a float in exact code is almost always a bug.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact value {x!r}")
    return Fraction(x)


def fmt(x: Fraction) -> str:
    """Serialize a rational as ``p/q`` (integers as ``p/1``)."""
    x = frac(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class HalfPlane:
    """The closed set ``a*x + b*y + c >= 0``."""

    a: Fraction
    b: Fraction
    c: Fraction

    def value(self, p: Point) -> Fraction:
        return self.a * p[0] + self.b * p[1] + self.c

    def contains(self, p: Point) -> bool:
        return self.value(p) >= 0

    def flipped(self) -> "HalfPlane":
        return HalfPlane(-self.a, -self.b, -self.c)


def half_plane(a, b, c) -> HalfPlane:
    return HalfPlane(frac(a), frac(b), frac(c))


def _dedupe(pts: Sequence[Point]) -> list[Point]:
    out: list[Point] = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _hull(points: Iterable[Point]) -> list[Point]:
    """Counter-clockwise convex hull without collinear vertices."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if not hull:
        # all points collinear: keep the two extremes
        return [pts[0], pts[-1]]
    return hull


class ConvexPolygon:
    """A closed convex polygon, possibly degenerate, possibly empty."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable[Point]):
        pts = [(frac(x), frac(y)) for x, y in vertices]
        self.vertices: tuple[Point, ...] = tuple(_hull(pts))

    @classmethod
    def box(cls, x0, x1, y0, y1) -> "ConvexPolygon":
        return cls([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    def __repr__(self) -> str:
        inner = ", ".join(f"({fmt(x)}, {fmt(y)})" for x, y in self.vertices)
        return f"ConvexPolygon([{inner}])"

    def __eq__(self, other) -> bool:
        return isinstance(other, ConvexPolygon) and set(self.vertices) == set(other.vertices)

    def __hash__(self) -> int:
        return hash(frozenset(self.vertices))

    @property
    def empty(self) -> bool:
        return not self.vertices

    def area(self) -> Fraction:
        v = self.vertices
        if len(v) < 3:
            return Fraction(0)
        s = Fraction(0)
        for i in range(len(v)):
            x0, y0 = v[i]
            x1, y1 = v[(i + 1) % len(v)]
            s += x0 * y1 - x1 * y0
        return s / 2

    def edges_as_half_planes(self) -> list[HalfPlane]:
        """Half-planes whose intersection is the polygon (needs >= 3 vertices)."""
        v = self.vertices
        out = []
        for i in range(len(v)):
            (x0, y0), (x1, y1) = v[i], v[(i + 1) % len(v)]
            # left of the directed edge, since vertices run counter-clockwise
            out.append(HalfPlane(-(y1 - y0), x1 - x0, (y1 - y0) * x0 - (x1 - x0) * y0))
        return out

    def contains(self, p: Point) -> bool:
        p = (frac(p[0]), frac(p[1]))
        v = self.vertices
        if not v:
            return False
        if len(v) == 1:
            return p == v[0]
        if len(v) == 2:
            a, b = v
            if cross(a, b, p) != 0:
                return False
            return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
        return all(cross(v[i], v[(i + 1) % len(v)], p) >= 0 for i in range(len(v)))

    def clip(self, hp: HalfPlane) -> "ConvexPolygon":
        v = self.vertices
        if not v:
            return self
        if len(v) == 1:
            return self if hp.contains(v[0]) else ConvexPolygon([])
        out: list[Point] = []
        n = len(v)
        loop = range(n) if n > 2 else range(1)
        for i in loop:
            p, q = v[i], v[(i + 1) % n]
            fp, fq = hp.value(p), hp.value(q)
            if fp >= 0:
                out.append(p)
            if (fp > 0 and fq < 0) or (fp < 0 and fq > 0):
                t = fp / (fp - fq)
                out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
        if n == 2 and hp.value(v[1]) >= 0:
            out.append(v[1])
        return ConvexPolygon(_dedupe(out))

    def intersect(self, other: "ConvexPolygon") -> "ConvexPolygon":
        if self.empty or other.empty:
            return ConvexPolygon([])
        if len(other.vertices) >= 3:
            result = self
            for hp in other.edges_as_half_planes():
                result = result.clip(hp)
                if result.empty:
                    break
            return result
        if len(self.vertices) >= 3:
            return other.intersect(self)
        # both degenerate: brute force over candidate points
        cands = [p for p in self.vertices if other.contains(p)]
        cands += [p for p in other.vertices if self.contains(p)]
        if len(self.vertices) == 2 and len(other.vertices) == 2:
            pt = _segment_intersection(self.vertices, other.vertices)
            if pt is not None:
                cands.append(pt)
        return ConvexPolygon(cands)

    def intersects(self, other: "ConvexPolygon") -> bool:
        return not self.intersect(other).empty

    def interiors_overlap(self, other: "ConvexPolygon") -> bool:
        return self.intersect(other).area() > 0

    def affine_image(self, matrix, offset) -> "ConvexPolygon":
        (a, b), (c, d) = matrix
        e, f = offset
        return ConvexPolygon([(a * x + b * y + e, c * x + d * y + f) for x, y in self.vertices])

    def translate(self, dx, dy) -> "ConvexPolygon":
        dx, dy = frac(dx), frac(dy)
        return ConvexPolygon([(x + dx, y + dy) for x, y in self.vertices])

    def bounds(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        return min(xs), max(xs), min(ys), max(ys)

    def subset_of(self, other: "ConvexPolygon") -> bool:
        return all(other.contains(p) for p in self.vertices)


def _segment_intersection(s, t):
    (p, p2), (q, q2) = s, t
    r = (p2[0] - p[0], p2[1] - p[1])
    u = (q2[0] - q[0], q2[1] - q[1])
    denom = r[0] * u[1] - r[1] * u[0]
    if denom == 0:
        return None
    w = (q[0] - p[0], q[1] - p[1])
    t1 = (w[0] * u[1] - w[1] * u[0]) / denom
    t2 = (w[0] * r[1] - w[1] * r[0]) / denom
    if 0 <= t1 <= 1 and 0 <= t2 <= 1:
        return (p[0] + t1 * r[0], p[1] + t1 * r[1])
    return None


def squared_diameter(polys: Iterable[ConvexPolygon]) -> Fraction:
    """Exact squared diameter of a union of convex polygons."""
    pts = sorted({p for poly in polys for p in poly.vertices})
    best = Fraction(0)
    for i, p in enumerate(pts):
        for q in pts[i + 1 :]:
            d = (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2
            if d > best:
                best = d
    return best


def connected_components(polys: Sequence[ConvexPolygon]) -> list[list[int]]:
    """Group polygons whose closed sets touch, transitively (union-find)."""
    parent = list(range(len(polys)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    boxes = [p.bounds() for p in polys]
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            bi, bj = boxes[i], boxes[j]
            if bi[1] < bj[0] or bj[1] < bi[0] or bi[3] < bj[2] or bj[3] < bi[2]:
                continue
            if polys[i].intersects(polys[j]):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(polys)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())
