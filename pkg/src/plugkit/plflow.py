"""Exact piecewise-linear dynamics: PL maps, slanted suspensions, PL plugs.

All arithmetic is done in ``Fraction``.  A slanted suspension of a map
``f`` of ``H x [a, b]`` is stored as the data ``(f, slant, length)``; a
point of the suspension is ``(r, theta, z)`` and between integer values of
theta a leaf climbs with ``dz/dtheta = slant``.  At each integer theta
the point ``(r, k, z)`` ("pre" representative) is the same point as
``(f(r, z), k)`` ("post" representative).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from .polygon import ConvexPolygon, HalfPlane, Point, frac, half_plane

F = Fraction


class DomainError(ValueError):
    """A point lies outside the domain of a map."""


class ConstructionError(RuntimeError):
    """A construction failed one of its own machine checks."""


# --------------------------------------------------------------------------
# PL maps


@dataclass(frozen=True)
class AffinePiece:
    region: ConvexPolygon
    matrix: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]
    offset: tuple[Fraction, Fraction]
    name: str = ""

    def apply(self, p: Point) -> Point:
        (a, b), (c, d) = self.matrix
        return (a * p[0] + b * p[1] + self.offset[0], c * p[0] + d * p[1] + self.offset[1])

    def det(self) -> Fraction:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def inverse_apply(self, p: Point) -> Point:
        (a, b), (c, d) = self.matrix
        det = self.det()
        x, y = p[0] - self.offset[0], p[1] - self.offset[1]
        return ((d * x - b * y) / det, (-c * x + a * y) / det)

    def image(self) -> ConvexPolygon:
        return self.region.affine_image(self.matrix, self.offset)


def affine(region, a, b, c, d, e, f, name="") -> AffinePiece:
    """Piece acting as ``(x, y) -> (a x + b y + e, c x + d y + f)``."""
    return AffinePiece(region, ((frac(a), frac(b)), (frac(c), frac(d))), (frac(e), frac(f)), name)


class PLMap:
    """A piecewise-affine homeomorphism of a rectangle."""

    def __init__(self, pieces: Sequence[AffinePiece], domain: ConvexPolygon, name: str = ""):
        self.pieces = tuple(pieces)
        self.domain = domain
        self.name = name
        self._images = tuple(p.image() for p in self.pieces)

    def __repr__(self) -> str:
        return f"PLMap({self.name or len(self.pieces)})"

    def piece_at(self, p: Point) -> AffinePiece:
        for piece in self.pieces:
            if piece.region.contains(p):
                return piece
        raise DomainError(f"point {p} outside {self.name or 'map'} domain")

    def __call__(self, p: Point) -> Point:
        p = (frac(p[0]), frac(p[1]))
        return self.piece_at(p).apply(p)

    def inverse(self, p: Point) -> Point:
        p = (frac(p[0]), frac(p[1]))
        for piece, img in zip(self.pieces, self._images):
            if img.contains(p):
                return piece.inverse_apply(p)
        raise DomainError(f"point {p} outside image of {self.name or 'map'}")

    def vertices(self) -> list[Point]:
        return sorted({v for piece in self.pieces for v in piece.region.vertices})

    def image_of_polygon(self, poly: ConvexPolygon) -> list[ConvexPolygon]:
        out = []
        for piece in self.pieces:
            part = poly.intersect(piece.region)
            if part.area() > 0 or (poly.area() == 0 and not part.empty):
                out.append(part.affine_image(piece.matrix, piece.offset))
        return out

    # -- machine checks -------------------------------------------------

    def continuity_violations(self) -> list[tuple[str, str, Point]]:
        """Shared boundary points where two adjacent pieces disagree."""
        bad = []
        for i, p in enumerate(self.pieces):
            for q in self.pieces[i + 1 :]:
                shared = p.region.intersect(q.region)
                for v in shared.vertices:
                    if p.apply(v) != q.apply(v):
                        bad.append((p.name, q.name, v))
        return bad

    def tiles_domain(self) -> bool:
        total = sum((p.region.area() for p in self.pieces), Fraction(0))
        if total != self.domain.area():
            return False
        for i, p in enumerate(self.pieces):
            for q in self.pieces[i + 1 :]:
                if p.region.interiors_overlap(q.region):
                    return False
        return all(p.region.subset_of(self.domain) for p in self.pieces)

    def is_bijective(self) -> bool:
        """Images tile the domain and every piece preserves orientation."""
        if any(p.det() <= 0 for p in self.pieces):
            return False
        total = sum((img.area() for img in self._images), Fraction(0))
        if total != self.domain.area():
            return False
        for i, a in enumerate(self._images):
            for b in self._images[i + 1 :]:
                if a.interiors_overlap(b):
                    return False
        return all(img.subset_of(self.domain) for img in self._images)


def identity_map(x0, x1, z0, z1) -> PLMap:
    dom = ConvexPolygon.box(x0, x1, z0, z1)
    return PLMap([affine(dom, 1, 0, 0, 1, 0, 0, "id")], dom, "identity")


def build_symbolic_map() -> PLMap:
    """The four-piece map of ``[-1, 5/2] x [-3, 3/2]`` driving the 1-dimensional minimal set.

    Pieces are cut out by the rays z = -r (both directions), z = r/2 (r >= 0)
    and z = 2r (r <= 0).  Upper: z -> 2z - 3/2; lower: z -> z/2 - 3/2;
    right: z -> r/2 + z - 3/2; left: z -> -r + z - 3/2.
    """
    dom = ConvexPolygon.box(-1, F(5, 2), -3, F(3, 2))
    above_anti = half_plane(1, 1, 0)       # z + r >= 0
    below_anti = above_anti.flipped()
    above_half = half_plane(F(-1, 2), 1, 0)  # z - r/2 >= 0
    below_half = above_half.flipped()
    above_double = half_plane(-2, 1, 0)    # z - 2r >= 0
    below_double = above_double.flipped()
    upper = dom.clip(above_anti).clip(above_half)
    lower = dom.clip(below_anti).clip(below_double)
    right = dom.clip(above_anti).clip(below_half)
    left = dom.clip(below_anti).clip(above_double)
    half = F(3, 2)
    pieces = [
        affine(upper, 1, 0, 0, 2, 0, -half, "upper"),
        affine(lower, 1, 0, 0, F(1, 2), 0, -half, "lower"),
        affine(right, 1, 0, F(1, 2), 1, 0, -half, "right"),
        affine(left, 1, 0, -1, 1, 0, -half, "left"),
    ]
    return PLMap(pieces, dom, "symbolic")


def build_collar_map() -> PLMap:
    """PL homeomorphism of ``[-1,1] x [-2,2]``, identity on the boundary.

    Two triangles with apexes (0,0) and (0,1) sit on the bottom and top
    edges; two trapezoids fill the sides.  The central segment
    ``{0} x [0,1]`` is translated down by one.
    """
    dom = ConvexPolygon.box(-1, 1, -2, 2)
    bottom = ConvexPolygon([(-1, -2), (1, -2), (0, 0)])
    top = ConvexPolygon([(-1, 2), (1, 2), (0, 1)])
    left = ConvexPolygon([(-1, -2), (0, 0), (0, 1), (-1, 2)])
    right = ConvexPolygon([(1, -2), (1, 2), (0, 1), (0, 0)])
    pieces = [
        affine(bottom, 1, 0, 0, F(1, 2), 0, -1, "bottom"),  # z -> z/2 - 1
        affine(top, 1, 0, 0, 2, 0, -2, "top"),               # z -> 2z - 2
        affine(left, 1, 0, -1, 1, 0, -1, "left"),            # z -> z - 1 - r
        affine(right, 1, 0, 1, 1, 0, -1, "right"),           # z -> z - 1 + r
    ]
    return PLMap(pieces, dom, "collar")


def min_z_displacement(f: PLMap) -> tuple[Fraction, list[Point]]:
    """Exact minimum of ``f_z(p) - z`` over the domain and all vertices attaining it.

    The displacement is affine on each piece, so the minimum sits at a
    vertex of the decomposition.  If it is attained along an edge both
    endpoints are reported.
    """
    best: Optional[Fraction] = None
    where: list[Point] = []
    for piece in f.pieces:
        for v in piece.region.vertices:
            d = piece.apply(v)[1] - v[1]
            if best is None or d < best:
                best, where = d, [v]
            elif d == best and v not in where:
                where.append(v)
    assert best is not None
    return best, sorted(where)


# --------------------------------------------------------------------------
# slanted suspensions


@dataclass(frozen=True)
class SlantedSuspension:
    f: PLMap
    slant: Fraction
    length: int
    r_range: tuple[Fraction, Fraction]
    z_range: tuple[Fraction, Fraction]
    name: str = ""

    @property
    def bottom(self) -> Fraction:
        return self.z_range[0]

    @property
    def top(self) -> Fraction:
        return self.z_range[1]

    def support(self) -> dict:
        return {
            "r": self.r_range,
            "theta": (Fraction(0), Fraction(self.length)),
            "z": self.z_range,
            "theta_periodic": True,
        }


def suspend(f: PLMap, slant, theta_length: int, name: str = "") -> SlantedSuspension:
    slant = frac(slant)
    if slant <= 0:
        raise ValueError("slant must be positive")
    if theta_length < 1:
        raise ValueError("theta_length must be >= 1")
    x0, x1, z0, z1 = f.domain.bounds()
    return SlantedSuspension(f, slant, int(theta_length), (x0, x1), (z0, z1), name or f.name)


@dataclass
class PLLeafTrace:
    """Exact trace of one leaf of a slanted suspension.

    ``segments`` holds ``(theta_start, theta_end, r, z_start)``: on each the
    leaf is ``z = z_start + slant*(theta - theta_start)`` at fixed ``r``.
    """

    start: tuple[Fraction, Fraction, Fraction]
    segments: list[tuple[Fraction, Fraction, Fraction, Fraction]] = field(default_factory=list)
    events: list[tuple[str, tuple]] = field(default_factory=list)
    termination: str = "budget_exhausted"
    theta_length: Optional[Fraction] = None
    exit_point: Optional[tuple[Fraction, Fraction, Fraction]] = None


def trace_pl_leaf(s: SlantedSuspension, start, budget: int = 200) -> PLLeafTrace:
    """Follow the leaf of ``s`` through ``start = (r, theta, z)`` forward.

    Stops on exit through the top, on exact closure (return to the start
    state with theta advanced by a multiple of the period), or after
    ``budget`` section crossings.  ``theta`` of the start is read modulo
    the suspension length; an integer theta is the post-map representative.
    """
    r, th, z = (frac(c) for c in start)
    L = s.length
    th = th % L
    if not (s.r_range[0] <= r <= s.r_range[1] and s.bottom <= z <= s.top):
        raise DomainError(f"start {start} outside support")
    out = PLLeafTrace(start=(r, th, z))
    theta_abs = th  # unwound theta
    crossings = 0
    while True:
        k = math.floor(theta_abs) + 1
        z_end = z + s.slant * (k - theta_abs)
        if z_end > s.top:
            th_exit = theta_abs + (s.top - z) / s.slant
            out.segments.append((theta_abs, th_exit, r, z))
            out.termination = "exited_boundary"
            out.exit_point = (r, th_exit % L, s.top)
            out.events.append(("exit", out.exit_point))
            return out
        out.segments.append((theta_abs, Fraction(k), r, z))
        if z_end == s.top:
            out.termination = "exited_boundary"
            out.exit_point = (r, Fraction(k % L), s.top)
            out.events.append(("exit", out.exit_point))
            return out
        out.events.append(("section", (r, Fraction(k % L), z_end)))
        r, z = s.f((r, z_end))
        theta_abs = Fraction(k)
        crossings += 1
        # closure check: the start phase is reached inside the next cell or at its left end
        start_phase = out.start[1]
        lap = theta_abs - out.start[1]
        if lap > 0 and (theta_abs - start_phase) % L == 0 and (r, z) == (out.start[0], out.start[2]):
            out.termination = "closed_up"
            out.theta_length = lap
            out.events.append(("closed", (r, theta_abs % L, z)))
            return out
        if start_phase.denominator != 1:
            # start in the open cell: compare where the leaf crosses that phase
            phase_abs = theta_abs + ((start_phase - theta_abs) % L)
            if phase_abs < theta_abs + 1 and r == out.start[0]:
                z_at = z + s.slant * (phase_abs - theta_abs)
                if z_at == out.start[2] and phase_abs > out.start[1]:
                    out.segments.append((theta_abs, phase_abs, r, z))
                    out.termination = "closed_up"
                    out.theta_length = phase_abs - out.start[1]
                    return out
        if crossings >= budget:
            out.termination = "budget_exhausted"
            return out


def retrace_backwards(s: SlantedSuspension, trace: PLLeafTrace) -> tuple[Fraction, Fraction, Fraction]:
    """Run a trace in reverse using the inverse map; returns the recovered start."""
    if not trace.segments:
        return trace.start
    th0, th1, r, z0 = trace.segments[-1]
    z = z0 + s.slant * (th1 - th0)
    theta = th1
    for th0, th1, r_seg, z_seg in reversed(trace.segments):
        if theta != th1:
            raise AssertionError("segments do not chain")
        if th1.denominator == 1 and (th1, r, z) != (th1, r_seg, z_seg + s.slant * (th1 - th0)):
            # we are at a section in post representative; undo the map
            r, z = s.f.inverse((r, z))
        z = z - s.slant * (th1 - th0)
        theta = th0
        r = r_seg
        if z != z_seg:
            raise AssertionError("retrace lost exactness")
    return (r, theta % s.length, z)


# --------------------------------------------------------------------------
# PL plugs with self-insertion


@dataclass(frozen=True)
class PLInsertionComponent:
    """One component of a PL self-insertion.

    ``forward`` maps a base point ``(r, theta)`` to the pre-map
    representative ``(R, Z)`` of a point on the section ``theta = section``
    in the given half; ``inverse`` returns the base point or ``None`` when
    ``(R, Z)`` is not in the image.
    """

    name: str
    half: str  # "lower" or "upper"
    section: int
    forward: Callable[[tuple[Fraction, Fraction]], tuple[Fraction, Fraction]]
    inverse: Callable[[tuple[Fraction, Fraction]], Optional[tuple[Fraction, Fraction]]]
    in_domain: Callable[[tuple[Fraction, Fraction]], bool]


class PLPlug:
    """Mirror-image concatenation of a slanted suspension, plus optional insertion.

    The lower half is the suspension itself; the upper half is its mirror,
    traversed in the opposite direction.  Coordinates in the upper half
    are those of the suspension (the mirror's ``z`` is ``-z``), which makes
    the matched-ends property exact: the leaf from base ``(r, theta)``
    leaves the upper half at the same ``(r, theta)``.
    """

    def __init__(self, susp: SlantedSuspension, components: Sequence[PLInsertionComponent] = (), name: str = ""):
        self.susp = susp
        self.components = tuple(components)
        self.name = name or susp.name
        self.period = Fraction(susp.length)
        self._by_section: dict[tuple[str, int], list[tuple[int, PLInsertionComponent]]] = {}
        for idx, c in enumerate(self.components):
            self._by_section.setdefault((c.half, c.section % susp.length), []).append((idx, c))

    def without_insertion(self) -> "PLPlug":
        return PLPlug(self.susp, (), self.name + "-uninserted")

    exact = True

    def radius(self, q) -> Fraction:
        return q[0]

    def base_distance(self, p, q) -> float:
        d_th = (frac(p[1]) - frac(q[1])) % self.period
        d_th = min(d_th, self.period - d_th)
        return float(max(abs(frac(p[0]) - frac(q[0])), d_th))

    def point_distance(self, a, b) -> float:
        if a[3] != b[3]:
            return math.inf
        d_th = (frac(a[1]) - frac(b[1])) % self.period
        d_th = min(d_th, self.period - d_th)
        return float(max(abs(a[0] - b[0]), d_th, abs(a[2] - b[2])))

    def sigma(self, component: int, q):
        c = self.components[component]
        R, Z = c.forward((frac(q[0]), frac(q[1])))
        return (R, Fraction(c.section % self.susp.length), Z, c.half)

    def in_stopped_core(self, q) -> bool:
        return q[0] == 0

    def _hits(self, half: str, k: int, r: Fraction, z: Fraction):
        for idx, c in self._by_section.get((half, k % self.susp.length), ()):
            q = c.inverse((r, z))
            if q is not None:
                return idx, q
        return None

    def leaf_walk(self, q) -> Iterator[tuple]:
        """Walk the un-inserted leaf from the base point ``q``.

        Yields ``("sample", dt, point)``, ``("hit", dt, point, component, child)``
        and finally ``("exit", dt, base_point)``.  ``dt`` is theta-length
        travelled since the previous item; points are
        ``(r, theta mod L, z, half)``.
        """
        s = self.susp
        L = s.length
        r, theta = frac(q[0]), frac(q[1]) % L
        z = s.bottom
        last = theta
        # lower half, forward
        while True:
            k = math.floor(theta) + 1
            z_end = z + s.slant * (k - theta)
            if z_end >= s.top:
                th_exit = theta + (s.top - z) / s.slant if z_end > s.top else Fraction(k)
                yield ("sample", th_exit - last, (r, th_exit % L, s.top, "lower"))
                last = th_exit
                theta, z = th_exit, s.top
                break
            point = (r, Fraction(k % L), z_end, "lower")
            hit = self._hits("lower", k, r, z_end)
            if hit is not None:
                yield ("hit", Fraction(k) - last, point, hit[0], hit[1])
            else:
                yield ("sample", Fraction(k) - last, point)
            last = Fraction(k)
            r, z = s.f((r, z_end))
            theta = Fraction(k)
        # upper half, backward in the suspension coordinates
        pre = theta.denominator == 1  # at an integer theta we hold the pre representative
        while True:
            k = int(theta) - 1 if pre else math.floor(theta)
            z_end = z - s.slant * (theta - k)
            if z_end <= s.bottom:
                th_exit = theta - (z - s.bottom) / s.slant if z_end < s.bottom else Fraction(k)
                travelled = last - th_exit
                yield ("exit", travelled, (r, th_exit % L))
                return
            rp, zp = s.f.inverse((r, z_end))
            point = (rp, Fraction(k % L), zp, "upper")
            hit = self._hits("upper", k, rp, zp)
            if hit is not None:
                yield ("hit", last - Fraction(k), point, hit[0], hit[1])
            else:
                yield ("sample", last - Fraction(k), point)
            last = Fraction(k)
            r, z = rp, zp
            theta = Fraction(k)
            pre = True


# --------------------------------------------------------------------------
# the symbolic-dynamics plug


V_R_RANGE = (F(-1), F(5, 2))


def in_B(p) -> bool:
    """The wedge ``{r >= 0, r/12 <= theta - 1/3 <= r/4}`` (with ``r <= 5/2``)."""
    r, th = frac(p[0]), frac(p[1])
    t = th - F(1, 3)
    return 0 <= r <= F(5, 2) and r / 12 <= t <= r / 4


def g_map(p) -> tuple[Fraction, Fraction]:
    r, th = frac(p[0]), frac(p[1])
    return (r / 2, 9 * th - F(7, 4) * r - 3)


def h_map(x, y) -> tuple[Fraction, Fraction, Fraction]:
    if y >= x / 2:
        return (2 * x - 2 * y, Fraction(1), x / 2)
    if y > -x:
        return (x, Fraction(1), y)
    return (2 * x + y, Fraction(1), -x)


def sigma_v(p) -> tuple[Fraction, Fraction, Fraction]:
    """The insertion map ``h o g`` on ``B``; lands in the section ``theta = 1``."""
    if not in_B(p):
        raise DomainError(f"{p} is outside the wedge B")
    return h_map(*g_map(p))


# image of sigma on B, split by the three branches of h (closed pieces in (R, Z))
_X_MAX = F(5, 4)
IMAGE_PIECES = {
    "upper": ConvexPolygon([(0, 0), (0, _X_MAX / 2), (_X_MAX, _X_MAX / 2)]),
    "middle": ConvexPolygon([(0, 0), (_X_MAX, _X_MAX / 2), (_X_MAX, -_X_MAX)]),
    "lower": ConvexPolygon([(0, 0), (_X_MAX, -_X_MAX), (0, -_X_MAX)]),
}


def sigma_v_inverse(RZ) -> Optional[tuple[Fraction, Fraction]]:
    """Inverse of ``h o g`` on its image, or ``None`` outside ``sigma(B)``."""
    R, Z = frac(RZ[0]), frac(RZ[1])
    if not (0 <= R <= _X_MAX and -_X_MAX <= Z <= _X_MAX / 2):
        return None
    if Z >= R / 2:
        x = 2 * Z
        y = x - R / 2
    elif Z > -R:
        x, y = R, Z
    else:
        x = -Z
        y = R - 2 * x
    r = 2 * x
    th = (y + F(7, 4) * r + 3) / 9
    return (r, th)


# affine inverse of h o g on each image piece, as (matrix, offset) acting on (R, Z)
SIGMA_V_INVERSE_AFFINE = {
    # x = 2Z, y = 2Z - R/2 ; r = 4Z, theta = (2Z - R/2 + 7Z + 3)/9
    "upper": (((F(0), F(4)), (F(-1, 18), F(1))), (F(0), F(1, 3))),
    # x = R, y = Z ; r = 2R, theta = (Z + 7R/2 + 3)/9
    "middle": (((F(2), F(0)), (F(7, 18), F(1, 9))), (F(0), F(1, 3))),
    # x = -Z, y = R + 2Z ; r = -2Z, theta = (R + 2Z - 7Z/2 + 3)/9
    "lower": (((F(0), F(-2)), (F(1, 9), F(-1, 6))), (F(0), F(1, 3))),
}


def symbolic_suspension(length: int = 1) -> SlantedSuspension:
    return suspend(build_symbolic_map(), F(3, 2), length, "V" if length == 1 else f"V{length}")


def v_plug(inserted: bool = True) -> PLPlug:
    """The plug V (one-circle-breaking insertion on B) or its un-inserted version."""
    s = symbolic_suspension(1)
    comps = []
    if inserted:
        comps.append(
            PLInsertionComponent(
                "sigma", "lower", 1,
                lambda q: _hg_pre(q),
                sigma_v_inverse,
                in_B,
            )
        )
    return PLPlug(s, comps, "v9" if inserted else "v9-uninserted")


def _hg_pre(q):
    R, _, Z = sigma_v(q)
    return (R, Z)


def beta(p):
    """Deck translation of the double cover: theta -> theta + 1 (mod 2)."""
    return (frac(p[0]), (frac(p[1]) + 1) % 2) + tuple(p[2:])


def gamma(point):
    """Mirror involution of the double cover: swap the two halves."""
    r, th, z, half = point
    return (r, th, z, "upper" if half == "lower" else "lower")


def lift_sigma1(q):
    """Lift of ``sigma`` to the double cover: domain ``B`` in the sheet theta in [0,1)."""
    q = (frac(q[0]), frac(q[1]))
    if not (0 <= q[1] < 1) or not in_B(q):
        raise DomainError(f"{q} outside D1")
    R, _, Z = sigma_v(q)
    return (R, Fraction(1), Z, "lower")


def build_double_cover(sigma1=lift_sigma1) -> PLPlug:
    """Self-insertion of the double cover V' with sigma2 = beta o gamma o sigma1 o beta."""

    def sigma2(q):
        q = (frac(q[0]), frac(q[1]))
        return beta(gamma(sigma1(beta(q))))

    def d1(q):
        return 0 <= frac(q[1]) < 1 and in_B(q)

    def d2(q):
        return d1(beta(q))

    def inv1(RZ):
        q = sigma_v_inverse(RZ)
        return q

    def inv2(RZ):
        q = sigma_v_inverse(RZ)
        return None if q is None else beta(q)

    s = symbolic_suspension(2)
    comps = [
        PLInsertionComponent("sigma1", "lower", 1, lambda q: _pre(sigma1(q)), inv1, d1),
        PLInsertionComponent("sigma2", "upper", 0, lambda q: _pre(sigma2(q)), inv2, d2),
    ]
    plug = PLPlug(s, comps, "v9_double")
    plug.sigma1 = sigma1
    plug.sigma2 = sigma2
    return plug


def _pre(point):
    return (point[0], point[2])


# --------------------------------------------------------------------------
# the PL Wilson plug


PL_CORE_HALF_WIDTH = F(1, 2)
PL_THETA_MARGIN = F(1, 8)


def _pl_defect(r: Fraction, th: Fraction, lo: Fraction) -> Fraction:
    d = max(Fraction(0), lo - th, th - (lo + 1))
    return abs(r) / 2 + 2 * d


def build_pl_wilson_sigma():
    """Two-component insertion for the PL Wilson plug.

    Core segments ``{0} x [9,10]`` and ``{0} x [14,15]`` map linearly onto
    the annulus segment of circles at theta = 20 (lower half) and
    theta = 5 (upper half).  The extension to a neighbourhood is
    ``r -> r - |r|/2 - 2 dist(theta, core)``, ``z_pre = theta - lo``.
    """
    comps = []
    for name, half, section, lo in (("D_s", "lower", 20, F(9)), ("Dbar_s", "upper", 5, F(14))):

        def in_domain(q, lo=lo):
            r, th = frac(q[0]), frac(q[1])
            return abs(r) <= PL_CORE_HALF_WIDTH and lo - PL_THETA_MARGIN <= th <= lo + 1 + PL_THETA_MARGIN

        def forward(q, lo=lo, in_domain=in_domain):
            if not in_domain(q):
                raise DomainError(f"{q} outside PL insertion domain")
            r, th = frac(q[0]), frac(q[1])
            return (r - _pl_defect(r, th, lo), th - lo)

        def inverse(RZ, lo=lo, in_domain=in_domain):
            R, Z = frac(RZ[0]), frac(RZ[1])
            th = Z + lo
            d = max(Fraction(0), lo - th, th - (lo + 1))
            # R = r - |r|/2 - 2d, strictly increasing in r
            base = R + 2 * d
            r = 2 * base if base >= 0 else base * F(2, 3)
            q = (r, th)
            return q if in_domain(q) else None

        comps.append(PLInsertionComponent(name, half, section, forward, inverse, in_domain))
    return comps


def pl_wilson_plug(inserted: bool = True) -> PLPlug:
    s = suspend(build_collar_map(), 1, 20, "W_PL")
    comps = build_pl_wilson_sigma() if inserted else []
    plug = PLPlug(s, comps, "pl_wilson" if inserted else "pl_wilson-uninserted")
    if inserted:
        problems = verify_pl_wilson_sigma(plug)
        if problems:
            raise ConstructionError("; ".join(problems))
    return plug


def verify_pl_wilson_sigma(plug: PLPlug, steps: int = 16) -> list[str]:
    """Machine checks for the PL Wilson insertion on an exact grid."""
    problems = []
    s = plug.susp
    for c in plug.components:
        lo = F(9) if c.name == "D_s" else F(14)
        images = []
        for i in range(steps + 1):
            for j in range(steps + 1):
                r = -PL_CORE_HALF_WIDTH + 2 * PL_CORE_HALF_WIDTH * F(i, steps)
                th = lo - PL_THETA_MARGIN + (1 + 2 * PL_THETA_MARGIN) * F(j, steps)
                R, Z = c.forward((r, th))
                if R > r or (R == r and not (r == 0 and lo <= th <= lo + 1)):
                    problems.append(f"{c.name}: radius inequality fails at {(r, th)}")
                if not (s.r_range[0] <= R <= s.r_range[1] and s.bottom <= Z <= s.top):
                    problems.append(f"{c.name}: image of {(r, th)} leaves the support")
                if c.inverse((R, Z)) != (r, th):
                    problems.append(f"{c.name}: inverse fails at {(r, th)}")
                images.append((R, Z))
        if len(set(images)) != len(images):
            problems.append(f"{c.name}: not injective on the grid")
        # boundary leaves r = +-1 climb 4 units in z per 4 units of theta: one crossing per period at most
        span = (s.top - s.bottom) / s.slant
        if span >= s.length:
            problems.append(f"{c.name}: a boundary leaf could meet the section twice")
    # the two images lie in different halves, hence are disjoint
    halves = {c.half for c in plug.components}
    if len(halves) != len(plug.components):
        problems.append("components share a half")
    return problems
