"""Self-insertion maps and the stack machine that follows leaves of a self-inserted plug.

A *plug model* is any object exposing

* ``leaf_walk(q)``: generator over the leaf of the un-inserted plug that
  starts at base point ``q``.  It yields ``("sample", dt, point)``,
  ``("hit", dt, point, component, child)`` when the leaf meets the image of
  the insertion, ``("elided", dt, count, point)`` for a run of hits whose
  sub-traces are known to be finite and skipped, and finally
  ``("exit", dt, base)``;
* ``sigma(component, q)``: the insertion map, returning ``(r, theta, z, half)``;
* ``radius(q)``, ``base_distance(p, q)``, ``point_distance(a, b)`` and ``exact``.

:func:`follow_leaf` runs the recursion with an explicit stack of such
generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .geomcore import PERIOD, TINY_RADIUS, DomainError, phi, phi_inverse

SECTION_LOWER = 6.0
SECTION_UPPER = 4.0
CENTERS = (2.0, 8.0)
COMPONENTS = ("D_s", "Dbar_s")


class StructuralError(ValueError):
    """A transition sequence that cannot come from a leaf."""


# --------------------------------------------------------------------------
# the insertion maps


def _component_index(component) -> int:
    if component in (0, "D_s", "lower"):
        return 0
    if component in (1, "Dbar_s", "upper"):
        return 1
    raise ValueError(f"unknown component {component!r}")


def radius_defect(p, component) -> float:
    """``r - r'`` for ``(r', ...) = sigma(p)``, i.e. ``r^2/4 + 2 sum (theta_i - c)^2``."""
    c = CENTERS[_component_index(component)]
    r, *thetas = p
    return r * r / 4 + 2 * sum((t - c) ** 2 for t in thetas)


def in_sigma_domain(p, component) -> bool:
    """Points whose image stays inside the support ``[-1,1] x [-1,1]``."""
    r, th = p
    i = _component_index(component)
    if not (-1.0 <= r <= 1.0):
        return False
    zi = 2.0 - th if i == 0 else th - 8.0
    return -1.0 <= zi <= 1.0 and r - radius_defect(p, i) >= -1.0 - 1e-12


def sigma_w3(p, component):
    """Insertion map of the 3-dimensional plug.

    ``D_s`` goes to the section theta = 6 of the lower half, ``Dbar_s`` to
    theta = 4 of the upper half.  Returns ``(r, theta, z, half)``.
    """
    i = _component_index(component)
    r, th = float(p[0]), float(p[1])
    if not in_sigma_domain((r, th), i):
        raise DomainError(f"{(r, th)} outside {COMPONENTS[i]}")
    rr = r - radius_defect((r, th), i)
    if i == 0:
        return (rr, SECTION_LOWER, 2.0 - th, "lower")
    return (rr, SECTION_UPPER, th - 8.0, "upper")


def sigma_w3_inverse(r_img: float, z_img: float, component) -> Optional[tuple[float, float]]:
    """Base point mapped to ``(r_img, z_img)`` in the section, or None."""
    i = _component_index(component)
    if not (-1.0 <= z_img <= 1.0 and -1.0 <= r_img <= 1.0):
        return None
    s = r_img + 2.0 * z_img * z_img
    if s > 0.75:
        return None
    # smaller root of r - r^2/4 = s, written without cancellation
    r = 2.0 * s / (1.0 + math.sqrt(1.0 - s))
    if r < -1.0:
        return None
    th = 2.0 - z_img if i == 0 else 8.0 + z_img
    return (r, th)


def sigma_wn(p, component, n: int):
    """The n-dimensional insertion formulas, taken literally.

    ``p = (r, theta_1, ..., theta_{n-2})``.  Every theta coordinate of the
    image is set to the section value, so for n > 3 the map collapses the
    torus directions and is not injective.
    """
    if n < 4:
        raise DomainError("n must be at least 4")
    if len(p) != n - 1:
        raise DomainError(f"expected {n - 1} coordinates, got {len(p)}")
    i = _component_index(component)
    r, *th = (float(x) for x in p)
    if not -1.0 <= r <= 1.0:
        raise DomainError("r outside [-1, 1]")
    rr = r - radius_defect(p, i)
    if i == 0:
        z = 2.0 - th[0] + sum(t - 2.0 for t in th[1:])
        sec = SECTION_LOWER
    else:
        z = sum(t - 8.0 for t in th)
        sec = SECTION_UPPER
    if not (-1.0 <= z <= 1.0 and rr >= -1.0):
        raise DomainError(f"image of {p} leaves the support")
    return (rr,) + (sec,) * (n - 2) + (z,)


def eval_wilson_field_n(point, ks: Sequence[float]):
    """Velocity ``(d_theta_1..d_theta_{n-2}, d_z)`` of the n-dimensional field."""
    r, *th, z = point
    if len(ks) != len(th):
        raise DomainError("need one rate per torus direction")
    return tuple(ks) + (r * r + z ** 6,)


# --------------------------------------------------------------------------
# plug models


class WilsonPlug:
    """The analytic plug, optionally self-inserted, traced in closed form.

    Between section crossings the leaf at radius ``r`` follows
    ``theta = phi(r, z) + C``; crossings of theta = 6 (lower half) and
    theta = 4 (upper half) are solved by inverting ``phi``.  With
    ``elide_positive`` set, hits whose child has positive radius are
    skipped in bulk: those children are finite leaves with matched ends.
    """

    exact = False
    period = PERIOD

    def __init__(self, inserted: bool = True, elide_positive: bool = False):
        self.inserted = inserted
        self.elide_positive = elide_positive
        self.name = "w3" if inserted else "w3-uninserted"

    def without_insertion(self) -> "WilsonPlug":
        return WilsonPlug(False)

    @staticmethod
    def radius(q) -> float:
        return float(q[0])

    def sigma(self, component: int, q):
        return sigma_w3(q, component)

    def base_distance(self, p, q) -> float:
        d = abs(float(p[1]) - float(q[1])) % PERIOD
        return max(abs(float(p[0]) - float(q[0])), min(d, PERIOD - d))

    def point_distance(self, a, b) -> float:
        if a[3] != b[3]:
            return math.inf
        d = abs(a[1] - b[1]) % PERIOD
        return max(abs(a[0] - b[0]), min(d, PERIOD - d), abs(a[2] - b[2]))

    def in_stopped_core(self, q) -> bool:
        return q[0] == 0.0

    def _child(self, component: int, r: float, z: float):
        if not self.inserted:
            return None
        return sigma_w3_inverse(r, z, component)

    def leaf_walk(self, q) -> Iterator[tuple]:
        r, th0 = float(q[0]), float(q[1]) % PERIOD
        if not -1.0 <= r <= 1.0:
            raise DomainError(f"base point {q} outside F")
        c = th0 - phi(r, -1.0)
        top = math.inf if abs(r) < TINY_RADIUS else th0 + (phi(r, 1.0) - phi(r, -1.0))
        last = th0
        k = math.floor((th0 - SECTION_LOWER) / PERIOD) + 1
        # lower half: theta climbs
        while True:
            sec = SECTION_LOWER + PERIOD * k
            if sec >= top:
                break
            if self.elide_positive and r < 0.0 and self.inserted:
                jump = self._bulk_skip(r, c, k)
                if jump is not None:
                    k_new, count, z_last = jump
                    sec_last = SECTION_LOWER + PERIOD * (k_new - 1)
                    yield ("elided", sec_last - last, count, (r, SECTION_LOWER, z_last, "lower"))
                    last = sec_last
                    k = k_new
                    continue
            z = phi_inverse(r, sec - c)
            point = (r, SECTION_LOWER, z, "lower")
            child = self._child(0, r, z)
            if child is None:
                yield ("sample", sec - last, point)
            elif self.elide_positive and child[0] > 0.0:
                yield ("elided", sec - last, 1, point)
            else:
                yield ("hit", sec - last, point, 0, child)
            last = sec
            k += 1
        # upper half: theta decreases from `top` back to th0
        if abs(r) < TINY_RADIUS:
            return  # pragma: no cover - the r = 0 leaf never leaves the lower half
        c_up = top + phi(r, -1.0)  # theta = c_up - phi(r, z)
        travelled = top - last
        last_theta = top
        k = math.ceil((top - SECTION_UPPER) / PERIOD) - 1
        while True:
            sec = SECTION_UPPER + PERIOD * k
            if sec <= th0:
                break
            z = phi_inverse(r, c_up - sec)
            point = (r, SECTION_UPPER, z, "upper")
            child = self._child(1, r, z)
            dt = travelled + (last_theta - sec)
            travelled = 0.0
            if child is None:
                yield ("sample", dt, point)
            elif self.elide_positive and child[0] > 0.0:
                yield ("elided", dt, 1, point)
            else:
                yield ("hit", dt, point, 1, child)
            last_theta = sec
            k -= 1
        yield ("exit", travelled + (last_theta - th0), (r, th0))

    def _bulk_skip(self, r: float, c: float, k: int):
        """For r < 0: the run of crossings whose children have positive radius.

        Returns ``(k_next, count, z_of_last)`` or None when the next crossing
        is not the start of such a run.
        """
        z_hit = -math.sqrt((0.75 - r) / 2.0)   # s <= 3/4 from here on
        z_band = -math.sqrt(-r / 2.0)          # s <= 0 from here on
        z = phi_inverse(r, SECTION_LOWER + PERIOD * k - c)
        if not (z_hit <= z < z_band):
            return None
        k_band = math.ceil((phi(r, z_band) + c - SECTION_LOWER) / PERIOD)
        # guard against rounding at the band edge
        while k_band > k and phi_inverse(r, SECTION_LOWER + PERIOD * (k_band - 1) - c) >= z_band:
            k_band -= 1
        while phi_inverse(r, SECTION_LOWER + PERIOD * k_band - c) < z_band:
            k_band += 1
        if k_band <= k:
            return None
        z_last = phi_inverse(r, SECTION_LOWER + PERIOD * (k_band - 1) - c)
        return k_band, k_band - k, z_last


# --------------------------------------------------------------------------
# transition histories


class EventKind(str, Enum):
    EXTERNAL_ENTRY = "external_entry"
    INTERNAL_ENTRY = "internal_entry"
    INTERNAL_EXIT = "internal_exit"
    EXTERNAL_EXIT = "external_exit"

    @property
    def is_entry(self) -> bool:
        return self in (EventKind.EXTERNAL_ENTRY, EventKind.INTERNAL_ENTRY)


class Classification(str, Enum):
    FINITE = "finite"
    INFINITE_SUSPECTED = "infinite_suspected"
    BUDGET = "budget_exhausted"


@dataclass
class TransitionEvent:
    kind: EventKind
    base_point: tuple
    time: float
    stack_depth_after: int
    frame: int = -1             # id of the interrupted (entries) or resumed (exits) frame
    point: Optional[tuple] = None  # where the interrupted leaf was cut / resumed
    component: Optional[int] = None
    elided: bool = False


@dataclass
class TransitionHistory:
    events: list[TransitionEvent] = field(default_factory=list)
    matching: list[tuple[int, int]] = field(default_factory=list)
    classification: Classification = Classification.BUDGET
    time: float = 0.0
    max_depth: int = 0
    elided_pairs: int = 0
    transitions: int = 0
    frame_radii: list[list] = field(default_factory=list)  # stack radii at each push
    samples: list[tuple] = field(default_factory=list)      # (t, point, depth)
    circle_candidates: list[dict] = field(default_factory=list)
    depth_trace: list[int] = field(default_factory=list)


@dataclass
class _Frame:
    ident: int
    base: tuple
    walk: Iterator
    component: Optional[int]
    last_sample: dict = field(default_factory=dict)  # section key -> previous sample there


def follow_leaf(
    plug,
    start,
    max_transitions: int = 10_000,
    max_depth: int = 100,
    time_budget: float = 1e4,
    record_samples: bool = False,
    detect_circles: bool = False,
    circle_eps: float = 1e-4,
) -> TransitionHistory:
    """Follow the leaf of the self-inserted plug entering at base point ``start``.

    On reaching ``sigma(q)`` the current leaf is suspended and the leaf of
    ``q`` is followed from its entry point; when that leaf leaves through the
    exit region at base ``q'`` the suspended leaf resumes at ``sigma(q')``.
    Circle candidates are pairs of successive samples of one frame on the
    same section, with no transition in between, lying within ``circle_eps``.
    """
    h = TransitionHistory()
    ids = 0
    stack = [_Frame(ids, tuple(start), plug.leaf_walk(start), None)]
    t = 0.0
    h.events.append(TransitionEvent(EventKind.EXTERNAL_ENTRY, tuple(start), t, 1))
    h.transitions = 1
    h.max_depth = 1
    radii = [plug.radius(start)]
    h.depth_trace.append(1)
    while True:
        if h.transitions >= max_transitions:
            h.classification = Classification.BUDGET
            break
        if t >= time_budget:
            h.classification = Classification.BUDGET
            break
        top = stack[-1]
        item = next(top.walk)
        tag = item[0]
        t += float(item[1])
        if tag == "sample":
            point = item[2]
            if record_samples:
                h.samples.append((t, point, len(stack)))
            if detect_circles:
                key = (round(float(point[1]), 9), point[3])
                prev = top.last_sample.get(key)
                if prev is not None and plug.point_distance(prev[1], point) < circle_eps:
                    h.circle_candidates.append(
                        {"frame_base": top.base, "depth": len(stack), "time": t, "point": point}
                    )
                top.last_sample[key] = (t, point)
        elif tag == "hit":
            _, _, point, comp, child = item
            if record_samples:
                h.samples.append((t, point, len(stack)))
            if len(stack) >= max_depth:
                h.classification = Classification.INFINITE_SUSPECTED
                break
            top.last_sample.clear()
            ids += 1
            stack.append(_Frame(ids, tuple(child), plug.leaf_walk(child), comp))
            radii.append(plug.radius(child))
            h.frame_radii.append(list(radii))
            h.events.append(
                TransitionEvent(EventKind.INTERNAL_ENTRY, tuple(child), t, len(stack), top.ident, point, comp)
            )
            h.transitions += 1
            h.max_depth = max(h.max_depth, len(stack))
            h.depth_trace.append(len(stack))
        elif tag == "elided":
            count = int(item[2])
            top.last_sample.clear()
            h.elided_pairs += count
            h.transitions += 2 * count
        elif tag == "exit":
            base = tuple(item[2])
            done = stack.pop()
            radii.pop()
            if not stack:
                h.events.append(TransitionEvent(EventKind.EXTERNAL_EXIT, base, t, 0, done.ident))
                h.transitions += 1
                h.classification = Classification.FINITE
                h.depth_trace.append(0)
                break
            parent = stack[-1]
            parent.last_sample.clear()
            resume = plug.sigma(done.component, base)
            h.events.append(
                TransitionEvent(EventKind.INTERNAL_EXIT, base, t, len(stack), parent.ident, resume, done.component)
            )
            h.transitions += 1
            h.depth_trace.append(len(stack))
        else:  # pragma: no cover
            raise StructuralError(f"unknown walk item {tag!r}")
    h.time = t
    match_transitions(h)
    return h


def match_transitions(h: TransitionHistory) -> TransitionHistory:
    """Pair entries with exits as balanced parentheses."""
    open_entries: list[int] = []
    pairs = []
    for i, ev in enumerate(h.events):
        if ev.kind.is_entry:
            open_entries.append(i)
        else:
            if not open_entries:
                raise StructuralError(f"exit at position {i} has no open entry")
            pairs.append((open_entries.pop(), i))
    h.matching = sorted(pairs)
    return h


def match_by_rule(kinds: Sequence[bool]) -> list[tuple[int, int]]:
    """Reference matching by the inductive rule (``True`` marks an entry).

    An entry and a later exit are matched when everything strictly between
    them is already matched; adjacent pairs start the induction.  Quadratic
    and deliberately naive.
    """
    matched = [False] * len(kinds)
    pairs = []
    changed = True
    while changed:
        changed = False
        for i, is_entry in enumerate(kinds):
            if not is_entry or matched[i]:
                continue
            for j in range(i + 1, len(kinds)):
                if matched[j]:
                    continue
                if not kinds[j]:
                    pairs.append((i, j))
                    matched[i] = matched[j] = True
                    changed = True
                break
    return sorted(pairs)


def history_from_kinds(kinds: Iterable[str]) -> TransitionHistory:
    """Bare history from short kind codes: ``Ent``, ``ent``, ``ex``, ``Ex``."""
    table = {
        "Ent": EventKind.EXTERNAL_ENTRY,
        "ent": EventKind.INTERNAL_ENTRY,
        "ex": EventKind.INTERNAL_EXIT,
        "Ex": EventKind.EXTERNAL_EXIT,
    }
    h = TransitionHistory()
    depth = 0
    for i, k in enumerate(kinds):
        if k not in table:
            raise StructuralError(f"unknown transition code {k!r}")
        kind = table[k]
        depth += 1 if kind.is_entry else -1
        h.events.append(TransitionEvent(kind, (), float(i), max(depth, 0)))
    return match_transitions(h)


def is_non_crossing(pairs: Sequence[tuple[int, int]]) -> bool:
    for a, b in pairs:
        for c, d in pairs:
            if a < c < b < d:
                return False
    return True


# --------------------------------------------------------------------------
# verification


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": bool(self.passed), "detail": self.detail}


@dataclass
class Report:
    suite: str
    checks: list[Check] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> Check:
        c = Check(name, bool(passed), detail)
        self.checks.append(c)
        return c


def _close(plug, a, b, tol) -> bool:
    if plug.exact:
        return tuple(a) == tuple(b)
    return plug.base_distance(a, b) <= tol


def _close_points(plug, a, b, tol) -> bool:
    if plug.exact:
        return tuple(a) == tuple(b)
    return plug.point_distance(a, b) <= tol


def verify_matching_lemma(h: TransitionHistory, plug, tolerance: float = 1e-6) -> Report:
    """Matched internal pairs share base point, interrupted leaf and cut point."""
    rep = Report("matching_lemma")
    violations = []
    for i, j in h.matching:
        a, b = h.events[i], h.events[j]
        if a.kind is EventKind.EXTERNAL_ENTRY:
            if b.kind is not EventKind.EXTERNAL_EXIT:
                violations.append(f"external entry {i} matched to {b.kind.value} {j}")
            elif not _close(plug, a.base_point, b.base_point, tolerance):
                violations.append(f"external ends {i},{j}: {a.base_point} vs {b.base_point}")
            continue
        if b.kind is not EventKind.INTERNAL_EXIT:
            violations.append(f"internal entry {i} matched to {b.kind.value} {j}")
            continue
        if a.frame != b.frame:
            violations.append(f"pair {i},{j}: interrupted leaf {a.frame} resumed as {b.frame}")
        if a.component != b.component:
            violations.append(f"pair {i},{j}: component {a.component} vs {b.component}")
        if not _close(plug, a.base_point, b.base_point, tolerance):
            violations.append(f"pair {i},{j}: pushed {a.base_point} popped {b.base_point}")
        if a.point is None or b.point is None or not _close_points(plug, a.point, b.point, tolerance):
            violations.append(f"pair {i},{j}: cut at {a.point} resumed at {b.point}")
    rep.add("interrupted_leaf_law", not violations, "; ".join(violations[:5]) or f"{len(h.matching)} pairs")
    rep.data["violations"] = violations
    return rep


def verify_history_laws(h: TransitionHistory) -> list[str]:
    """Structural laws every history satisfies; returns problems found."""
    problems = []
    kinds = [e.kind.is_entry for e in h.events]
    if h.matching != match_by_rule(kinds):
        problems.append("stack matching differs from the inductive rule")
    if not is_non_crossing(h.matching):
        problems.append("matching crosses")
    if h.classification is Classification.FINITE:
        if 2 * len(h.matching) != len(h.events):
            problems.append("finite history has unmatched events")
        if (0, len(h.events) - 1) not in h.matching:
            problems.append("first entry not matched to last exit")
    depth = 0
    for e in h.events:
        depth += 1 if e.kind.is_entry else -1
        if depth != e.stack_depth_after:
            problems.append("depth bookkeeping off")
            break
    return problems


def _radii_problems(h: TransitionHistory, strict: bool = True) -> list[str]:
    """Stack radii must strictly increase from the bottom frame to the top one."""
    bad = []
    for radii in h.frame_radii:
        for a, b in zip(radii, radii[1:]):
            if (b <= a) if strict else (b < a):
                bad.append(f"{a} -> {b}")
    return bad


def uniform_grid(nr: int, ntheta: int, r_lo=-1.0, r_hi=1.0, period=PERIOD) -> list[tuple[float, float]]:
    """``r_k = r_lo + (r_hi - r_lo) k / nr`` and ``theta_j = period j / ntheta``."""
    return [
        (r_lo + (r_hi - r_lo) * k / nr, period * j / ntheta)
        for k in range(nr)
        for j in range(ntheta)
    ]


def verify_aperiodicity(
    plug,
    grid: Sequence,
    max_transitions: int = 10_000,
    max_depth: int = 100,
    time_budget: float = 1e4,
    eps: float = 1e-4,
) -> Report:
    """Radius monotonicity of stacks and absence of recurrent section states."""
    rep = Report("aperiodic")
    candidates = []
    radius_bad = []
    classes: dict[str, int] = {}
    for q in grid:
        h = follow_leaf(plug, q, max_transitions, max_depth, time_budget, detect_circles=True, circle_eps=eps)
        classes[h.classification.value] = classes.get(h.classification.value, 0) + 1
        if h.circle_candidates:
            c = h.circle_candidates[0]
            candidates.append({"start": q, "frame_base": c["frame_base"], "point": c["point"]})
        bad = _radii_problems(h)
        if bad:
            radius_bad.append((q, bad[0]))
    rep.add("stack_radii_monotone", not radius_bad,
            f"{len(radius_bad)} traces with non-monotone stacks" + (f", first {radius_bad[0]}" if radius_bad else ""))
    rep.add("no_circle_candidates", not candidates,
            f"{len(candidates)} candidates" + (f", first {candidates[0]}" if candidates else ""))
    rep.data.update(candidates=candidates, classifications=classes, traces=len(grid))
    return rep


def defect_floor(eps: float) -> float:
    """Minimum of the radius defect at distance >= eps from both critical points.

    The defect ``r^2/4 + 2 (theta-c)^2`` is minimised on the circle of
    radius eps about ``(0, c)``, at ``theta = c``, giving ``eps^2/4``.
    """
    return eps * eps / 4


def defect_floor_grid(eps: float, n: int = 400) -> float:
    """Brute-force minimum of the defect over a fine grid outside the eps-discs."""
    best = math.inf
    for i in range(n + 1):
        r = -1.0 + 2.0 * i / n
        for j in range(n + 1):
            for c in CENTERS:
                th = c - 1.0 + 2.0 * j / n
                if math.hypot(r, th - c) < eps:
                    continue
                best = min(best, r * r / 4 + 2 * (th - c) ** 2)
    return best


def stack_height_bound(
    eps: float,
    grid: Sequence,
    plug=None,
    max_transitions: int = 10_000,
    max_depth: Optional[int] = None,
    time_budget: float = 1e4,
) -> tuple[float, int, int, Report]:
    """Return ``(C, ceil(2/C), observed max height, report)``.

    Only starts with ``|r| >= eps`` are traced, and a trace counts when no
    frame ever has radius in ``(-eps, eps)``.
    """
    plug = plug or WilsonPlug(True)
    C = defect_floor(eps)
    bound = math.ceil(2.0 / C)
    depth_cap = max_depth if max_depth is not None else bound + 10
    observed = 0
    counted = skipped = unfinished = 0
    for q in grid:
        if abs(q[0]) < eps:
            continue
        h = follow_leaf(plug, q, max_transitions, depth_cap, time_budget)
        if any(abs(r) < eps for radii in h.frame_radii for r in radii):
            skipped += 1
            continue
        counted += 1
        if h.classification is not Classification.FINITE:
            unfinished += 1
        observed = max(observed, h.max_depth)
    rep = Report("stackbound")
    rep.add("height_within_bound", observed <= bound, f"eps={eps} C={C:.6g} bound={bound} observed={observed}")
    rep.add("traces_counted", counted > 0, f"counted={counted} skipped={skipped}")
    # heights seen on a truncated trace are still heights of the leaf's stack
    rep.data.update(C=C, bound=bound, observed_max=observed, counted=counted, unfinished=unfinished)
    return C, bound, observed, rep


def slope_bound_holds(r: float, z: float) -> bool:
    return r * r + z ** 6 <= math.sqrt(2.0) * r * r


def verify_content_stopping(
    r_grid: Sequence[float],
    n_theta: int = 50,
    max_transitions: int = 1_000_000,
    max_depth: int = 100,
    growth_threshold: int = 1,
    z_samples: int = 201,
) -> Report:
    """Leaves entering at small negative radius never leave.

    Each start is followed with positive-radius children elided; the
    trace must run out of transitions without ever popping a non-elided
    frame and must reach a stack depth above ``growth_threshold``.
    """
    rep = Report("content")
    for r in r_grid:
        if not -1 / 20 < r < 0:
            raise DomainError(f"radius {r} outside (-1/20, 0)")
    plug = WilsonPlug(True, elide_positive=True)
    failures = []
    depths = []
    for r in r_grid:
        for j in range(n_theta):
            q = (r, PERIOD * j / n_theta)
            h = follow_leaf(plug, q, max_transitions, max_depth, math.inf)
            monotone = all(b >= a for a, b in zip(h.depth_trace, h.depth_trace[1:]))
            depths.append(h.max_depth)
            if h.classification is Classification.FINITE or not monotone or h.max_depth <= growth_threshold:
                failures.append((q, h.classification.value, h.max_depth, monotone))
    rep.add("all_stopped", not failures,
            f"{len(failures)} failures" + (f", first {failures[0]}" if failures else ""))
    slope_bad = []
    checked = 0
    for r in r_grid:
        for i in range(z_samples):
            z = -1.0 + 2.0 * i / (z_samples - 1)
            if r <= -2 * z * z:
                checked += 1
                if not slope_bound_holds(r, z):
                    slope_bad.append((r, z))
    rep.add("slope_bound", not slope_bad and checked > 0, f"{checked} points checked, {len(slope_bad)} violations")
    rep.data.update(depths=depths, min_depth=min(depths) if depths else 0)
    return rep


def verify_radius_inequality(n: int = 200) -> Report:
    """The defect on an ``n x n`` grid of each component's domain box."""
    rep = Report("radius")
    for i, c in enumerate(CENTERS):
        zeros = []
        negative = []
        for a in range(n):
            r = -1.0 + 2.0 * a / n
            for b in range(n):
                th = c - 1.0 + 2.0 * b / n
                d = radius_defect((r, th), i)
                rr = sigma_w3((r, th), i)[0] if in_sigma_domain((r, th), i) else r - d
                if abs((r - rr) - d) > 1e-12:
                    negative.append((r, th, "formula"))
                if d < 0:
                    negative.append((r, th, d))
                elif d == 0:
                    zeros.append((r, th))
        ok_zeros = all((r, th) == (0.0, c) for r, th in zeros)
        rep.add(f"defect_nonnegative_{COMPONENTS[i]}", not negative, f"{len(negative)} violations")
        rep.add(f"zeros_only_at_critical_{COMPONENTS[i]}", ok_zeros, f"zeros at {zeros}")
    return rep


def verify_radius_inequality_n(n: int, steps: int = 9) -> Report:
    import itertools

    rep = Report("radius")
    for i, c in enumerate(CENTERS):
        bad = []
        axis = [c - 0.5 + k / (steps - 1) for k in range(steps)]
        for r in [-1.0 + 2.0 * a / (steps - 1) for a in range(steps)]:
            for th in itertools.product(axis, repeat=n - 2):
                d = radius_defect((r,) + th, i)
                if d < 0 or (d == 0 and (r != 0 or any(t != c for t in th))):
                    bad.append((r,) + th)
        rep.add(f"defect_nonnegative_{COMPONENTS[i]}", not bad, f"{len(bad)} violations")
    return rep


def random_finite_histories(plug, count: int, rng, draw_start, max_tries: int = 10_000, **budgets):
    """Draw starts with ``draw_start(rng)`` until ``count`` traces finish."""
    out = []
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        q = draw_start(rng)
        h = follow_leaf(plug, q, **budgets)
        if h.classification is Classification.FINITE:
            out.append((q, h))
    return out


def verify_matching_suite(plug, histories, tolerance: float = 1e-6) -> Report:
    """Structural laws plus the interrupted-leaf law over a batch of histories."""
    rep = Report("matching")
    law_bad, lemma_bad = [], []
    internal = 0
    for q, h in histories:
        problems = verify_history_laws(h)
        if problems:
            law_bad.append((q, problems[0]))
        lem = verify_matching_lemma(h, plug, tolerance)
        if not lem.passed:
            lemma_bad.append((q, lem.data["violations"][0]))
        internal += sum(1 for e in h.events if e.kind is EventKind.INTERNAL_ENTRY)
    rep.add("histories", len(histories) > 0, f"{len(histories)} finite histories, {internal} internal entries")
    rep.add("non_crossing_and_endpoints", not law_bad, f"problems {law_bad[:2]}")
    rep.add("interrupted_leaf_law", not lemma_bad, f"problems {lemma_bad[:2]}")
    return rep
