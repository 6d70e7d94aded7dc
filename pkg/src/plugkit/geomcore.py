"""Numeric primitives for the analytic Wilson-type plug.

The semi-plug lives in ``[-1,1] x R/10 x [-1,1]`` with field
``d/dtheta + (r^2 + z^6) d/dz``; the mirror half reverses the theta
component.  Leaves have a closed form through the antiderivative ``A`` of
``1/(1+x^6)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Sequence

PERIOD = 10.0
SQRT3 = math.sqrt(3.0)


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class SingularityError(DomainError):
    """The closed form is undefined (a point of the circle T)."""


class Half(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


@dataclass(frozen=True)
class CylPoint:
    r: float
    theta: float  # unwound lift
    z: float
    half: Half = Half.LOWER

    def __post_init__(self):
        if not isinstance(self.half, Half):
            object.__setattr__(self, "half", Half(self.half))

    @property
    def theta_mod(self) -> float:
        return self.theta % PERIOD

    def in_bounds(self, slack: float = 1e-12) -> bool:
        return (
            -1 - slack <= self.r <= 1 + slack
            and -1 - slack <= self.z <= 1 + slack
            and math.isfinite(self.theta)
        )


@dataclass(frozen=True)
class Velocity:
    d_theta: float
    d_z: float
    d_r: float = 0.0


# --------------------------------------------------------------------------
# fields


def eval_wilson_field(p: CylPoint) -> Velocity:
    if not p.in_bounds():
        raise DomainError(f"{p} outside [-1,1] x S^1 x [-1,1]")
    dz = p.r * p.r + p.z ** 6
    return Velocity(1.0 if p.half is Half.LOWER else -1.0, dz)


def eval_irrational_s3_field(x: complex, y: complex, slope: float) -> tuple[complex, complex]:
    """Linear field ``(ix, i*slope*y)`` on the unit sphere of C^2."""
    norm = abs(x) ** 2 + abs(y) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise DomainError(f"|x|^2+|y|^2 = {norm} is not 1")
    return (1j * x, 1j * slope * y)


# --------------------------------------------------------------------------
# the special function A


def _integrand(x: float) -> float:
    return 1.0 / (1.0 + x ** 6)


def _tail_integrand(u: float) -> float:
    # after x = 1/u: dx/(1+x^6) = -u^4/(1+u^6) du
    return u ** 4 / (1.0 + u ** 6)


def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12) -> float:
    """Adaptive Simpson quadrature with Richardson correction (iterative)."""
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        a, b, fa, fm, fb, whole, eps, depth = stack.pop()
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4 * flm + fm) / 6
        right = (b - m) * (fm + 4 * frm + fb) / 6
        delta = left + right - whole
        if depth >= 50 or abs(delta) <= 15 * eps:
            total += left + right + delta / 15
        else:
            stack.append((a, m, fa, flm, fm, left, eps / 2, depth + 1))
            stack.append((m, b, fm, frm, fb, right, eps / 2, depth + 1))
    return total


_TAIL_CUT = 8.0


@lru_cache(maxsize=None)
def _A_at_cut() -> float:
    return adaptive_simpson(_integrand, 0.0, _TAIL_CUT)


@lru_cache(maxsize=None)
def A_infinity() -> float:
    """Half-line integral of ``1/(1+x^6)``, by quadrature."""
    return _A_at_cut() + adaptive_simpson(_tail_integrand, 0.0, 1.0 / _TAIL_CUT)


def antiderivative_A(x: float) -> float:
    """``A(x) = integral_0^x dt/(1+t^6)`` by adaptive Simpson.

    Beyond ``|x| = 8`` the remaining piece is integrated in ``u = 1/t``.
    ``math.inf`` and ``-math.inf`` are accepted.
    """
    if math.isnan(x):
        raise DomainError("A(nan)")
    if x < 0:
        return -antiderivative_A(-x)
    if x <= _TAIL_CUT:
        return adaptive_simpson(_integrand, 0.0, x)
    if math.isinf(x):
        return A_infinity()
    return _A_at_cut() + adaptive_simpson(_tail_integrand, 1.0 / x, 1.0 / _TAIL_CUT)


A_INF_EXACT = math.pi / 3


def A_closed(x: float) -> float:
    """Elementary closed form of ``A`` (partial fractions of 1/(1+x^6)).

    Used in inner loops; agreement with :func:`antiderivative_A` is tested.
    """
    if math.isinf(x):
        return math.copysign(A_INF_EXACT, x)
    if x < 0:
        return -A_closed(-x)
    if x > 1e4:
        # asymptotic tail avoids cancellation: A(inf) - 1/(5x^5) + 1/(11x^11)
        return A_INF_EXACT - 1.0 / (5 * x ** 5) + 1.0 / (11 * x ** 11)
    x2 = x * x
    s3x = SQRT3 * x
    log_part = (SQRT3 / 12) * math.log((x2 + s3x + 1) / (x2 - s3x + 1))
    atan_part = math.atan(x) / 3 + (math.atan(2 * x - SQRT3) + math.atan(2 * x + SQRT3)) / 6
    return log_part + atan_part


def A_closed_inverse(y: float) -> float:
    """Solve ``A(x) = y`` for ``|y| < A(inf)``."""
    if y < 0:
        return -A_closed_inverse(-y)
    if y == 0:
        return 0.0
    if y >= A_INF_EXACT:
        return math.inf
    gap = A_INF_EXACT - y
    if gap < 1e-6:
        # near infinity invert the tail expansion A ~ A_inf - 1/(5x^5)
        x = (1.0 / (5.0 * gap)) ** 0.2
    else:
        x = y if y < 0.8 else (1.0 / (5.0 * gap)) ** 0.2
    for _ in range(100):
        step = (A_closed(x) - y) * (1.0 + x ** 6)
        nx = x - step
        if nx <= 0:
            nx = x / 2
        if abs(nx - x) <= 1e-15 * max(1.0, x):
            return nx
        x = nx
    return x


# --------------------------------------------------------------------------
# closed-form leaves


# Below this radius a leaf needs more than 1e100 time units to cross a half,
# and |r|^(-5/3) would overflow; such leaves are traced with the r = 0 formula.
TINY_RADIUS = 1e-60


def phi(r: float, z: float) -> float:
    """Theta as a function of z on the leaf at radius r, up to a constant."""
    if abs(r) < TINY_RADIUS:
        if z == 0.0:
            raise SingularityError("r = z = 0 lies on the circle T")
        return -1.0 / (5.0 * z ** 5)
    a = abs(r)
    return a ** (-5.0 / 3.0) * A_closed(a ** (-1.0 / 3.0) * z)


def phi_inverse(r: float, value: float, sign_hint: float = -1.0) -> float:
    """Height z with ``phi(r, z) = value``; returns +-inf if unreachable."""
    if abs(r) < TINY_RADIUS:
        if value == 0.0:
            return math.copysign(math.inf, sign_hint)
        # -1/(5 z^5) = value  ->  z = (-1/(5 value))^(1/5)
        w = -1.0 / (5.0 * value)
        return math.copysign(abs(w) ** 0.2, w)
    a = abs(r)
    return A_closed_inverse(value * a ** (5.0 / 3.0)) * a ** (1.0 / 3.0)


def leaf_theta_closed_form(r: float, z: float, C: float) -> float:
    """Theta lift of the leaf at radius ``r`` with integration constant ``C``."""
    return phi(r, z) + C


def theta_across_half(r: float) -> float:
    """Theta advance of the leaf at radius r from z=-1 to z=1 (inf at r=0)."""
    if abs(r) < TINY_RADIUS:
        return math.inf
    return phi(r, 1.0) - phi(r, -1.0)


# --------------------------------------------------------------------------
# integrator


class Termination(str, Enum):
    EXITED = "exited_boundary"
    BUDGET = "budget_exhausted"
    CLOSED = "closed_up"
    HIT = "hit_event"


@dataclass(frozen=True)
class EventSurface:
    """A signed level function; an event fires where it changes sign.

    For a periodic theta section use :func:`theta_section`, which unwraps
    the lift so each crossing of the section is a separate sign change.
    """

    name: str
    level: Callable[[CylPoint], float]
    terminal: bool = False


def theta_section(value: float, period: float = PERIOD, half: Optional[Half] = None, terminal=False) -> EventSurface:
    def level(p: CylPoint) -> float:
        if half is not None and p.half is not half:
            return math.nan
        # sawtooth in (-period/2, period/2]; the wrap discontinuity is far from 0
        d = (p.theta - value) % period
        return d - period if d > period / 2 else d

    return EventSurface(f"theta={value:g}", level, terminal)


@dataclass
class LeafTrace:
    samples: list[tuple[float, CylPoint]] = field(default_factory=list)
    events: list[tuple[float, str, CylPoint]] = field(default_factory=list)
    termination: Termination = Termination.BUDGET

    @property
    def last(self) -> CylPoint:
        return self.samples[-1][1]


FieldFn = Callable[[CylPoint], Velocity]


def _rk4(fn: FieldFn, p: CylPoint, h: float) -> CylPoint:
    k1 = fn(p)
    p2 = CylPoint(p.r, p.theta + 0.5 * h * k1.d_theta, p.z + 0.5 * h * k1.d_z, p.half)
    k2 = fn(p2)
    p3 = CylPoint(p.r, p.theta + 0.5 * h * k2.d_theta, p.z + 0.5 * h * k2.d_z, p.half)
    k3 = fn(p3)
    p4 = CylPoint(p.r, p.theta + h * k3.d_theta, p.z + h * k3.d_z, p.half)
    k4 = fn(p4)
    return CylPoint(
        p.r + h * (k1.d_r + 2 * k2.d_r + 2 * k3.d_r + k4.d_r) / 6,
        p.theta + h * (k1.d_theta + 2 * k2.d_theta + 2 * k3.d_theta + k4.d_theta) / 6,
        p.z + h * (k1.d_z + 2 * k2.d_z + 2 * k3.d_z + k4.d_z) / 6,
        p.half,
    )


def _unbounded(fn: FieldFn) -> FieldFn:
    """Evaluate the polynomial field slightly past z=1 for RK4 stages."""
    if fn is eval_wilson_field:
        def raw(p: CylPoint) -> Velocity:
            return Velocity(1.0 if p.half is Half.LOWER else -1.0, p.r * p.r + p.z ** 6)
        return raw
    return fn


def integrate_leaf(
    field_fn: FieldFn,
    start: CylPoint,
    step: float = 1e-3,
    budget: float = 1e4,
    event_surfaces: Sequence[EventSurface] = (),
    concatenated: bool = False,
    event_tol: float = 1e-10,
) -> LeafTrace:
    """Fixed-step RK4 from ``start`` for at most ``budget`` units of time.

    Leaving through ``z = 1`` ends the trace, unless ``concatenated`` is
    set and the point is in the lower half: then it continues in the
    upper half from ``z = -1`` (the top of one half glued to the bottom of
    the other).  Sign changes of event levels are refined by bisection on
    the step length until ``|level| < event_tol``.
    """
    if step <= 0 or budget <= 0:
        raise ValueError("step and budget must be positive")
    if not start.in_bounds(0.0):
        raise DomainError(f"start {start} outside the support")
    fn = _unbounded(field_fn)
    trace = LeafTrace()
    t = 0.0
    p = start
    trace.samples.append((t, p))
    levels = [s.level(p) for s in event_surfaces]
    while t < budget:
        h = min(step, budget - t)
        q = _rk4(fn, p, h)
        if q.z >= 1.0:
            # locate the boundary crossing by bisection on the step
            lo, hi = 0.0, h
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if _rk4(fn, p, mid).z >= 1.0:
                    hi = mid
                else:
                    lo = mid
                if hi - lo < 1e-15:
                    break
            h = hi
            q = _rk4(fn, p, h)
            q = CylPoint(q.r, q.theta, 1.0, q.half)
            t_new = t + h
            if _check_events(fn, event_surfaces, levels, p, q, t, h, trace, event_tol):
                trace.samples.append((trace.events[-1][0], trace.events[-1][2]))
                trace.termination = Termination.HIT
                return trace
            trace.samples.append((t_new, q))
            if concatenated and q.half is Half.LOWER:
                p = CylPoint(q.r, q.theta, -1.0, Half.UPPER)
                t = t_new
                levels = [s.level(p) for s in event_surfaces]
                continue
            trace.termination = Termination.EXITED
            return trace
        if _check_events(fn, event_surfaces, levels, p, q, t, h, trace, event_tol):
            trace.samples.append((trace.events[-1][0], trace.events[-1][2]))
            trace.termination = Termination.HIT
            return trace
        t += h
        p = q
        trace.samples.append((t, p))
    trace.termination = Termination.BUDGET
    return trace


def _check_events(fn, surfaces, levels, p, q, t, h, trace, tol) -> bool:
    """Record events between p and q; update ``levels``; True if a terminal one fired."""
    fired_terminal = False
    for i, s in enumerate(surfaces):
        a = levels[i]
        b = s.level(q)
        levels[i] = b
        if math.isnan(a) or math.isnan(b):
            continue
        if a == 0.0 or (a < 0.0) == (b < 0.0):
            continue
        if abs(a - b) > 0.5 * PERIOD:  # wrap of the sawtooth, not a crossing
            continue
        lo, hi = 0.0, h
        x = q
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            x = _rk4(fn, p, mid)
            v = s.level(x)
            if abs(v) < tol:
                break
            if (v < 0.0) == (a < 0.0):
                lo = mid
            else:
                hi = mid
        trace.events.append((t + 0.5 * (lo + hi), s.name, x))
        if s.terminal:
            fired_terminal = True
    return fired_terminal


# --------------------------------------------------------------------------
# asymptotics of the minimal set


@dataclass(frozen=True)
class AsymptoticRecord:
    n: int
    z_n: float
    theta_n: float
    r_n: float
    theta_prime_n: float

    @property
    def theta_prime_mod10(self) -> float:
        return self.theta_prime_n % PERIOD


def _newton_rn(z: float, tol: float = 1e-12, cap: int = 50) -> float:
    target = 2.0 * z * z
    r = target
    for _ in range(cap):
        g = r - r * r / 4 - target
        nr = r - g / (1 - r / 2)
        if abs(nr - r) < tol:
            return nr
        r = nr
    return r


def asymptotic_record(n: int) -> AsymptoticRecord:
    if n < 0:
        raise DomainError("n must be nonnegative")
    z = -((21.0 + 50.0 * n) ** -0.2)
    theta = 2.0 - z
    r = _newton_rn(z)
    theta_prime = theta + 2.0 * r ** (-5.0 / 3.0) * A_closed(r ** (-1.0 / 3.0))
    return AsymptoticRecord(n, z, theta, r, theta_prime)


def asymptotic_prediction(n: int, a_inf: float = A_INF_EXACT) -> float:
    """The leading-order formula ``2 + 2^(1/3) (21+50n)^(2/3) A(inf)``."""
    return 2.0 + 2.0 ** (1.0 / 3.0) * (21.0 + 50.0 * n) ** (2.0 / 3.0) * a_inf


def sup_gap_mod(values: Sequence[float], period: float = PERIOD) -> float:
    """Largest gap between consecutive points of a finite subset of R/period."""
    pts = sorted(v % period for v in values)
    if not pts:
        return period
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    gaps.append(pts[0] + period - pts[-1])
    return max(gaps)


__all__ = [
    "A_INF_EXACT", "A_closed", "A_closed_inverse", "A_infinity", "AsymptoticRecord",
    "CylPoint", "DomainError", "EventSurface", "Half", "LeafTrace", "PERIOD",
    "SingularityError", "Termination", "Velocity", "adaptive_simpson", "antiderivative_A",
    "asymptotic_prediction", "asymptotic_record", "eval_irrational_s3_field", "eval_wilson_field",
    "integrate_leaf", "leaf_theta_closed_form", "phi", "phi_inverse", "sup_gap_mod",
    "TINY_RADIUS", "theta_across_half", "theta_section",
]
