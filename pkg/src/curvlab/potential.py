"""Capacitary potential / Green's-function solver on a MetricProfile.

The radial harmonic function satisfies (f^2 u')' = 0, so |grad u| = c/f^2
with a single normalisation constant:

  * with boundary:  u(x) = c * Int_{x_min}^{x} f^-2 ds, with c = capacity,
    chosen so u -> 1 at infinity;
  * boundaryless:   u(x) = 1 - Int_x^oo f^-2 ds  (u = 1 - 4 pi G_o, c = 1).

u is evaluated from the tail integral T(x) = Int_x^oo f^-2 ds, computed by
per-level quadrature against canonical power-of-two anchors.  Each anchor
value is an independent semi-infinite integral, and the anchor used for a
given x depends on x alone, so query results are bitwise independent of
evaluation order and safe to compute concurrently.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import NonConvergent, OutOfRange, WrongKind
from .numerics import Tolerance, integrate
from .profile import MetricProfile, ProfileKind, scalar_curvature

__all__ = [
    "SolutionKind",
    "PotentialSolution",
    "LevelParam",
    "LevelSetSample",
    "solve",
    "capacity",
    "level",
    "level_value",
    "t_of_level",
    "level_integrals",
    "u_value",
    "grad_value",
    "volume_to_coordinate",
    "default_t_grid",
]

_FOUR_PI = 4.0 * math.pi
_TAIL_TOL = Tolerance(rel=5e-13, abs=0.0, max_refinements=60)
_VOLUME_TOL = Tolerance(rel=1e-11, abs=1e-13, max_refinements=60)


class SolutionKind(str, Enum):
    CAPACITARY_WITH_BOUNDARY = "capacitary_with_boundary"
    GREEN_BOUNDARYLESS = "green_boundaryless"


@dataclass(frozen=True)
class LevelParam:
    """One level of u in the three equivalent labels: t, radial coordinate, u-value."""

    t: float
    s: float
    u: float


@dataclass(frozen=True)
class LevelSetSample:
    """Pointwise and integrated level-set geometry at one t.

    On round level sets each surface integral is 4 pi f^2 times the
    pointwise value of its integrand.
    """

    t: float
    s: float
    u: float
    area: float
    grad: float
    mean_curvature: float
    scalar_R: float
    scalar_R_level: float
    int_grad: float
    int_grad_sq: float
    int_grad_H: float
    int_inv_grad: float


class _TailCache:
    """T(x) = Int_x^oo ds/f^2 with canonical anchors at x_ref * 2^k.

    Every anchor value is an independent semi-infinite integral and the
    anchor serving a query depends on the query coordinate alone, so T(x)
    is bitwise independent of evaluation order.
    """

    def __init__(self, profile: MetricProfile):
        self._p = profile
        boundary = profile.kind is ProfileKind.WITH_BOUNDARY
        self._x_floor = profile.x_min if boundary else None
        anchored_at_boundary = boundary and profile.x_min > 0.0
        self._ref = profile.x_min if anchored_at_boundary else 1.0
        self._k_floor = 0 if anchored_at_boundary else None
        self._anchors: dict[int, float] = {}
        self._total: float | None = None
        self._lock = threading.Lock()

    def _integrand(self, x: float) -> float:
        fx = self._p.f(x)
        return self._p.ds_dx(x) / (fx * fx)

    def anchor_x(self, k: int) -> float:
        return self._ref * (2.0 ** k)

    def anchor_value(self, k: int) -> float:
        if self._k_floor is not None:
            k = max(k, self._k_floor)
        with self._lock:
            cached = self._anchors.get(k)
        if cached is not None:
            return cached
        value = integrate(
            self._integrand, self.anchor_x(k), math.inf, _TAIL_TOL, points=self._p.breakpoints
        ).value
        with self._lock:
            # A concurrent duplicate computes the identical value; keep the first.
            return self._anchors.setdefault(k, value)

    def total(self) -> float:
        """T at the boundary coordinate (boundary profiles only)."""
        if self._k_floor is not None:
            return self.anchor_value(0)
        with self._lock:
            cached = self._total
        if cached is not None:
            return cached
        value = integrate(
            self._integrand, self._x_floor, math.inf, _TAIL_TOL, points=self._p.breakpoints
        ).value
        with self._lock:
            if self._total is None:
                self._total = value
            return self._total

    def index_for(self, x: float) -> int:
        k = math.floor(math.log2(x / self._ref))
        if self._k_floor is not None:
            k = max(k, self._k_floor)
        return k

    def value(self, x: float) -> float:
        if self._x_floor is not None and x <= self._x_floor:
            if x < self._x_floor * (1.0 - 1e-12) - 1e-300:
                raise OutOfRange(f"x={x!r} below the boundary coordinate {self._x_floor!r}")
            return self.total()
        if x <= 0.0:
            raise OutOfRange(f"tail integral needs x > 0, got {x!r}")
        k = self.index_for(x)
        xa = self.anchor_x(k)
        t_anchor = self.anchor_value(k)
        if x == xa:
            return t_anchor
        piece = integrate(self._integrand, xa, x, _TAIL_TOL, points=self._p.breakpoints).value
        return t_anchor - piece


@dataclass
class PotentialSolution:
    """Solved radial potential: normalisation constant, capacity, level maps."""

    profile: MetricProfile
    kind: SolutionKind
    c_norm: float
    capacity: float | None
    grad_vanishes_at_infinity: bool
    _tail: _TailCache = field(repr=False, compare=False, default=None)

    @property
    def t_min(self) -> float:
        if self.kind is SolutionKind.CAPACITARY_WITH_BOUNDARY:
            return 0.5 * self.capacity
        return 0.0


def solve(p: MetricProfile) -> PotentialSolution:
    """Solve the capacitary-potential (boundary) or Green's-function problem."""
    tail = _TailCache(p)
    if p.kind is ProfileKind.WITH_BOUNDARY:
        try:
            total = tail.total()  # T(x_min)
        except NonConvergent as exc:
            raise NonConvergent(f"profile {p.label!r} is parabolic: {exc}") from exc
        c = 1.0 / total
        cap: float | None = c
        kind = SolutionKind.CAPACITARY_WITH_BOUNDARY
    else:
        c = 1.0
        cap = None
        kind = SolutionKind.GREEN_BOUNDARYLESS

    # Paper hypothesis |grad u| -> 0 at infinity, sampled on a coarse grid.
    gs = [c / p.f(x * p.x_scale) ** 2 for x in (1e2, 1e3, 1e4)]
    vanishes = gs[0] > gs[1] > gs[2] and gs[2] < 1e-6 * max(1.0, c)

    return PotentialSolution(
        profile=p,
        kind=kind,
        c_norm=c,
        capacity=cap,
        grad_vanishes_at_infinity=vanishes,
        _tail=tail,
    )


def capacity(sol: PotentialSolution, check: bool = True) -> float:
    """Boundary capacity C = (1/4pi) Int_{dM} |grad u| dsigma.

    Cross-checked against the bulk representation (1/4pi) Int_M |grad u|^2 dvol
    by an independent quadrature pass.
    """
    if sol.kind is not SolutionKind.CAPACITARY_WITH_BOUNDARY:
        raise WrongKind("capacity is defined for boundary solutions only")
    p = sol.profile
    c = sol.c_norm
    f_b = p.f(p.x_min)
    boundary_flux = (f_b * f_b) * (c / (f_b * f_b))  # (1/4pi) * 4 pi f^2 |grad u|
    if check:
        def bulk(x: float) -> float:
            fx = p.f(x)
            g = c / (fx * fx)
            return g * g * fx * fx * p.ds_dx(x)

        bulk_value = integrate(bulk, p.x_min, math.inf, _TAIL_TOL, points=p.breakpoints).value
        if abs(bulk_value - boundary_flux) > 1e-6 * max(boundary_flux, 1.0):
            raise NonConvergent(
                "capacity cross-check failed: boundary flux %r vs bulk energy %r"
                % (boundary_flux, bulk_value)
            )
    return boundary_flux


def level_value(sol: PotentialSolution, t: float) -> float:
    """The u-level labelled by t."""
    if sol.kind is SolutionKind.CAPACITARY_WITH_BOUNDARY:
        cap = sol.capacity
        if t < 0.5 * cap * (1.0 - 1e-12):
            raise OutOfRange(f"t={t!r} below C/2={0.5 * cap!r}")
        return (1.0 - cap / (2.0 * t)) / (1.0 + cap / (2.0 * t))
    if t <= 0.0:
        raise OutOfRange(f"t={t!r} must be positive for a boundaryless solution")
    return 1.0 - 1.0 / t


def t_of_level(sol: PotentialSolution, u: float) -> float:
    """Inverse of level_value."""
    if sol.kind is SolutionKind.CAPACITARY_WITH_BOUNDARY:
        return 0.5 * sol.capacity * (1.0 + u) / (1.0 - u)
    return 1.0 / (1.0 - u)


def _coordinate_of_tail(sol: PotentialSolution, target: float) -> float:
    """Solve T(x) = target by safeguarded Newton (T' = -ds_dx/f^2 is analytic)."""
    tail = sol._tail
    p = sol.profile
    boundary = sol.kind is SolutionKind.CAPACITARY_WITH_BOUNDARY

    if boundary and target >= tail.total() * (1.0 - 4e-16):
        return p.x_min

    # Bracket between canonical anchors: walk down while the anchor tail
    # value is still below the target (clamping at the boundary), then up
    # until the next anchor value drops below it.
    k = 0
    clamped_at_boundary = False
    while tail.anchor_value(k) <= target:
        if boundary and tail.anchor_x(k - 1) <= p.x_min:
            clamped_at_boundary = True
            break
        k -= 1
        if k < -70:
            raise NonConvergent("level lies too deep toward the pole")
    if clamped_at_boundary:
        lo, t_lo = p.x_min, tail.total()
        hi, t_hi = tail.anchor_x(k), tail.anchor_value(k)
    else:
        while tail.anchor_value(k + 1) > target:
            k += 1
            if k > 80:
                raise NonConvergent("level lies beyond the resolvable range")
        lo, t_lo = tail.anchor_x(k), tail.anchor_value(k)
        hi, t_hi = tail.anchor_x(k + 1), tail.anchor_value(k + 1)
    if t_lo == target:
        return lo
    if t_hi == target:
        return hi

    x = lo + (t_lo - target) / (t_lo - t_hi) * (hi - lo)
    stop = 1e-14 * target
    for _ in range(80):
        t_x = tail.value(x)
        resid = t_x - target
        if abs(resid) <= stop:
            return x
        if resid > 0.0:
            lo = x
        else:
            hi = x
        fx = p.f(x)
        x_new = x + resid * fx * fx / p.ds_dx(x)
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4e-16 * abs(x):
            return x_new
        x = x_new
    raise NonConvergent(f"level solve did not converge (target {target!r})")


def level(sol: PotentialSolution, t: float) -> LevelParam:
    """Locate the level set labelled by t; round-trips t -> s -> t to rel 1e-10."""
    u_target = level_value(sol, t)
    target_tail = (1.0 - u_target) / sol.c_norm
    x = _coordinate_of_tail(sol, target_tail)
    return LevelParam(t=t, s=x, u=u_target)


def u_value(sol: PotentialSolution, x: float) -> float:
    """u at radial coordinate x."""
    return 1.0 - sol.c_norm * sol._tail.value(x)


def grad_value(sol: PotentialSolution, x: float) -> float:
    """|grad u| at radial coordinate x (analytic: c/f^2)."""
    fx = sol.profile.f(x)
    return sol.c_norm / (fx * fx)


def level_integrals(sol: PotentialSolution, t: float) -> LevelSetSample:
    """Geometric payload of the level set at t.

    All four surface integrals reduce to 4 pi f^2 times pointwise values on
    round level sets; Int |grad u| equals 4 pi C (boundary case) or 4 pi
    (boundaryless) by the divergence theorem.
    """
    lp = level(sol, t)
    p = sol.profile
    x = lp.s
    f = p.f(x)
    fs = p.df_ds(x)
    area = _FOUR_PI * f * f
    g = sol.c_norm / (f * f)
    mean_h = 2.0 * fs / f
    r_scalar = scalar_curvature(p, x)
    r_level = 2.0 / (f * f)
    return LevelSetSample(
        t=t,
        s=x,
        u=lp.u,
        area=area,
        grad=g,
        mean_curvature=mean_h,
        scalar_R=r_scalar,
        scalar_R_level=r_level,
        int_grad=area * g,
        int_grad_sq=area * g * g,
        int_grad_H=area * g * mean_h,
        int_inv_grad=area / g,
    )


def volume_to_coordinate(sol: PotentialSolution, x: float, x_from: float | None = None) -> float:
    """Radial volume integral Int 4 pi f^2 ds over [x_from (default x_min), x]."""
    p = sol.profile
    lo = p.x_min if x_from is None else x_from
    if x < lo:
        raise OutOfRange(f"volume upper coordinate {x!r} below {lo!r}")

    def integrand(y: float) -> float:
        fy = p.f(y)
        return _FOUR_PI * fy * fy * p.ds_dx(y)

    return integrate(integrand, lo, x, _VOLUME_TOL, points=p.breakpoints).value


def default_t_grid(
    sol: PotentialSolution,
    n: int = 256,
    t_min_factor: float = 1.0,
    t_max_factor: float = 1000.0,
) -> list[float]:
    """Geometric t-grid; boundary case spans [C/2, 1000 C] by default."""
    if sol.kind is SolutionKind.CAPACITARY_WITH_BOUNDARY:
        lo = 0.5 * sol.capacity * t_min_factor
        hi = sol.capacity * t_max_factor
    else:
        lo = 0.5 * t_min_factor
        hi = 1.0 * t_max_factor
    return [float(t) for t in np.geomspace(lo, hi, n)]
