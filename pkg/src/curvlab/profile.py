"""Rotationally symmetric 3-metrics g = ds^2 + f(s)^2 g_{S^2}.

A profile is parametrised by a monotone radial coordinate x with arclength
element ds = ds_dx(x) dx; built-ins supply closed-form warp data.  For
conformally flat metrics w(|x|)^4 g_eucl the warped-product description is
f = r w^2 with ds = w^2 dr, so the isotropic radius r is the coordinate.
All geometric formulas below use arclength derivatives:

    area(x)   = 4 pi f^2
    H(x)      = 2 f_s / f            (infinity-pointing normal)
    R(x)      = 2 (1 - f_s^2)/f^2 - 4 f_ss / f
    R_conf(r) = -8 w^-5 (w'' + 2 w'/r)   for g = w^4 g_eucl
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainEdge, NonConvergent, ProfileDataError
from .numerics import Tolerance, find_root, integrate

__all__ = [
    "ProfileKind",
    "MetricProfile",
    "ConformalProfile",
    "euclidean",
    "euclidean_conformal",
    "schwarzschild",
    "mollified_schwarzschild",
    "perturbed_schwarzschild",
    "to_warped",
    "scalar_curvature",
    "conformal_scalar_curvature",
    "sphere_geometry",
    "sample_scalar_curvature_sign",
    "profile_from_csv",
]

_FOUR_PI = 4.0 * math.pi
_CONSTRUCTION_TOL = Tolerance(rel=1e-8, abs=1e-10, max_refinements=60)

ScalarFn = Callable[[float], float]


def _one(_: float) -> float:
    return 1.0


def _zero(_: float) -> float:
    return 0.0


class ProfileKind(str, Enum):
    WITH_BOUNDARY = "with_boundary"
    BOUNDARYLESS = "boundaryless"


@dataclass(frozen=True)
class ConformalProfile:
    """Conformally flat metric g = w(r)^4 g_eucl given by w and two derivatives.

    For a harmonically flat end declare ``harmonic_radius``: beyond it w must
    equal 1 + mass_tag/(2 r) exactly.
    """

    label: str
    w: ScalarFn
    dw: ScalarFn
    d2w: ScalarFn
    r_min: float = 0.0
    mass_tag: float | None = None
    harmonic_radius: float | None = None
    breakpoints: tuple[float, ...] = ()
    assume_nonnegative_R: bool | None = None

    def __post_init__(self) -> None:
        if self.r_min < 0.0:
            raise ProfileDataError("r_min must be non-negative")
        lo = max(self.r_min, 1e-6)
        for r in np.geomspace(lo, max(1e4, 1e3 * max(lo, 1.0)), 64):
            if self.w(float(r)) <= 0.0:
                raise ProfileDataError(f"conformal factor must stay positive (w({r}) <= 0)")
        if self.harmonic_radius is not None:
            if self.mass_tag is None:
                raise ProfileDataError("harmonic_radius requires a mass_tag")
            for r in (self.harmonic_radius, 2.0 * self.harmonic_radius, 50.0 * self.harmonic_radius):
                expected = 1.0 + self.mass_tag / (2.0 * r)
                if abs(self.w(r) - expected) > 1e-12 * max(1.0, abs(expected)):
                    raise ProfileDataError(
                        "profile declared harmonically flat but w != 1 + m/(2r) at r=%r" % r
                    )


@dataclass(frozen=True)
class MetricProfile:
    """Warped-product 3-metric determined by the warp factor along a radial coordinate."""

    label: str
    kind: ProfileKind
    x_min: float
    f: ScalarFn
    df_ds: ScalarFn
    d2f_ds2: ScalarFn
    ds_dx: ScalarFn = _one
    breakpoints: tuple[float, ...] = ()
    asymptotically_flat: bool = False
    assume_nonnegative_R: bool | None = None
    conformal: ConformalProfile | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.x_min < 0.0:
            raise ProfileDataError("x_min must be non-negative")
        if self.kind is ProfileKind.WITH_BOUNDARY:
            if self.f(self.x_min) <= 0.0:
                raise ProfileDataError("a boundary profile needs f(x_min) > 0")
        else:
            pole_scale = max(1.0, self.x_min)
            if abs(self.f(self.x_min)) > 1e-8 * pole_scale:
                raise ProfileDataError("a boundaryless profile needs f(x_min) = 0 (smooth pole)")
            if abs(self.df_ds(self.x_min + 1e-9 * pole_scale) - 1.0) > 1e-4:
                raise ProfileDataError("a boundaryless profile needs df/ds -> 1 at the pole")
        # Nonparabolicity: the capacitary integral must converge past the core.
        try:
            integrate(
                lambda x: self.ds_dx(x) / self.f(x) ** 2,
                self.x_min + 1.0,
                math.inf,
                _CONSTRUCTION_TOL,
                points=self.breakpoints,
            )
        except NonConvergent as exc:
            raise ProfileDataError(f"profile {self.label!r} is parabolic: {exc}") from exc
        if self.asymptotically_flat:
            # Sampling check only; the decay *order* is metadata, not enforced.
            for x in (1e2, 1e3, 1e4):
                x = x * self.x_scale
                if abs(self.df_ds(x) - 1.0) > 0.05:
                    raise ProfileDataError(
                        f"profile {self.label!r} declared asymptotically flat "
                        f"but df/ds at x={x} is {self.df_ds(x)!r}"
                    )

    @property
    def x_scale(self) -> float:
        """Characteristic coordinate scale (anchors, default grids)."""
        return max(self.x_min, 1.0)

    def in_domain(self, x: float) -> bool:
        return x >= self.x_min - 1e-12 * max(1.0, self.x_min)


def scalar_curvature(p: MetricProfile, x: float) -> float:
    """Scalar curvature of g at radial coordinate x (warped-product formula)."""
    if not p.in_domain(x):
        raise DomainEdge(f"x={x!r} below x_min={p.x_min!r}")
    if p.kind is ProfileKind.BOUNDARYLESS and x <= p.x_min:
        raise DomainEdge("scalar curvature is 0/0 at the pole; evaluate at x > x_min")
    f = p.f(x)
    fs = p.df_ds(x)
    fss = p.d2f_ds2(x)
    return 2.0 * (1.0 - fs * fs) / (f * f) - 4.0 * fss / f


def conformal_scalar_curvature(c: ConformalProfile, r: float) -> float:
    """Scalar curvature of w^4 g_eucl: R = -8 w^-5 Delta_eucl w."""
    if r < c.r_min:
        raise DomainEdge(f"r={r!r} below r_min={c.r_min!r}")
    if r == 0.0:
        lap = 3.0 * c.d2w(0.0)  # radial limit of w'' + 2 w'/r at a smooth centre
    else:
        lap = c.d2w(r) + 2.0 * c.dw(r) / r
    return -8.0 * c.w(r) ** -5 * lap


def sphere_geometry(p: MetricProfile, x: float) -> tuple[float, float]:
    """Area and mean curvature (outward normal) of the sphere at coordinate x."""
    if not p.in_domain(x):
        raise DomainEdge(f"x={x!r} below x_min={p.x_min!r}")
    f = p.f(x)
    if f == 0.0:
        return 0.0, math.inf
    return _FOUR_PI * f * f, 2.0 * p.df_ds(x) / f


def sample_scalar_curvature_sign(
    p: MetricProfile,
    n: int = 1000,
    x_max: float | None = None,
    threshold: float = -1e-10,
) -> tuple[bool, float, float]:
    """Sample R on a log-spaced grid; returns (all >= threshold, worst_x, worst_R)."""
    hi = x_max if x_max is not None else 1e4 * p.x_scale
    lo = max(p.x_min, 1e-4 * p.x_scale)
    if p.kind is ProfileKind.BOUNDARYLESS:
        lo = max(lo, p.x_min + 1e-4 * p.x_scale)  # the pole itself is 0/0
    xs = list(np.geomspace(lo, hi, n))
    if p.kind is ProfileKind.WITH_BOUNDARY and p.x_min < lo:
        xs.insert(0, p.x_min)
    worst_x = float(xs[0])
    worst_r = math.inf
    for x in xs:
        r_val = scalar_curvature(p, float(x))
        if r_val < worst_r:
            worst_r = r_val
            worst_x = float(x)
    return worst_r >= threshold, worst_x, worst_r


# ---------------------------------------------------------------------------
# Built-in models
# ---------------------------------------------------------------------------


def euclidean() -> MetricProfile:
    """Flat space: f(s) = s, boundaryless."""
    return MetricProfile(
        label="euclidean",
        kind=ProfileKind.BOUNDARYLESS,
        x_min=0.0,
        f=lambda s: s,
        df_ds=_one,
        d2f_ds2=_zero,
        asymptotically_flat=True,
        assume_nonnegative_R=True,
        conformal=euclidean_conformal(),
    )


def euclidean_conformal() -> ConformalProfile:
    """Flat space as a conformal profile: w = 1 (zero-mass harmonically flat end)."""
    return ConformalProfile(
        label="euclidean",
        w=_one,
        dw=_zero,
        d2w=_zero,
        mass_tag=0.0,
        harmonic_radius=1.0,
        assume_nonnegative_R=True,
    )


def schwarzschild(m: float) -> MetricProfile:
    """Spatial Schwarzschild slice of mass m in the isotropic radius r >= m/2.

    w = 1 + m/(2r), f = r w^2 = (r+a)^2/r with a = m/2.  The simplified
    closed forms keep the boundary exactly minimal: f_s = (r-a)/(r+a).
    """
    if m <= 0.0:
        raise ProfileDataError("mass must be positive")
    a = 0.5 * m

    def w(r: float) -> float:
        return 1.0 + a / r

    conf = ConformalProfile(
        label=f"schwarzschild(m={m!r}) exterior",
        w=w,
        dw=lambda r: -a / (r * r),
        d2w=lambda r: 2.0 * a / (r * r * r),
        r_min=a,
        mass_tag=m,
        harmonic_radius=a,
        assume_nonnegative_R=True,
    )
    return MetricProfile(
        label=f"schwarzschild(m={m!r})",
        kind=ProfileKind.WITH_BOUNDARY,
        x_min=a,
        f=lambda r: (r + a) ** 2 / r,
        df_ds=lambda r: (r - a) / (r + a),
        d2f_ds2=lambda r: 2.0 * a * r * r / (r + a) ** 4,
        ds_dx=lambda r: ((r + a) / r) ** 2,
        asymptotically_flat=True,
        assume_nonnegative_R=True,
        conformal=conf,
    )


def mollified_schwarzschild(m: float, r0: float) -> ConformalProfile:
    """Complete boundaryless metric: Schwarzschild end glued to a superharmonic cap.

    w = 1 + m/(2r) for r >= r0 and w = 1 + m(3 r0^2 - r^2)/(4 r0^3) inside.
    The glue is C^1; Delta_eucl w = -3m/(2 r0^3) < 0 inside and 0 outside, so
    R >= 0 everywhere with a single integrable jump at r0.
    """
    if m <= 0.0 or r0 <= 0.0:
        raise ProfileDataError("mass and matching radius must be positive")

    def w(r: float) -> float:
        if r >= r0:
            return 1.0 + m / (2.0 * r)
        return 1.0 + m * (3.0 * r0 * r0 - r * r) / (4.0 * r0 ** 3)

    def dw(r: float) -> float:
        if r >= r0:
            return -m / (2.0 * r * r)
        return -m * r / (2.0 * r0 ** 3)

    def d2w(r: float) -> float:
        if r >= r0:
            return m / (r * r * r)
        return -m / (2.0 * r0 ** 3)

    return ConformalProfile(
        label=f"mollified_schwarzschild(m={m!r}, r0={r0!r})",
        w=w,
        dw=dw,
        d2w=d2w,
        r_min=0.0,
        mass_tag=m,
        harmonic_radius=r0,
        breakpoints=(r0,),
        assume_nonnegative_R=True,
    )


def perturbed_schwarzschild(m: float = 1.0, amplitude: float = 0.3, offset: float = 1.0) -> MetricProfile:
    """Strictly superharmonic perturbation of Schwarzschild with a minimal boundary.

    w = 1 + m/(2r) + amplitude/(r + offset); Delta_eucl w =
    -2*amplitude*offset / (r (r+offset)^3) < 0, hence R > 0 everywhere.
    The boundary radius solves w + 2 r w' = 0, which makes f' vanish there
    (minimal sphere) by construction.
    """
    if m <= 0.0 or amplitude <= 0.0 or offset <= 0.0:
        raise ProfileDataError("mass, amplitude and offset must be positive")
    alpha = 0.5 * m
    beta = amplitude
    c0 = offset

    def w(r: float) -> float:
        return 1.0 + alpha / r + beta / (r + c0)

    def dw(r: float) -> float:
        return -alpha / (r * r) - beta / (r + c0) ** 2

    def d2w(r: float) -> float:
        return 2.0 * alpha / (r * r * r) + 2.0 * beta / (r + c0) ** 3

    def minimality(r: float) -> float:
        return w(r) + 2.0 * r * dw(r)

    hi = max(alpha, c0)
    while minimality(hi) <= 0.0:
        hi *= 2.0
    lo = hi
    while minimality(lo) >= 0.0:
        lo *= 0.5
    r_b = find_root(minimality, lo, hi, Tolerance(rel=1e-15, abs=1e-15))
    # Newton polish: the battery gates on H(boundary) ~ 0 at 1e-8.
    for _ in range(3):
        d_min = 3.0 * dw(r_b) + 2.0 * r_b * d2w(r_b)
        step = minimality(r_b) / d_min
        if not math.isfinite(step):
            break
        r_b -= step

    conf = ConformalProfile(
        label=f"perturbed_schwarzschild(m={m!r}, amplitude={amplitude!r}, offset={offset!r})",
        w=w,
        dw=dw,
        d2w=d2w,
        r_min=r_b,
        assume_nonnegative_R=True,
    )
    return to_warped(conf)


def to_warped(c: ConformalProfile) -> MetricProfile:
    """Warped-product description of w^4 g_eucl: f = r w^2, ds = w^2 dr."""
    w, dw, d2w = c.w, c.dw, c.d2w

    def f(r: float) -> float:
        return r * w(r) ** 2

    def df_ds(r: float) -> float:
        return 1.0 + 2.0 * r * dw(r) / w(r)

    def d2f_ds2(r: float) -> float:
        wr = w(r)
        dwr = dw(r)
        return 2.0 / wr ** 3 * (dwr + r * d2w(r) - r * dwr * dwr / wr)

    def ds_dx(r: float) -> float:
        return w(r) ** 2

    kind = ProfileKind.BOUNDARYLESS if c.r_min == 0.0 else ProfileKind.WITH_BOUNDARY
    flat = all(abs(w(r) - 1.0) < 0.05 for r in (1e3, 1e4, 1e5))
    return MetricProfile(
        label=c.label,
        kind=kind,
        x_min=c.r_min,
        f=f,
        df_ds=df_ds,
        d2f_ds2=d2f_ds2,
        ds_dx=ds_dx,
        breakpoints=c.breakpoints,
        asymptotically_flat=flat,
        assume_nonnegative_R=c.assume_nonnegative_R,
        conformal=c,
    )


# ---------------------------------------------------------------------------
# Tabulated custom profiles
# ---------------------------------------------------------------------------


def profile_from_csv(path: str, assume_nonnegative_R: bool) -> MetricProfile:
    """Ingest a tabulated profile from CSV.

    Two layouts are accepted, selected by the header line: ``r,w`` for a
    conformal factor sampled in the isotropic radius, or ``s,f`` for a warp
    factor sampled in arclength.  The first column must be strictly
    increasing.  Derivatives come from a cubic spline (documented accuracy
    downgrade versus the analytic built-ins); beyond the last sample the
    profile continues with a C^1 analytic tail (harmonic a + b/r for ``r,w``,
    linear for ``s,f``).
    """
    from scipy.interpolate import CubicSpline

    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().lower().replace(" ", "")
        if header not in ("r,w", "s,f"):
            raise ProfileDataError(f"unsupported CSV header {header!r}; expected 'r,w' or 's,f'")
        col0: list[float] = []
        col1: list[float] = []
        for ln, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ProfileDataError(f"{path}:{ln}: expected two comma-separated values")
            try:
                col0.append(float(parts[0]))
                col1.append(float(parts[1]))
            except ValueError as exc:
                raise ProfileDataError(f"{path}:{ln}: {exc}") from exc
    if len(col0) < 8:
        raise ProfileDataError("need at least 8 samples to build a spline profile")
    xs = np.asarray(col0)
    ys = np.asarray(col1)
    if not np.all(np.diff(xs) > 0.0):
        raise ProfileDataError("first CSV column must be strictly increasing")

    spline = CubicSpline(xs, ys)
    d1 = spline.derivative(1)
    d2 = spline.derivative(2)
    x_last = float(xs[-1])
    y_last = float(ys[-1])
    yp_last = float(d1(x_last))

    if header == "r,w":
        # Harmonic C^1 tail w = A + B/r matched at the last sample.
        b_tail = -yp_last * x_last * x_last
        a_tail = y_last - b_tail / x_last

        def w(r: float) -> float:
            return float(spline(r)) if r <= x_last else a_tail + b_tail / r

        def dw(r: float) -> float:
            return float(d1(r)) if r <= x_last else -b_tail / (r * r)

        def d2w(r: float) -> float:
            return float(d2(r)) if r <= x_last else 2.0 * b_tail / (r * r * r)

        conf = ConformalProfile(
            label=f"custom:{path}",
            w=w,
            dw=dw,
            d2w=d2w,
            r_min=float(xs[0]),
            breakpoints=(x_last,),
            assume_nonnegative_R=assume_nonnegative_R,
        )
        return to_warped(conf)

    if yp_last <= 0.0:
        raise ProfileDataError("warp factor must be increasing at the tabulated tail")

    def f(s: float) -> float:
        return float(spline(s)) if s <= x_last else y_last + yp_last * (s - x_last)

    def fp(s: float) -> float:
        return float(d1(s)) if s <= x_last else yp_last

    def fpp(s: float) -> float:
        return float(d2(s)) if s <= x_last else 0.0

    x_min = float(xs[0])
    pole = x_min == 0.0 and abs(float(ys[0])) <= 1e-10 * max(1.0, float(np.max(np.abs(ys))))
    kind = ProfileKind.BOUNDARYLESS if pole else ProfileKind.WITH_BOUNDARY
    if kind is ProfileKind.WITH_BOUNDARY and float(ys[0]) <= 0.0:
        raise ProfileDataError("warp factor must be positive at the boundary")
    return MetricProfile(
        label=f"custom:{path}",
        kind=kind,
        x_min=x_min,
        f=f,
        df_ds=fp,
        d2f_ds2=fpp,
        breakpoints=(x_last,),
        assume_nonnegative_R=assume_nonnegative_R,
    )
