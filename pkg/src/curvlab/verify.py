"""Inequality and monotonicity battery with equality-case detection.

Each check reports its worst margin over the grid, normalised by the
natural scale of its bound (pi, 4 pi, the Schwarzschild area/volume, ...).
Status rules:

  * Fail            iff worst_margin < -tolerance;
  * EqualityDetected when every |margin| stays within 100x the tolerance
    (the rigidity cases: Schwarzschild with boundary, Euclidean without);
  * identity-type checks (two-sided) never report equality.

Hypothesis violations (negative scalar curvature, non-minimal boundary)
do not abort the battery; they annotate the report and the CLI exit code
signals them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import IO, Sequence

from .errors import GridTooCoarse
from .functionals import (
    FunctionalSeries,
    a_growth,
    boundary_deficit,
    build_series,
    coarea_volume,
    f_func,
    g_func,
    growth_integrand_cumulative,
    volume_sublevel,
)
from .numerics import Tolerance, differentiate
from .potential import (
    PotentialSolution,
    SolutionKind,
    default_t_grid,
    level_integrals,
)
from .profile import sample_scalar_curvature_sign, sphere_geometry

__all__ = [
    "CheckStatus",
    "CheckResult",
    "VerificationReport",
    "run_battery",
    "deficit",
    "schwarzschild_comparison_volume",
    "write_report_text",
    "write_report_csv",
]

_FOUR_PI = 4.0 * math.pi

# Base check tolerance, pinned to the acceptance contract: rel drives the
# normalised theorem margins, abs the sign/monotonicity margins.
DEFAULT_CHECK_TOLERANCE = Tolerance(rel=1e-8, abs=1e-9)
TOL_FD_REL = 1e-5
EQUALITY_FACTOR = 100.0


@dataclass(frozen=True)
class _CheckTols:
    """Per-check tolerances derived from the base contract."""

    theorem_rel: float   # gradient estimate, A1 bound, area, area-capacity
    volume_rel: float    # volume comparison
    sign_abs: float      # G <= 0, monotonicity, Fhat <= 0, deficit >= 0
    f_gprime_rel: float
    a1g_rel: float
    flux_rel: float
    cs_abs: float
    riccati_abs: float
    growth_bound_abs: float
    coarea_rel: float

    @classmethod
    def from_base(cls, tol: Tolerance) -> "_CheckTols":
        return cls(
            theorem_rel=tol.rel,
            volume_rel=10.0 * tol.rel,
            sign_abs=tol.abs,
            f_gprime_rel=0.1 * tol.rel,
            a1g_rel=0.01 * tol.rel,
            flux_rel=0.1 * tol.rel,
            cs_abs=tol.abs,
            riccati_abs=10.0 * tol.abs,
            growth_bound_abs=10.0 * tol.abs,
            coarea_rel=tol.rel,
        )


_FD_SUBSAMPLE = 16  # derivative-consistency points inside the battery
_RICCATI_SCALE = 1e-3  # differentiation scale for a(t); larger than the
# default to keep cancellation noise under the 1e-8 margin


class CheckStatus(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    EQUALITY = "EqualityDetected"
    SKIPPED = "Skipped"


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: CheckStatus
    worst_margin: float
    worst_t: float
    tolerance_used: float
    note: str = ""


@dataclass(frozen=True)
class VerificationReport:
    profile_label: str
    kind: str
    capacity: float
    r_nonneg_confirmed: bool
    annotations: tuple[str, ...]
    checks: tuple[CheckResult, ...]

    def has_failures(self) -> bool:
        return any(c.status is CheckStatus.FAIL for c in self.checks)

    def blocking(self) -> bool:
        """True when the CLI must exit non-zero: failures or violated hypotheses."""
        return self.has_failures() or bool(self.annotations)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _judge(
    name: str,
    margins: Sequence[float],
    ts: Sequence[float],
    tol: float,
    identity: bool = False,
    note: str = "",
) -> CheckResult:
    margins = [float(m) for m in margins]
    worst = min(margins)
    worst_t = float(ts[margins.index(worst)])
    if worst < -tol:
        status = CheckStatus.FAIL
    elif not identity and max(abs(m) for m in margins) <= EQUALITY_FACTOR * tol:
        status = CheckStatus.EQUALITY
    else:
        status = CheckStatus.PASS
    return CheckResult(name, status, worst, worst_t, tol, note)


def _skipped(name: str, tol: float, note: str) -> CheckResult:
    return CheckResult(name, CheckStatus.SKIPPED, math.nan, math.nan, tol, note)


def schwarzschild_comparison_volume(cap: float, t: float) -> float:
    """Closed form of Int_{C/2}^t 4 pi s^2 (1 + C/2s)^6 ds (the volume bound).

    Antiderivative: s^3/3 + 3 a s^2 + 15 a^2 s + 20 a^3 ln s - 15 a^4/s
    - 3 a^5/s^2 - a^6/(3 s^3) with a = C/2; at the lower limit s = a the
    power terms cancel exactly, leaving 20 a^3 ln a.
    """
    a = 0.5 * cap
    upper = (
        t ** 3 / 3.0
        + 3.0 * a * t * t
        + 15.0 * a * a * t
        + 20.0 * a ** 3 * math.log(t)
        - 15.0 * a ** 4 / t
        - 3.0 * a ** 5 / (t * t)
        - a ** 6 / (3.0 * t ** 3)
    )
    return _FOUR_PI * (upper - 20.0 * a ** 3 * math.log(a))


def deficit(sol: PotentialSolution) -> float:
    """Boundary deficit A = 2C (pi - Int_{dM}|grad u|^2); >= 0 when R >= 0."""
    return boundary_deficit(sol)


def _fd_indices(n: int, count: int) -> list[int]:
    interior = list(range(2, n - 2))
    if len(interior) <= count:
        return interior
    stride = max(1, len(interior) // count)
    return interior[::stride][:count]


def _boundary_checks(
    sol: PotentialSolution,
    series: FunctionalSeries,
    minimal_boundary: bool,
    skip_note: str,
    ct: _CheckTols,
) -> list[CheckResult]:
    cap = sol.capacity
    ts = [float(t) for t in series.t_grid]
    n = len(ts)
    checks: list[CheckResult] = []

    boundary_sample = level_integrals(sol, 0.5 * cap)
    if minimal_boundary:
        # boundary gradient estimate, margin scaled by pi
        margin_a = (math.pi - boundary_sample.int_grad_sq) / math.pi
        checks.append(_judge("boundary_gradient_estimate", [margin_a], [0.5 * cap], ct.theorem_rel))
        # A1 <= 4 pi
        margins_b = [(_FOUR_PI - a) / _FOUR_PI for a in series.A1]
        checks.append(_judge("a1_upper_bound", margins_b, ts, ct.theorem_rel))
        # area comparison
        margins_c = []
        for t, area in zip(ts, series.area):
            bound = _FOUR_PI * t * t * (1.0 + cap / (2.0 * t)) ** 4
            margins_c.append((area - bound) / bound)
        checks.append(_judge("area_comparison", margins_c, ts, ct.theorem_rel))
        # area-capacity inequality
        area_b = boundary_sample.area
        margin_d = (math.sqrt(area_b / (16.0 * math.pi)) - cap) / cap
        checks.append(_judge("area_capacity_inequality", [margin_d], [0.5 * cap], ct.theorem_rel))
        # volume comparison against the closed-form Schwarzschild volume
        margins_e = []
        for t, vol in zip(ts, series.volume):
            if t <= 0.5 * cap * (1.0 + 1e-12):
                # Both sides vanish identically at the boundary level; the
                # closed form is pure cancellation noise there.
                margins_e.append(0.0)
                continue
            bound = schwarzschild_comparison_volume(cap, t)
            margins_e.append((vol - bound) / bound)
        checks.append(_judge("volume_comparison", margins_e, ts, ct.volume_rel))
    else:
        for name, tol in (
            ("boundary_gradient_estimate", ct.theorem_rel),
            ("a1_upper_bound", ct.theorem_rel),
            ("area_comparison", ct.theorem_rel),
            ("area_capacity_inequality", ct.theorem_rel),
            ("volume_comparison", ct.volume_rel),
        ):
            checks.append(_skipped(name, tol, skip_note))

    mono_note = "" if sol.grad_vanishes_at_infinity else "hypothesis unverified: |grad u| -> 0 at infinity"
    dgs = [float(b - a) for a, b in zip(series.G, series.G[1:])]
    checks.append(_judge("g_monotone", dgs, ts[1:], ct.sign_abs, note=mono_note))
    checks.append(_judge("g_nonpositive", [float(-g) for g in series.G], ts, ct.sign_abs, note=mono_note))
    if minimal_boundary:
        checks.append(
            _judge("deficit_nonnegative", [series.deficit_A], [0.5 * cap], ct.sign_abs)
        )
    else:
        checks.append(_skipped("deficit_nonnegative", ct.sign_abs, skip_note))

    # F = (4 t^3 / C^2) G', deviation scaled by the term magnitudes
    margins = []
    for i, t in enumerate(ts):
        scale = _FOUR_PI * t + abs(series.F[i]) + abs(4.0 * t ** 3 / cap ** 2 * series.Gprime_analytic[i])
        dev = series.F[i] - 4.0 * t ** 3 / cap ** 2 * series.Gprime_analytic[i]
        margins.append(-abs(dev) / scale)
    checks.append(_judge("identity_f_from_gprime", margins, ts, ct.f_gprime_rel, identity=True))

    # A1 = 4 pi + (4t/C^2) G
    margins = [
        -abs(series.A1[i] - (_FOUR_PI + 4.0 * ts[i] / cap ** 2 * series.G[i])) / _FOUR_PI
        for i in range(n)
    ]
    checks.append(_judge("identity_a1_g", margins, ts, ct.a1g_rel, identity=True))

    flux_target = _FOUR_PI * cap
    margins = [-abs(series.area[i] * series.grad[i] - flux_target) / flux_target for i in range(n)]
    checks.append(_judge("flux_constancy", margins, ts, ct.flux_rel, identity=True))

    # Analytic derivatives vs central differences (subsampled interior points).
    g_margins, g_ts, f_margins, f_ts = [], [], [], []
    for i in _fd_indices(n, _FD_SUBSAMPLE):
        t = ts[i]
        scale_h = 1e-4 * max(1.0, t)
        if t - 2.0 * scale_h <= 0.5 * cap:
            continue
        gp_fd = differentiate(lambda tt: g_func(sol, tt), t, scale=scale_h)
        fp_fd = differentiate(lambda tt: f_func(sol, tt), t, scale=scale_h)
        g_scale = max(abs(series.Gprime_analytic[i]), _FOUR_PI / t)
        f_scale = max(abs(series.Fprime_analytic[i]), _FOUR_PI)
        g_margins.append(-abs(series.Gprime_analytic[i] - gp_fd) / g_scale)
        g_ts.append(t)
        f_margins.append(-abs(series.Fprime_analytic[i] - fp_fd) / f_scale)
        f_ts.append(t)
    checks.append(_judge("gprime_vs_fd", g_margins, g_ts, TOL_FD_REL, identity=True))
    checks.append(_judge("fprime_vs_fd", f_margins, f_ts, TOL_FD_REL, identity=True))

    # Cauchy-Schwarz bound on the growth rate: (t A1')^2 <= (2/3) A1 B1
    a1p = [(series.a_growth[i] * series.A1[i] / ts[i]) for i in range(n)]
    margins = [
        float(2.0 / 3.0 * series.A1[i] * series.B1[i] - (ts[i] * a1p[i]) ** 2) for i in range(n)
    ]
    checks.append(_judge("cauchy_schwarz_growth", margins, ts, ct.cs_abs))

    # Riccati inequality: a' >= (1/t)(1 - 4 pi/A1 - a^2/4), a' by central difference
    margins, r_ts = [], []
    for i in _fd_indices(n, _FD_SUBSAMPLE):
        t = ts[i]
        h = _RICCATI_SCALE * max(1.0, t)
        if t - 2.0 * h <= 0.5 * cap:
            continue
        ap = differentiate(lambda tt: a_growth(sol, tt), t, scale=h)
        rhs = (1.0 - _FOUR_PI / series.A1[i] - series.a_growth[i] ** 2 / 4.0) / t
        margins.append(float(ap - rhs))
        r_ts.append(t)
    checks.append(_judge("riccati_growth", margins, r_ts, ct.riccati_abs))

    # Integral lower bound on the growth (case A >= 0):
    # t A1' >= A1 - 4 pi + (1/2t) Int (R1 + B1)
    samples = [level_integrals(sol, t) for t in ts]
    cumulative = growth_integrand_cumulative(sol, samples)
    use_tilde = series.deficit_A < 0.0
    margins = []
    for i, t in enumerate(ts):
        lhs = t * a1p[i]
        rhs = series.A1[i] - _FOUR_PI + cumulative[i] / (2.0 * t)
        if use_tilde:
            # A < 0 only occurs under violated hypotheses; check variant (2).
            lhs = lhs - series.deficit_A / (2.0 * t)
            rhs = rhs + series.deficit_A / (2.0 * t)
        margins.append(lhs - rhs)
    note = "checked with A1~ (deficit < 0)" if use_tilde else ""
    checks.append(_judge("a1_growth_lower_bound", margins, ts, ct.growth_bound_abs, note=note))

    # Coarea cross-check of the sub-level volume at three sample levels.
    margins, c_ts = [], []
    for i in (n // 4, n // 2, (3 * n) // 4):
        t = ts[i]
        vol_radial = volume_sublevel(sol, t)
        vol_coarea = coarea_volume(sol, t)
        margins.append(-abs(vol_radial - vol_coarea) / vol_radial)
        c_ts.append(t)
    checks.append(_judge("coarea_crosscheck", margins, c_ts, ct.coarea_rel, identity=True))
    return checks


def _boundaryless_checks(
    sol: PotentialSolution, series: FunctionalSeries, ct: _CheckTols
) -> list[CheckResult]:
    ts = [float(t) for t in series.t_grid]
    n = len(ts)
    checks: list[CheckResult] = []

    margins = []
    for t, area in zip(ts, series.area):
        bound = _FOUR_PI * t * t
        margins.append((area - bound) / bound)
    checks.append(_judge("area_comparison", margins, ts, 0.1 * ct.theorem_rel))

    margins = []
    for t, vol in zip(ts, series.volume):
        bound = _FOUR_PI * t ** 3 / 3.0
        margins.append((vol - bound) / bound)
    checks.append(_judge("volume_comparison", margins, ts, 0.1 * ct.theorem_rel))

    mono_note = "" if sol.grad_vanishes_at_infinity else "hypothesis unverified: |grad u| -> 0 at infinity"
    dfh = [float(b - a) for a, b in zip(series.Fhat, series.Fhat[1:])]
    checks.append(_judge("fhat_monotone", dfh, ts[1:], ct.sign_abs, note=mono_note))
    checks.append(
        _judge("fhat_nonpositive", [float(-v) for v in series.Fhat], ts, ct.sign_abs, note=mono_note)
    )

    margins = [-abs(series.area[i] * series.grad[i] - _FOUR_PI) / _FOUR_PI for i in range(n)]
    checks.append(_judge("flux_constancy", margins, ts, ct.flux_rel, identity=True))

    margins, c_ts = [], []
    for i in (n // 4, n // 2, (3 * n) // 4):
        t = ts[i]
        vol_radial = volume_sublevel(sol, t)
        vol_coarea = coarea_volume(sol, t)
        margins.append(-abs(vol_radial - vol_coarea) / vol_radial)
        c_ts.append(t)
    checks.append(_judge("coarea_crosscheck", margins, c_ts, ct.coarea_rel, identity=True))
    return checks


def run_battery(
    sol: PotentialSolution,
    t_grid: Sequence[float] | None = None,
    tol: Tolerance | None = None,
    threads: int | None = None,
) -> VerificationReport:
    """Run every applicable check of the main theorem and its proof machinery.

    ``tol`` sets the base check tolerance (rel for normalised comparison
    margins, abs for sign margins); the default is the acceptance contract.
    """
    grid = list(t_grid) if t_grid is not None else default_t_grid(sol)
    if len(grid) < 8:
        raise GridTooCoarse(f"verification grid needs at least 8 points, got {len(grid)}")
    ct = _CheckTols.from_base(tol or DEFAULT_CHECK_TOLERANCE)

    p = sol.profile
    annotations: list[str] = []

    r_ok, worst_x, worst_r = sample_scalar_curvature_sign(p)
    if not r_ok:
        annotations.append(
            f"hypothesis violated: scalar curvature negative (R = {worst_r!r} at x = {worst_x!r})"
        )
        if p.assume_nonnegative_R:
            annotations.append("profile declared R >= 0 but the sampled check found a violation")

    boundary = sol.kind is SolutionKind.CAPACITARY_WITH_BOUNDARY
    minimal_boundary = True
    skip_note = ""
    if boundary:
        _, h_boundary = sphere_geometry(p, p.x_min)
        h_scaled = abs(h_boundary) * p.f(p.x_min) / 2.0
        if h_scaled > 1e-8:
            minimal_boundary = False
            skip_note = f"boundary not minimal (H = {h_boundary!r})"
            annotations.append(f"hypothesis violated: {skip_note}")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        series = build_series(sol, grid, threads=threads)
        if boundary:
            checks = _boundary_checks(sol, series, minimal_boundary, skip_note, ct)
        else:
            checks = _boundaryless_checks(sol, series, ct)

    return VerificationReport(
        profile_label=p.label,
        kind=sol.kind.value,
        capacity=sol.capacity if boundary else math.nan,
        r_nonneg_confirmed=r_ok,
        annotations=tuple(annotations),
        checks=tuple(checks),
    )


def write_report_text(report: VerificationReport, stream: IO[str]) -> None:
    """One check per line: name status worst_margin worst_t tolerance."""
    stream.write("schema=1\n")
    stream.write(f"profile={report.profile_label}\n")
    stream.write(f"kind={report.kind}\n")
    stream.write(f"capacity={report.capacity!r}\n")
    stream.write(f"r_nonneg_confirmed={'true' if report.r_nonneg_confirmed else 'false'}\n")
    for a in report.annotations:
        stream.write(f"annotation={a}\n")
    for c in report.checks:
        line = f"check {c.name} {c.status.value} {c.worst_margin!r} {c.worst_t!r} {c.tolerance_used!r}"
        if c.note:
            line += f" # {c.note}"
        stream.write(line + "\n")


def write_report_csv(report: VerificationReport, stream: IO[str]) -> None:
    stream.write("name,status,worst_margin,worst_t,tolerance,note\n")
    for c in report.checks:
        stream.write(
            f"{c.name},{c.status.value},{c.worst_margin!r},{c.worst_t!r},{c.tolerance_used!r},{c.note}\n"
        )
