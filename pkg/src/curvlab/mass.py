"""ADM mass two ways on asymptotically flat boundaryless models.

Surface route: for g = w^4 g_eucl the flux integrand of the ADM limit
reduces radially; with dsigma_eucl = 4 pi r^2 on coordinate spheres,

    m(r) = (1/16 pi) * (-8 w^3 w') * 4 pi r^2 = -2 r^2 w(r)^3 w'(r),

followed by Richardson extrapolation in 1/r (exact for harmonically flat
ends, where m(r) is a cubic polynomial in 1/r).

Volume route: the sub-level expansion
Vol({u <= 1 - 1/t}) = (4/3) pi t^3 + 4 pi m t^2 + o(t^2) inverted as

    m_est(t) = [Vol({u <= 1 - 1/t}) - (4/3) pi t^3] / (4 pi t^2),

then a least-squares fit of m + c/t over the largest decade of t (the
built-in family's next correction is O(1/t)).  Positivity of every
m_est(t) is the desk-scale positive mass inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .errors import OutOfRange, ProfileDataError, WrongKind
from .functionals import volume_sublevel
from .numerics import extrapolate_to_zero
from .potential import PotentialSolution, SolutionKind, grad_value, u_value
from .profile import ConformalProfile

__all__ = [
    "MassReport",
    "adm_surface",
    "adm_flux_at",
    "mass_from_volume",
    "expansion_residuals",
    "mass_report",
    "default_surface_radii",
    "default_volume_samples",
    "write_mass_csv",
]

_FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class MassReport:
    profile_label: str
    mass_tag: float | None
    m_surface: float
    m_volume: float
    samples: tuple[tuple[float, float], ...]
    expansion_residuals: tuple[tuple[float, float], ...]


def _min_radius(c: ConformalProfile) -> float:
    return max(c.r_min, c.harmonic_radius or 0.0)


def adm_flux_at(c: ConformalProfile, r: float) -> float:
    """Flux integrand of the ADM surface integral at radius r: -2 r^2 w^3 w'."""
    if r <= _min_radius(c):
        raise OutOfRange(f"flux radius {r!r} not beyond the matching radius {_min_radius(c)!r}")
    w = c.w(r)
    return -2.0 * r * r * w ** 3 * c.dw(r)


def default_surface_radii(c: ConformalProfile, n: int = 8) -> list[float]:
    lo = max(4.0 * max(_min_radius(c), 1.0), 10.0)
    return [float(r) for r in np.geomspace(lo, 1e3 * lo, n)]


def adm_surface(c: ConformalProfile, radii: Sequence[float] | None = None) -> float:
    """ADM mass via the flux integral, Richardson-extrapolated in 1/r."""
    rs = list(radii) if radii is not None else default_surface_radii(c)
    if len(rs) < 2:
        raise ProfileDataError("need at least two radii for the extrapolation")
    if any(b <= a for a, b in zip(rs, rs[1:])):
        raise ProfileDataError("radii must be strictly increasing")
    fluxes = [adm_flux_at(c, r) for r in rs]
    return extrapolate_to_zero([1.0 / r for r in rs], fluxes)


def default_volume_samples(n: int = 25) -> list[float]:
    return [float(t) for t in np.geomspace(10.0, 1000.0, n)]


def mass_from_volume(
    sol: PotentialSolution,
    t_samples: Sequence[float] | None = None,
) -> tuple[float, list[tuple[float, float]]]:
    """Volume-expansion mass estimator and its per-sample values."""
    if sol.kind is not SolutionKind.GREEN_BOUNDARYLESS:
        raise WrongKind("the volume estimator needs a boundaryless solution")
    if not sol.profile.asymptotically_flat:
        raise ProfileDataError("the volume estimator needs an asymptotically flat profile")
    ts = [float(t) for t in (t_samples if t_samples is not None else default_volume_samples())]
    samples: list[tuple[float, float]] = []
    for t in ts:
        vol = volume_sublevel(sol, t)
        m_est = (vol - _FOUR_PI * t ** 3 / 3.0) / (_FOUR_PI * t * t)
        samples.append((t, m_est))

    t_max = max(t for t, _ in samples)
    fit = [(t, m) for t, m in samples if t >= 0.1 * t_max]
    if len(fit) < 3:
        fit = samples
    a_mat = np.array([[1.0, 1.0 / t] for t, _ in fit])
    rhs = np.array([m for _, m in fit])
    coeffs, *_ = np.linalg.lstsq(a_mat, rhs, rcond=None)
    return float(coeffs[0]), samples


def expansion_residuals(
    sol: PotentialSolution,
    radii: Sequence[float],
) -> list[tuple[float, float]]:
    """Residuals r * [(1-u)^4 / |grad u|^2 - 1 - 2m/r] of the far-field expansion.

    Bounded and decaying like O(r^{-1+alpha}); the decay exponent is
    asserted loosely (<= -0.9) since alpha can be chosen arbitrarily small.
    """
    if sol.kind is not SolutionKind.GREEN_BOUNDARYLESS:
        raise WrongKind("expansion residuals need a boundaryless solution")
    conf = sol.profile.conformal
    if conf is None or conf.mass_tag is None:
        raise ProfileDataError("expansion residuals need a conformal profile with a mass tag")
    m = conf.mass_tag
    out: list[tuple[float, float]] = []
    for r in radii:
        r = float(r)
        if r <= sol.profile.x_min:
            raise OutOfRange(f"radius {r!r} inside the profile domain start")
        one_minus_u = 1.0 - u_value(sol, r)
        g = grad_value(sol, r)
        out.append((r, r * (one_minus_u ** 4 / (g * g) - 1.0 - 2.0 * m / r)))
    return out


def mass_report(
    c: ConformalProfile,
    sol: PotentialSolution,
    surface_radii: Sequence[float] | None = None,
    t_samples: Sequence[float] | None = None,
    residual_radii: Sequence[float] | None = None,
) -> MassReport:
    """Assemble both estimators and the expansion diagnostics."""
    m_surf = adm_surface(c, surface_radii)
    m_vol, samples = mass_from_volume(sol, t_samples)
    if residual_radii is None:
        lo = max(2.0 * _min_radius(c), 5.0)
        residual_radii = [float(r) for r in np.geomspace(lo, 200.0 * lo, 9)]
    residuals = (
        tuple(expansion_residuals(sol, residual_radii))
        if c.mass_tag is not None
        else ()
    )
    return MassReport(
        profile_label=c.label,
        mass_tag=c.mass_tag,
        m_surface=m_surf,
        m_volume=m_vol,
        samples=tuple(samples),
        expansion_residuals=residuals,
    )


def write_mass_csv(report: MassReport, stream: IO[str]) -> None:
    """`t,m_est` rows plus summary lines."""
    stream.write("t,m_est\n")
    for t, m_est in report.samples:
        stream.write(f"{t!r},{m_est!r}\n")
    stream.write(f"# m_surface={report.m_surface!r}\n")
    stream.write(f"# m_volume={report.m_volume!r}\n")
    if report.mass_tag is not None:
        stream.write(f"# mass_tag={report.mass_tag!r}\n")
