"""Singular regions and asymptotics of the matter distributions.

Both models blow up on the Compton-scale radius 2mr = 1, but with different
symmetry: any chiral admixture (p > 0) confines the divergence to the
equatorial plane, leaving a ring; the purely scalar model (p = 0) keeps the
whole sphere.  The origin is regular (phi^2 -> 8m) and both densities fall
off like 1/r^2, with phi^2 r^2 -> 2/m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse
from .polar import ModelSpec, phi2_grid

DIVERGENCE_FACTOR = 1e6  # phi^2 above this multiple of 8m marks a cell singular


@dataclass(frozen=True)
class SingularLocus:
    """Analytic description of the divergence set."""

    kind: str  # "ring" | "shell" | "none"
    radius: float
    angular_constraint: str | None  # e.g. "cos(theta) = 0"


@dataclass(frozen=True)
class LocusEstimate:
    """Grid-refined numerical localization of the divergence."""

    kind: str
    radius: float
    radius_uncertainty: float
    theta: float | None
    theta_uncertainty: float | None
    diverged: bool
    refinements: int


def _as_p(model):
    if model == "njl":
        return 1.0
    if model == "soler":
        return 0.0
    return float(model)


def singular_locus(spec: ModelSpec, p=None) -> SingularLocus:
    """Divergence set of the interpolated density: radius 1/(2m) always,
    restricted to the equator whenever p != 0."""
    p = spec.p if p is None else _as_p(p)
    radius = 1.0 / (2.0 * spec.m)
    if p == 0.0:
        return SingularLocus(kind="shell", radius=radius, angular_constraint=None)
    return SingularLocus(kind="ring", radius=radius,
                         angular_constraint="cos(theta) = 0")


def locate_numerically(spec: ModelSpec, model=None, r_window=None,
                       n_r=400, n_theta=200, max_refinements=6,
                       target_uncertainty=None) -> LocusEstimate:
    """Locate the density maximum on a grid and refine around it.

    Each refinement re-grids a few cells around the argmax, shrinking the
    radial uncertainty geometrically; refinement continues past the target
    uncertainty until the peak either trips the divergence threshold or
    stays bounded through all levels.  Raises GridTooCoarse when refinement
    stops shrinking the uncertainty.
    """
    model = spec.p if model is None else model
    p = _as_p(model)
    rc = 1.0 / (2.0 * spec.m)
    if r_window is None:
        r_window = (0.2 * rc, 2.0 * rc)
    if target_uncertainty is None:
        target_uncertainty = 1e-3 * rc
    theta_lo, theta_hi = 1e-3, np.pi - 1e-3
    r_lo, r_hi = r_window
    diverged = False
    prev_unc = np.inf
    refinements = 0
    best_r = best_th = None
    report_r_unc = report_th_unc = None
    theta_spread = 0.0
    for level in range(max_refinements + 1):
        rs = np.linspace(r_lo, r_hi, n_r)
        ths = np.linspace(theta_lo, theta_hi, n_theta)
        Rg, Tg = np.meshgrid(rs, ths, indexing="ij")
        vals = phi2_grid(model, Rg, Tg, spec.m)
        vals = np.where(np.isfinite(vals), vals, np.inf)
        i, j = np.unravel_index(np.argmax(vals), vals.shape)
        peak = vals[i, j]
        if not np.isfinite(peak) or peak > DIVERGENCE_FACTOR * 8.0 * spec.m:
            diverged = True
        # shell vs ring: fraction of theta cells at the peak radius whose value
        # stays within a decade of the peak (only meaningful on the coarse
        # pass, before any theta-window narrowing)
        if level == 0:
            row = vals[i, :]
            with np.errstate(invalid="ignore"):
                theta_spread = float(np.mean(row >= 0.1 * min(peak, 1e300)))
        dr = rs[1] - rs[0]
        dth = ths[1] - ths[0]
        refinements = level
        if report_r_unc is None or dr <= target_uncertainty:
            # location is reported at the first level that meets the target;
            # deeper levels only probe for divergence
            best_r, best_th = float(rs[i]), float(ths[j])
            report_r_unc, report_th_unc = float(dr), float(dth)
        if dr <= target_uncertainty and (diverged or level == max_refinements):
            break
        if level > 0 and dr >= prev_unc:
            raise GridTooCoarse(
                f"refinement level {level} did not reduce radial uncertainty "
                f"({dr:.3e} >= {prev_unc:.3e})"
            )
        prev_unc = dr
        # shrink to a window of a few cells around the argmax
        r_lo = max(r_window[0], rs[i] - 3 * dr)
        r_hi = min(r_window[1], rs[i] + 3 * dr)
        if p != 0.0:
            theta_lo = max(1e-3, ths[j] - 3 * dth)
            theta_hi = min(np.pi - 1e-3, ths[j] + 3 * dth)
    if not diverged:
        kind = "none"
    elif theta_spread > 0.5:
        kind = "shell"
    else:
        kind = "ring"
    return LocusEstimate(
        kind=kind,
        radius=best_r,
        radius_uncertainty=report_r_unc,
        theta=None if kind == "shell" else best_th,
        theta_uncertainty=None if kind == "shell" else report_th_unc,
        diverged=diverged,
        refinements=refinements,
    )


def decay_fit(spec: ModelSpec, model=None, r_range=(10.0, 1000.0), n=40,
              theta=np.pi / 4):
    """Least-squares slope of ln phi^2 against ln r at large radius.

    Returns (exponent, amplitude): phi^2 ~ amplitude * r^exponent.
    """
    model = spec.p if model is None else model
    rs = np.geomspace(r_range[0] / spec.m, r_range[1] / spec.m, n)
    vals = phi2_grid(model, rs, np.full_like(rs, theta), spec.m)
    slope, intercept = np.polyfit(np.log(rs), np.log(vals), 1)
    return float(slope), float(np.exp(intercept))


def asymptotics_report(spec: ModelSpec, model=None):
    """Tabulate phi^2 r^2 at large radii and fit the decay exponent.

    phi^2 r^2 approaches 2/m with an O(1/r^2) error; the origin value is the
    finite limit 8m for both models.
    """
    model = spec.p if model is None else model
    radii = np.array([10.0, 100.0, 1000.0]) / spec.m
    thetas = np.array([np.pi / 4, np.pi / 2])
    table = []
    for r in radii:
        for th in thetas:
            val = float(phi2_grid(model, r, th, spec.m)) * r * r
            table.append({"r": float(r), "theta": float(th), "phi2_r2": val})
    exponent, amplitude = decay_fit(spec, model)
    origin = float(phi2_grid(model, 1e-6 / spec.m, np.pi / 3, spec.m))
    return {
        "limit_constant": 2.0 / spec.m,
        "phi2_r2_at_100_over_m": float(
            phi2_grid(model, 100.0 / spec.m, np.pi / 2, spec.m)
        ) * (100.0 / spec.m) ** 2,
        "decay_exponent": exponent,
        "origin_value": origin,
        "origin_limit": 8.0 * spec.m,
        "table": table,
    }


def singularity_report(spec: ModelSpec, model=None):
    """JSON-ready report combining the analytic locus, its numerical
    localization and the large-radius behaviour."""
    model = spec.p if model is None else model
    p = _as_p(model)
    locus = singular_locus(spec, p)
    estimate = locate_numerically(spec, model)
    asym = asymptotics_report(spec, model)
    name = {1.0: "njl", 0.0: "soler"}.get(p, f"p:{p}")
    return {
        "model": name,
        "p": p,
        "locus": {
            "kind": locus.kind,
            "radius": locus.radius,
            "angular_constraint": locus.angular_constraint,
        },
        "numerical_locus": {
            "kind": estimate.kind,
            "radius": estimate.radius,
            "radius_uncertainty": estimate.radius_uncertainty,
            "theta": estimate.theta,
            "theta_uncertainty": estimate.theta_uncertainty,
            "diverged": estimate.diverged,
            "refinements": estimate.refinements,
        },
        "decay_exponent": asym["decay_exponent"],
        "limit_constant": asym["limit_constant"],
        "origin_value": asym["origin_value"],
    }
