"""Residual evaluators for every form of the two nonlinear Dirac models.

Four equivalent presentations of the field equations are evaluated
independently and must all vanish on the closed-form solutions:

* the covector pair (chiral-angle equation and density equation),
* the four expanded scalars obtained by projecting that pair on r and theta,
* the reduced radial/angular system in the variable zeta = arcsinh(X),
* the standard gamma-matrix form i gamma^mu nabla_mu psi + nonlinearity.

The chiral model couples through phi^2 alone; the scalar model through
phi^2 cos(beta) -- a one-term difference this module keeps behind the
``nonlinear_scale`` knob so the common linear part can be compared directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import clifford, geometry, polar
from .geometry import GridPoint
from .polar import ModelSpec

MODELS = ("njl", "soler")
DEFAULT_MASK_MARGIN = 0.02


@dataclass(frozen=True)
class ResidualVector:
    """Named non-negative residual norms at one grid point."""

    point: GridPoint
    masked: bool
    residuals: dict

    def max(self):
        return max(self.residuals.values()) if self.residuals else 0.0


def model_p(model):
    if model == "njl":
        return 1.0
    if model == "soler":
        return 0.0
    return float(model)


def is_masked(pt: GridPoint, spec: ModelSpec, p, margin=DEFAULT_MASK_MARGIN):
    """Singular-region mask: a shell margin for the scalar model, a ring
    margin (radius and equator jointly) whenever p > 0."""
    near_radius = abs(2.0 * spec.m * pt.r - 1.0) < margin
    if p == 0.0:
        return near_radius
    return near_radius and abs(np.cos(pt.theta)) < margin


@dataclass(frozen=True)
class FieldPoint:
    """Closed-form solution data needed by the scalar evaluators."""

    X: float
    r_dX_dr: float
    sinh_alpha: float
    cosh_alpha: float
    sin_gamma: float
    cos_gamma: float
    sin_beta: float
    cos_beta: float
    phi2: float
    r_dlnphi2_dr: float
    dlnphi2_dtheta: float
    derivs: polar.PolarDerivatives


def exact_fields(pt: GridPoint, spec: ModelSpec, p) -> FieldPoint:
    X = polar.X_exact(pt.r, spec)
    rxp = polar.r_dX_dr_exact(pt.r, spec)
    sa, ca, sg, cg = geometry.velocity_spin_components(X, pt.theta)
    sb, cb = polar.chiral_components(X, pt.theta)
    phi2 = polar.module_general_p(pt, spec, p=p)
    r_dlog, dth_log = polar.module_log_derivatives(pt, spec, p=p)
    return FieldPoint(
        X=X, r_dX_dr=rxp,
        sinh_alpha=sa, cosh_alpha=ca, sin_gamma=sg, cos_gamma=cg,
        sin_beta=sb, cos_beta=cb,
        phi2=phi2, r_dlnphi2_dr=r_dlog, dlnphi2_dtheta=dth_log,
        derivs=polar.analytic_derivatives(X, rxp, pt.theta),
    )


# -- expanded four-equation system -------------------------------------------


def expanded_components(pt: GridPoint, spec: ModelSpec, model, fields_p=None,
                        nonlinear_scale=1.0):
    """Signed values of the four projected scalar equations.

    ``fields_p`` selects which closed-form density is substituted (defaults
    to the model's own); feeding one model's fields into the other's
    equations is the cross-model discrimination test.
    """
    if model not in MODELS:
        raise ValueError(f"expanded system exists for {MODELS}, got {model!r}")
    p_fields = model_p(model) if fields_p is None else float(fields_p)
    f = exact_fields(pt, spec, p_fields)
    r, th = pt.r, pt.theta
    m, E, l = spec.m, spec.E, spec.l
    s, c = np.sin(th), np.cos(th)
    der = f.derivs
    common = -2.0 * E * r * f.cosh_alpha + 2.0 * l * f.sinh_alpha / s \
        + 2.0 * m * r * f.cos_beta
    mom = 2.0 * E * r * f.sinh_alpha - 2.0 * l * f.cosh_alpha / s
    if model == "njl":
        bracket = common - r * f.phi2 * nonlinear_scale
        density_extra_r = 0.0
        density_extra_th = 0.0
    else:
        bracket = common - r * f.phi2 * f.cos_beta**2 * nonlinear_scale
        density_extra_r = (
            -r * f.phi2 * f.sin_beta * f.cos_beta * f.cos_gamma * nonlinear_scale
        )
        density_extra_th = (
            -r * f.phi2 * f.sin_beta * f.cos_beta * f.sin_gamma * nonlinear_scale
        )
    beta_r = der.r_d_beta_dr + der.d_alpha_dtheta + bracket * f.cos_gamma
    beta_theta = der.d_beta_dtheta - der.r_d_alpha_dr + bracket * f.sin_gamma
    density_r = (
        f.r_dlnphi2_dr + 2.0 + 2.0 * m * r * f.cos_gamma * f.sin_beta
        + density_extra_r + der.d_gamma_dtheta - mom * f.sin_gamma
    )
    density_theta = (
        f.dlnphi2_dtheta + c / s + 2.0 * m * r * f.sin_gamma * f.sin_beta
        + density_extra_th - der.r_d_gamma_dr + mom * f.cos_gamma
    )
    return {
        "beta_r": beta_r,
        "beta_theta": beta_theta,
        "density_r": density_r,
        "density_theta": density_theta,
    }


def residual_expanded(pt: GridPoint, spec: ModelSpec, model, fields_p=None,
                      nonlinear_scale=1.0, margin=DEFAULT_MASK_MARGIN):
    comps = expanded_components(pt, spec, model, fields_p, nonlinear_scale)
    return ResidualVector(
        point=pt,
        masked=is_masked(pt, spec, model_p(model), margin),
        residuals={k: abs(v) for k, v in comps.items()},
    )


# -- covector (polar) form -----------------------------------------------------


def covector_components(pt: GridPoint, spec: ModelSpec, model, fields_p=None,
                        nonlinear_scale=1.0):
    """Signed components of the chiral-angle and density covector equations.

    The axial and trace contractions of the tensorial connection,

        B_mu = eps_{mu alpha nu iota} R^{alpha nu iota} / 2,
        R_mu = R_{mu nu}^{  nu},

    are built with the coordinate volume form sqrt|g| [t r theta phi] = +1;
    that normalization is pinned by the requirement that the exact solutions
    annihilate the equations, and is cross-checked against the expanded
    system (r- and theta-projections agree identically).
    """
    if model not in MODELS:
        raise ValueError(f"covector system exists for {MODELS}, got {model!r}")
    p_fields = model_p(model) if fields_p is None else float(fields_p)
    f = exact_fields(pt, spec, p_fields)
    m = spec.m
    ang = polar.angle_state(pt, spec)
    ginv = geometry.inverse_metric_at(pt)
    Rc = geometry.tensorial_connection_at(pt, ang)
    eps = geometry.coordinate_epsilon_lower(pt)
    u = geometry.velocity_covector(pt, ang)
    s_cov = geometry.spin_covector(pt, ang)
    P = geometry.momentum_covector(spec.E, spec.l)
    R_up3 = np.einsum("ax,ny,iz,xyz->ani", ginv, ginv, ginv, Rc)
    B = 0.5 * np.einsum("mani,ani->m", eps, R_up3)
    R_trace = np.einsum("nr,mnr->m", ginv, Rc)
    P_up = ginv @ P
    u_up = ginv @ u
    s_up = ginv @ s_cov
    Ps = P @ s_up
    Pu = P @ u_up
    der = f.derivs
    dbeta = np.array([0.0, der.r_d_beta_dr / pt.r, der.d_beta_dtheta, 0.0])
    dlnphi2 = np.array([0.0, f.r_dlnphi2_dr / pt.r, f.dlnphi2_dtheta, 0.0])
    if model == "njl":
        nl_chiral = f.phi2 * nonlinear_scale
        nl_density = 0.0
    else:
        nl_chiral = f.phi2 * f.cos_beta**2 * nonlinear_scale
        nl_density = f.phi2 * f.cos_beta * nonlinear_scale
    chiral = (
        dbeta + B + 2.0 * Ps * u - 2.0 * Pu * s_cov
        + (2.0 * m * f.cos_beta - nl_chiral) * s_cov
    )
    axial_term = -2.0 * np.einsum("r,n,a,mrna->m", P_up, u_up, s_up, eps)
    density = (
        dlnphi2 + R_trace + axial_term + (2.0 * m - nl_density) * f.sin_beta * s_cov
    )
    return chiral, density


def residual_polar_covector(pt: GridPoint, spec: ModelSpec, model,
                            fields_p=None, nonlinear_scale=1.0,
                            margin=DEFAULT_MASK_MARGIN):
    """Euclidean norms of the two covector equations (they must both vanish
    componentwise, so the norm choice only sets the reporting scale)."""
    chiral, density = covector_components(pt, spec, model, fields_p,
                                          nonlinear_scale)
    return ResidualVector(
        point=pt,
        masked=is_masked(pt, spec, model_p(model), margin),
        residuals={
            "chiral_norm": float(np.linalg.norm(chiral)),
            "density_norm": float(np.linalg.norm(density)),
        },
    )


# -- reduced system in zeta ----------------------------------------------------


def reduced_components(pt: GridPoint, spec: ModelSpec, p, zeta_offset=0.0,
                       zeta_theta_amplitude=0.0, equation_mass=None):
    """Signed residuals of the reduced radial/angular system.

    The trial profile is zeta = ln(2mr) + zeta_offset
    + zeta_theta_amplitude cos(theta) with the density rebuilt consistently,
    so perturbations propagate exactly as a wrong solution would.  The last
    two equations differ only by terms proportional to d_theta zeta; their
    difference is returned as the separation-consistency scalar that forces
    a purely radial profile.  ``equation_mass`` perturbs the mass appearing
    in the equations while the trial fields keep the solution mass.
    """
    r, th = pt.r, pt.theta
    m = spec.m if equation_mass is None else equation_mass
    c, s = np.cos(th), np.sin(th)
    z = np.log(2.0 * spec.m * r) + zeta_offset + zeta_theta_amplitude * c
    r_dz = 1.0
    dth_z = -zeta_theta_amplitude * s
    sh, ch = np.sinh(z), np.cosh(z)
    D = sh * sh + c * c
    S = sh * sh + p * c * c
    phi2 = 2.0 * np.sqrt(D) / (r * S)
    r_dlog = sh * ch * r_dz * (1.0 / D - 2.0 / S) - 1.0
    dth_log = (sh * ch * dth_z - s * c) / D - (2.0 * sh * ch * dth_z - 2.0 * p * s * c) / S
    res1 = r_dlog - (
        (p - 1.0) * r * phi2 * sh * ch * c * c / D**1.5
        - 2.0
        + (2.0 * m * r * ch * c * c + 2.0 * m * r * s * s * sh - dth_z * s * c
           - 2.0 * sh * ch) / D
    )
    res2 = dth_log - (
        (p - 1.0) * r * phi2 * s * c * sh * sh / D**1.5
        + (r_dz - 2.0 * m * r * ch + 2.0 * m * r * sh + 1.0) * s * c / D
    )
    rhs_common = S * r * phi2 / np.sqrt(D) + 2.0 * m * r * ch - 2.0 * m * r * sh - 2.0
    # 0 * inf guards: the tan/cot factors multiply d_theta zeta, which is
    # identically zero on the radial family.
    radial_term = 0.0 if dth_z == 0.0 else dth_z * np.tanh(z) * np.tan(th)
    angular_lhs = 0.0 if dth_z == 0.0 else dth_z * (np.cosh(z) / np.sinh(z)) * (c / s)
    res3 = r_dz - (rhs_common + radial_term)
    res4 = angular_lhs - (rhs_common - r_dz)
    return {
        "module_radial": res1,
        "module_angular": res2,
        "zeta_radial": res3,
        "zeta_angular": res4,
        "separation_consistency": res3 - res4,
    }


def residual_reduced(pt: GridPoint, spec: ModelSpec, p, zeta_offset=0.0,
                     zeta_theta_amplitude=0.0, equation_mass=None,
                     margin=DEFAULT_MASK_MARGIN):
    comps = reduced_components(pt, spec, p, zeta_offset, zeta_theta_amplitude,
                               equation_mass)
    return ResidualVector(
        point=pt,
        masked=is_masked(pt, spec, p, margin),
        residuals={k: abs(v) for k, v in comps.items()},
    )


# -- standard gamma-matrix form -------------------------------------------------


def residual_standard(pt: GridPoint, spec: ModelSpec, p, mode="analytic",
                      step=1e-5, coupling_sign=None, nonlinear_scale=1.0,
                      equation_mass=None):
    """Max component norm of i gamma^mu nabla_mu psi
    + (1/4)(Phi + i p Theta pi) psi - m psi on the assembled spinor.

    Phi and Theta are recomputed from the spinor's own bilinears rather than
    from the polar formulas, so this residual exercises the whole chain:
    gamma basis, tetrads, spin connection, density, chiral angle and phase.
    ``equation_mass`` perturbs the mass term only (fields keep spec.m).
    """
    nabla, psi = polar.covariant_derivative(
        pt, spec, p=p, mode=mode, step=step, coupling_sign=coupling_sign
    )
    ang = polar.angle_state(pt, spec)
    xi = geometry.tetrad_at(pt, ang)
    gamma_coord = np.einsum("am,aij->mij", xi, clifford.GAMMA_STACK)
    bl = clifford.bilinears(psi)
    dirac = 1j * np.einsum("mij,mj->i", gamma_coord, nabla)
    nonlinear = 0.25 * nonlinear_scale * (
        bl.phi * clifford.IDENTITY + 1j * p * bl.theta * clifford.PI
    )
    m_eq = spec.m if equation_mass is None else equation_mass
    res = dirac + nonlinear @ psi - m_eq * psi
    return float(np.max(np.abs(res)))


# -- grid sweeps ----------------------------------------------------------------


@dataclass
class SweepStats:
    """Aggregate of unmasked residual maxima over a grid sweep."""

    n_points: int = 0
    n_masked: int = 0
    max: float = 0.0
    mean: float = 0.0
    median: float = 0.0
    q95: float = 0.0
    values: list = field(default_factory=list)

    def finalize(self):
        if self.values:
            arr = np.asarray(self.values)
            self.max = float(arr.max())
            self.mean = float(arr.mean())
            self.median = float(np.quantile(arr, 0.5))
            self.q95 = float(np.quantile(arr, 0.95))
        return self

    def as_dict(self):
        return {
            "n_points": self.n_points,
            "n_masked": self.n_masked,
            "max": self.max,
            "mean": self.mean,
            "median": self.median,
            "q95": self.q95,
        }


def sweep(points, evaluate, spec: ModelSpec, p, margin=DEFAULT_MASK_MARGIN):
    """Evaluate a per-point residual over points, skipping masked ones.

    ``evaluate(pt)`` returns either a float or a ResidualVector.
    """
    stats = SweepStats()
    for pt in points:
        stats.n_points += 1
        if is_masked(pt, spec, p, margin):
            stats.n_masked += 1
            continue
        out = evaluate(pt)
        value = out.max() if isinstance(out, ResidualVector) else float(out)
        stats.values.append(value)
    return stats.finalize()
