"""Polar variables of the closed-form solutions and the explicit spinor.

The radial profile of both models is X(r) = (1/2)(2mr - 1/(2mr)), which is
sinh(zeta) for zeta = ln(2mr).  The chiral angle and the kinematic angles are
algebraic in X and cos(theta); the particle density phi^2 depends on the
model through the interpolation parameter p in [0, 1]:

    phi^2 = 2 sqrt(sinh^2 zeta + cos^2 theta) / (r [sinh^2 zeta + p cos^2 theta])

with p = 1 the chiral (Nambu--Jona-Lasinio) density and p = 0 the purely
scalar (Soler) density, where it factorizes as sqrt(X^2 + cos^2 theta) G(r)
with G = 2/(r X^2).

The chiral angle beta is kept as its (sin, cos) pair throughout: X changes
sign on the sphere 2mr = 1 and an unwrapped angle would hit a branch cut
there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import clifford, geometry
from .errors import SingularG, SingularPoint
from .geometry import AngleState, GridPoint


@dataclass(frozen=True)
class ModelSpec:
    """Mass, interpolation parameter and quantum numbers of a model run.

    E defaults to the mass and l to one half: the only values the chiral
    model admits, and the ones the closed-form solutions carry.
    """

    m: float = 1.0
    p: float = 1.0
    E: float = None
    l: float = 0.5

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"interpolation parameter must lie in [0,1], got {self.p!r}")
        if self.E is None:
            object.__setattr__(self, "E", self.m)

    @classmethod
    def njl(cls, m=1.0, **kw):
        return cls(m=m, p=1.0, **kw)

    @classmethod
    def soler(cls, m=1.0, **kw):
        return cls(m=m, p=0.0, **kw)

    @classmethod
    def interpolating(cls, p, m=1.0, **kw):
        return cls(m=m, p=p, **kw)


@dataclass(frozen=True)
class PolarState:
    """Snapshot of all polar variables at one grid point."""

    X: float
    zeta: float
    G: float
    phi2: float
    sin_beta: float
    cos_beta: float
    alpha: float
    gamma: float

    @property
    def beta(self):
        """Principal value only; formulas must use the (sin, cos) pair."""
        return float(np.arctan2(self.sin_beta, self.cos_beta))


def X_exact(r, spec: ModelSpec):
    """Radial profile (2mr - 1/(2mr))/2 = sinh(ln 2mr); vanishes at 2mr = 1."""
    u = 2.0 * spec.m * r
    return 0.5 * (u - 1.0 / u)


def zeta_exact(r, spec: ModelSpec):
    return np.log(2.0 * spec.m * r)


def r_dX_dr_exact(r, spec: ModelSpec):
    """r X'(r) = cosh(ln 2mr) on the closed-form branch."""
    u = 2.0 * spec.m * r
    return 0.5 * (u + 1.0 / u)


def G_exact(r, spec: ModelSpec):
    """Radial companion G = 2/(r X^2) of the scalar model."""
    X = X_exact(r, spec)
    if X == 0.0 or abs(X) < 1e-15 * max(1.0, 2.0 * spec.m * r):
        raise SingularG(r, None, "G = 2/(r X^2) with X = 0 at 2mr = 1")
    return 2.0 / (r * X * X)


def chiral_components(X, theta):
    """(sin beta, cos beta) of the chiral angle; tan beta = -cos(theta)/X."""
    c = np.cos(theta)
    q = np.sqrt(X * X + c * c)
    return (-c / q, X / q)


@dataclass(frozen=True)
class PolarDerivatives:
    """First partials of the tilt, rapidity and chiral angle.

    All six follow from the parametrization by direct differentiation; the
    radial ones carry the profile only through r X'(r).
    """

    d_gamma_dtheta: float
    r_d_gamma_dr: float
    d_alpha_dtheta: float
    r_d_alpha_dr: float
    d_beta_dtheta: float
    r_d_beta_dr: float


def analytic_derivatives(X, r_dX_dr, theta):
    """Closed-form partials of gamma, alpha, beta for a radial profile X(r)."""
    c, s = np.cos(theta), np.sin(theta)
    D = X * X + c * c
    ch = np.sqrt(X * X + 1.0)
    F = r_dX_dr / ch
    return PolarDerivatives(
        d_gamma_dtheta=X * ch / D,
        r_d_gamma_dr=c * s * F / D,
        d_alpha_dtheta=ch * c / D,
        r_d_alpha_dr=-X * s * F / D,
        d_beta_dtheta=X * s / D,
        r_d_beta_dr=r_dX_dr * c / D,
    )


def angle_state(pt: GridPoint, spec: ModelSpec) -> AngleState:
    """AngleState of the closed-form branch, with analytic partials.

    On the ring X = 0, cos(theta) = 0 the parametrization quotients are 0/0;
    the ambiguity is removable along some paths but the locus is the physical
    singular ring, so evaluation refuses rather than picking a limit.
    """
    X = X_exact(pt.r, spec)
    if X * X + np.cos(pt.theta) ** 2 <= 1e-28:
        raise SingularPoint(pt.r, pt.theta,
                            "kinematic quotients are 0/0 on the ring")
    rxp = r_dX_dr_exact(pt.r, spec)
    sa, ca, sg, cg = geometry.velocity_spin_components(X, pt.theta)
    d = analytic_derivatives(X, rxp, pt.theta)
    return AngleState(
        sinh_alpha=sa,
        cosh_alpha=ca,
        sin_gamma=sg,
        cos_gamma=cg,
        d_alpha_dr=d.r_d_alpha_dr / pt.r,
        d_alpha_dtheta=d.d_alpha_dtheta,
        d_gamma_dr=d.r_d_gamma_dr / pt.r,
        d_gamma_dtheta=d.d_gamma_dtheta,
    )


def angle_field(spec: ModelSpec):
    """Closed-form AngleState as a callable of raw (r, theta); used by the
    finite-difference identity checks."""

    def field(r, theta):
        return angle_state(GridPoint(r, theta), spec)

    return field


# -- matter distributions -----------------------------------------------------


def _phi2_njl_raw(r, theta, m):
    radicand = (
        16.0 * m**4 * r**4 + 8.0 * m**2 * r**2 * np.cos(2.0 * theta) + 1.0
    )
    return 8.0 * m / np.sqrt(radicand)


def _phi2_soler_raw(r, theta, m):
    radicand = (
        16.0 * m**4 * r**4 + 8.0 * m**2 * r**2 * np.cos(2.0 * theta) + 1.0
    )
    return 8.0 * m * np.sqrt(radicand) / (4.0 * m**2 * r**2 - 1.0) ** 2


def _phi2_general_raw(r, theta, m, p):
    sh = np.sinh(np.log(2.0 * m * r))
    c2 = np.cos(theta) ** 2
    return 2.0 * np.sqrt(sh * sh + c2) / (r * (sh * sh + p * c2))


def module_njl(pt: GridPoint, spec: ModelSpec):
    """Chiral-model density 8m / sqrt(16 m^4 r^4 + 8 m^2 r^2 cos 2theta + 1).

    Agrees with 2/(r sqrt(X^2 + cos^2 theta)) on the closed-form branch;
    diverges only on the equatorial ring 2mr = 1, theta = pi/2.
    """
    radicand = (
        16.0 * spec.m**4 * pt.r**4
        + 8.0 * spec.m**2 * pt.r**2 * np.cos(2.0 * pt.theta)
        + 1.0
    )
    if radicand <= 1e-28:
        raise SingularPoint(pt.r, pt.theta, "equatorial ring 2mr = 1")
    return 8.0 * spec.m / np.sqrt(radicand)


def module_soler(pt: GridPoint, spec: ModelSpec):
    """Scalar-model density; diverges on the whole sphere 2mr = 1."""
    denom = (4.0 * spec.m**2 * pt.r**2 - 1.0) ** 2
    if denom <= 1e-28:
        raise SingularPoint(pt.r, pt.theta, "singular sphere 2mr = 1")
    radicand = (
        16.0 * spec.m**4 * pt.r**4
        + 8.0 * spec.m**2 * pt.r**2 * np.cos(2.0 * pt.theta)
        + 1.0
    )
    return 8.0 * spec.m * np.sqrt(radicand) / denom


def module_general_p(pt: GridPoint, spec: ModelSpec, p=None):
    """Interpolated density 2 sqrt(sh^2 + cos^2 th) / (r [sh^2 + p cos^2 th]).

    Reduces to module_njl at p = 1 and to module_soler at p = 0.
    """
    p = spec.p if p is None else p
    sh = np.sinh(zeta_exact(pt.r, spec))
    c2 = np.cos(pt.theta) ** 2
    denom = sh * sh + p * c2
    if denom <= 1e-28:
        raise SingularPoint(pt.r, pt.theta, "locus sinh^2 zeta + p cos^2 theta = 0")
    return 2.0 * np.sqrt(sh * sh + c2) / (pt.r * denom)


def phi2_grid(model, r, theta, m):
    """Vectorized raw density on arrays; no singularity checks.

    ``model`` is "njl", "soler" or an interpolation parameter.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if model == "njl":
            return _phi2_njl_raw(r, theta, m)
        if model == "soler":
            return _phi2_soler_raw(r, theta, m)
        return _phi2_general_raw(r, theta, m, float(model))


def module_log_derivatives(pt: GridPoint, spec: ModelSpec, p=None):
    """(r d_r ln phi^2, d_theta ln phi^2) of the interpolated density on the
    closed-form branch."""
    p = spec.p if p is None else p
    z = zeta_exact(pt.r, spec)
    sh, ch = np.sinh(z), np.cosh(z)
    c, s = np.cos(pt.theta), np.sin(pt.theta)
    D = sh * sh + c * c
    S = sh * sh + p * c * c
    r_dr = sh * ch * (1.0 / D - 2.0 / S) - 1.0
    d_th = -s * c / D + 2.0 * p * s * c / S
    return r_dr, d_th


def polar_state(pt: GridPoint, spec: ModelSpec, p=None) -> PolarState:
    """All polar variables at a point on the closed-form branch."""
    p = spec.p if p is None else p
    X = X_exact(pt.r, spec)
    sb, cb = chiral_components(X, pt.theta)
    ang = angle_state(pt, spec)
    try:
        G = G_exact(pt.r, spec)
    except SingularG:
        G = np.inf
    return PolarState(
        X=X,
        zeta=zeta_exact(pt.r, spec),
        G=G,
        phi2=module_general_p(pt, spec, p=p),
        sin_beta=sb,
        cos_beta=cb,
        alpha=ang.alpha,
        gamma=ang.gamma,
    )


# -- explicit spinor ----------------------------------------------------------


def assemble_spinor(pt: GridPoint, spec: ModelSpec, phi2=None, p=None,
                    t=0.0, azimuth=0.0):
    """Rest-frame, spin-eigenstate spinor of the closed-form solution.

    psi = phi exp(-i(E t + l phi_az)) exp(-i beta pi/2) (1, 0, 1, 0)^T

    The returned components carry flat (frame) indices: the boost to the
    moving frame lives entirely in the tetrads, so bilinears of this spinor
    give the rest-frame S^a and U^a; coordinate components need a tetrad
    contraction.
    """
    if phi2 is None:
        phi2 = module_general_p(pt, spec, p=p)
    X = X_exact(pt.r, spec)
    sb, cb = chiral_components(X, pt.theta)
    # exp(-i beta pi / 2) via half-angle of the (sin, cos) pair
    half = 0.5 * np.arctan2(sb, cb)
    rot = np.cos(half) * clifford.IDENTITY - 1j * np.sin(half) * clifford.PI
    phase = np.exp(-1j * (spec.E * t + spec.l * azimuth))
    rest = np.array([1.0, 0.0, 1.0, 0.0], dtype=complex)
    return np.sqrt(phi2) * phase * (rot @ rest)


def spinor_coordinate_partials(pt: GridPoint, spec: ModelSpec, p=None,
                               t=0.0, azimuth=0.0):
    """Analytic d_mu psi for mu in (t, r, theta, phi_az).

    The t and azimuth derivatives are pure phases; the r and theta ones
    follow from the log-derivative of the density and the chiral-angle
    partials.
    """
    p = spec.p if p is None else p
    psi = assemble_spinor(pt, spec, p=p, t=t, azimuth=azimuth)
    X = X_exact(pt.r, spec)
    rxp = r_dX_dr_exact(pt.r, spec)
    der = analytic_derivatives(X, rxp, pt.theta)
    r_dlog, dth_log = module_log_derivatives(pt, spec, p=p)
    pipsi = clifford.PI @ psi
    return {
        geometry.T: -1j * spec.E * psi,
        geometry.R: (0.5 * r_dlog / pt.r) * psi
        - 0.5j * (der.r_d_beta_dr / pt.r) * pipsi,
        geometry.TH: (0.5 * dth_log) * psi - 0.5j * der.d_beta_dtheta * pipsi,
        geometry.PH: -1j * spec.l * psi,
    }


SPIN_COUPLING_SIGN = None


def spin_coupling_sign():
    """Sign of the sigma^{ab} term in the spinor covariant derivative.

    Calibrated once by evaluating the standard-form residual of the exact
    chiral solution at a single point for both candidate signs and freezing
    the one that annihilates it (it is +1 for this gamma basis).
    """
    global SPIN_COUPLING_SIGN
    if SPIN_COUPLING_SIGN is None:
        from .equations import residual_standard

        spec = ModelSpec.njl(m=1.0)
        pt = GridPoint(1.0, np.pi / 3)
        res = {
            s: residual_standard(pt, spec, p=1.0, coupling_sign=s)
            for s in (+1.0, -1.0)
        }
        SPIN_COUPLING_SIGN = min(res, key=res.get)
    return SPIN_COUPLING_SIGN


def covariant_derivative(pt: GridPoint, spec: ModelSpec, p=None, mode="analytic",
                         step=1e-5, coupling_sign=None):
    """nabla_mu psi = d_mu psi + (sign/2) C_{ab mu} sigma^{ab} psi.

    mode="fd" recomputes the (r, theta) partials of the assembled spinor by
    Richardson-extrapolated central differences as a cross-check path.  The
    principal-value chiral rotation makes the spinor flip sign across the
    equatorial segment inside 2mr = 1 (a lift ambiguity, invisible to any
    pointwise quantity); differencing across that curve fails loudly with
    StepTooLarge instead of returning garbage.  The analytic path is
    branch-free everywhere off the singular locus.
    """
    p = spec.p if p is None else p
    if coupling_sign is None:
        coupling_sign = spin_coupling_sign()
    psi = assemble_spinor(pt, spec, p=p)
    if mode == "analytic":
        dpsi = spinor_coordinate_partials(pt, spec, p=p)
    elif mode == "fd":
        def f(r, theta):
            return assemble_spinor(GridPoint(r, theta), spec, p=p)

        d_dr, d_dth, _ = geometry.richardson_partials(f, pt.r, pt.theta, step=step)
        dpsi = {
            geometry.T: -1j * spec.E * psi,
            geometry.R: d_dr,
            geometry.TH: d_dth,
            geometry.PH: -1j * spec.l * psi,
        }
    else:
        raise ValueError(f"unknown derivative mode {mode!r}")
    ang = angle_state(pt, spec)
    C = geometry.spin_connection_at(pt, ang)
    spin = 0.5 * np.einsum("abm,abij->mij", C, clifford.SIGMA_UPPER_STACK)
    return np.stack(
        [dpsi[mu] + coupling_sign * spin[mu] @ psi for mu in range(4)]
    ), psi


def polar_decomposition_residual(pt: GridPoint, spec: ModelSpec, p=None,
                                 mode="analytic", step=1e-5,
                                 momentum_override=None):
    """Max component norm over mu of (direct nabla psi) minus its polar form

        (nabla_mu ln phi - i/2 nabla_mu beta pi - i P_mu
         - 1/2 R_{ij mu} sigma^{ij}) psi

    with the tensorial connection contracted into the frame.  Vanishes on the
    exact solutions; a perturbed momentum makes it rise, which is the
    sensitivity check on the phase content.
    """
    p = spec.p if p is None else p
    nabla, psi = covariant_derivative(pt, spec, p=p, mode=mode, step=step)
    X = X_exact(pt.r, spec)
    rxp = r_dX_dr_exact(pt.r, spec)
    der = analytic_derivatives(X, rxp, pt.theta)
    r_dlog, dth_log = module_log_derivatives(pt, spec, p=p)
    dlnphi = np.array([0.0, 0.5 * r_dlog / pt.r, 0.5 * dth_log, 0.0])
    dbeta = np.array([0.0, der.r_d_beta_dr / pt.r, der.d_beta_dtheta, 0.0])
    P = (
        np.asarray(momentum_override, dtype=float)
        if momentum_override is not None
        else geometry.momentum_covector(spec.E, spec.l)
    )
    ang = angle_state(pt, spec)
    xi = geometry.tetrad_at(pt, ang)
    R_flat = np.einsum(
        "an,bp,npm->abm", xi, xi, geometry.tensorial_connection_at(pt, ang)
    )
    rmat = 0.5 * np.einsum("abm,abij->mij", R_flat, clifford.SIGMA_UPPER_STACK)
    worst = 0.0
    for mu in range(4):
        rhs = (
            dlnphi[mu] * psi
            - 0.5j * dbeta[mu] * (clifford.PI @ psi)
            - 1j * P[mu] * psi
            - rmat[mu] @ psi
        )
        worst = max(worst, float(np.max(np.abs(nabla[mu] - rhs))))
    return worst
