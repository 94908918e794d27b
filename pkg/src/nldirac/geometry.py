"""Flat spherical background: metric, connection, frames and their identities.

Coordinates are ordered (t, r, theta, phi) with signature (+, -, -, -):

    g_tt = 1,  g_rr = -1,  g_thth = -r^2,  g_phph = -r^2 sin^2(theta)

The motion of the spinor fluid is encoded in two angles: a rapidity ``alpha``
boosting along the azimuthal direction and a tilt ``gamma`` rotating the spin
axis in the (r, theta) plane.  Everything downstream (tetrads, spin
connection, tensorial connection) is an explicit closed form in those angles
and their first partials, collected in :class:`AngleState`.

Orientation: the coordinate volume form is eps_{t r theta phi} = +r^2 sin
(theta), matching the flat eps_{0123} = +1 through the tetrads below, whose
determinant is +r^2 sin(theta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import EPS4
from .errors import PoleOrOrigin, StepTooLarge

T, R, TH, PH = 0, 1, 2, 3
COORD_NAMES = ("t", "r", "theta", "phi")


@dataclass(frozen=True)
class GridPoint:
    """A point of the (r, theta) half-plane, poles and origin excluded."""

    r: float
    theta: float

    def __post_init__(self):
        if not (self.r > 0.0):
            raise PoleOrOrigin(f"radial coordinate must be positive, got {self.r!r}")
        if not (0.0 < self.theta < np.pi):
            raise PoleOrOrigin(
                f"polar angle must lie strictly between 0 and pi, got {self.theta!r}"
            )


@dataclass(frozen=True)
class AngleState:
    """Velocity rapidity and spin tilt at a point, through their components.

    The angles only ever enter through sinh/cosh and sin/cos, so those are
    stored directly; partials default to zero (static frame).
    """

    sinh_alpha: float
    cosh_alpha: float
    sin_gamma: float
    cos_gamma: float
    d_alpha_dr: float = 0.0
    d_alpha_dtheta: float = 0.0
    d_gamma_dr: float = 0.0
    d_gamma_dtheta: float = 0.0

    @property
    def alpha(self):
        return float(np.arcsinh(self.sinh_alpha))

    @property
    def gamma(self):
        return float(np.arctan2(self.sin_gamma, self.cos_gamma))


def velocity_spin_components(X, theta):
    """Separated-variable parametrization of rapidity and tilt.

    Returns (sinh_alpha, cosh_alpha, sin_gamma, cos_gamma) given the radial
    profile value X; valid for any theta in [0, pi] since the quotients stay
    finite off the locus X = 0, cos(theta) = 0.
    """
    c = np.cos(theta)
    q = np.sqrt(X * X + c * c)
    ch = np.sqrt(X * X + 1.0)
    return (np.sin(theta) / q, ch / q, X * np.sin(theta) / q, ch * c / q)


def angles_at(pt: GridPoint, X) -> AngleState:
    """AngleState (components only, no partials) at a grid point."""
    sa, ca, sg, cg = velocity_spin_components(X, pt.theta)
    return AngleState(sinh_alpha=sa, cosh_alpha=ca, sin_gamma=sg, cos_gamma=cg)


def static_angles() -> AngleState:
    """alpha = gamma = 0: the static spherical frame."""
    return AngleState(0.0, 1.0, 0.0, 1.0)


# -- metric and Levi-Civita connection --------------------------------------


def metric_at(pt: GridPoint):
    r, th = pt.r, pt.theta
    return np.diag([1.0, -1.0, -r * r, -((r * np.sin(th)) ** 2)])


def inverse_metric_at(pt: GridPoint):
    r, th = pt.r, pt.theta
    return np.diag([1.0, -1.0, -1.0 / (r * r), -1.0 / (r * np.sin(th)) ** 2])


def metric_determinant(pt: GridPoint):
    return -(pt.r**4) * np.sin(pt.theta) ** 2


def sqrt_abs_g(pt: GridPoint):
    return pt.r**2 * np.sin(pt.theta)


def christoffel_at(pt: GridPoint):
    """Connection coefficients Lam[rho, mu, nu] = Lambda^rho_{mu nu}.

    Exactly six independent families are nonzero; symmetric in (mu, nu).
    """
    r, th = pt.r, pt.theta
    lam = np.zeros((4, 4, 4))
    lam[TH, TH, R] = lam[TH, R, TH] = 1.0 / r
    lam[R, TH, TH] = -r
    lam[PH, PH, R] = lam[PH, R, PH] = 1.0 / r
    lam[R, PH, PH] = -r * np.sin(th) ** 2
    lam[PH, PH, TH] = lam[PH, TH, PH] = np.cos(th) / np.sin(th)
    lam[TH, PH, PH] = -np.cos(th) * np.sin(th)
    return lam


def christoffel_partials_at(pt: GridPoint):
    """Analytic partials dLam[sigma, rho, mu, nu] = d_sigma Lambda^rho_{mu nu}."""
    r, th = pt.r, pt.theta
    d = np.zeros((4, 4, 4, 4))
    d[R, TH, TH, R] = d[R, TH, R, TH] = -1.0 / r**2
    d[R, R, TH, TH] = -1.0
    d[R, PH, PH, R] = d[R, PH, R, PH] = -1.0 / r**2
    d[R, R, PH, PH] = -np.sin(th) ** 2
    d[TH, R, PH, PH] = -r * np.sin(2 * th)
    d[TH, PH, PH, TH] = d[TH, PH, TH, PH] = -1.0 / np.sin(th) ** 2
    d[TH, TH, PH, PH] = -np.cos(2 * th)
    return d


def riemann_at(pt: GridPoint):
    """Riemann tensor of the connection; identically zero here.

    Assembled from the closed-form coefficients and their analytic partials,
    so the result is a pure rounding check of flatness.
    """
    lam = christoffel_at(pt)
    dlam = christoffel_partials_at(pt)
    # R^rho_{sigma mu nu} = d_mu Lam^rho_{nu sigma} - d_nu Lam^rho_{mu sigma}
    #                       + Lam^rho_{mu lam} Lam^lam_{nu sigma} - (mu <-> nu)
    term = np.einsum("mrns->rsmn", dlam) - np.einsum("nrms->rsmn", dlam)
    prod = np.einsum("rml,lns->rsmn", lam, lam) - np.einsum("rnl,lms->rsmn", lam, lam)
    return term + prod


# -- covectors of the spinor fluid -------------------------------------------


def velocity_covector(pt: GridPoint, ang: AngleState):
    """u_mu: unit timelike, boosted along phi."""
    u = np.zeros(4)
    u[T] = ang.cosh_alpha
    u[PH] = pt.r * np.sin(pt.theta) * ang.sinh_alpha
    return u


def spin_covector(pt: GridPoint, ang: AngleState):
    """s_mu: unit spacelike, tilted in the (r, theta) plane, orthogonal to u."""
    s = np.zeros(4)
    s[R] = ang.cos_gamma
    s[TH] = pt.r * ang.sin_gamma
    return s


def momentum_covector(energy, angular_momentum):
    """Constant phase gradient P_mu = (E, 0, 0, l)."""
    return np.array([energy, 0.0, 0.0, angular_momentum])


def velocity_spin_partials(pt: GridPoint, ang: AngleState):
    """Coordinate partials d_mu u_nu and d_mu s_nu (analytic, first order)."""
    r, th = pt.r, pt.theta
    s_, c_ = np.sin(th), np.cos(th)
    du = np.zeros((4, 4))
    du[R, T] = ang.sinh_alpha * ang.d_alpha_dr
    du[TH, T] = ang.sinh_alpha * ang.d_alpha_dtheta
    du[R, PH] = s_ * ang.sinh_alpha + r * s_ * ang.cosh_alpha * ang.d_alpha_dr
    du[TH, PH] = r * c_ * ang.sinh_alpha + r * s_ * ang.cosh_alpha * ang.d_alpha_dtheta
    ds = np.zeros((4, 4))
    ds[R, R] = -ang.sin_gamma * ang.d_gamma_dr
    ds[TH, R] = -ang.sin_gamma * ang.d_gamma_dtheta
    ds[R, TH] = ang.sin_gamma + r * ang.cos_gamma * ang.d_gamma_dr
    ds[TH, TH] = r * ang.cos_gamma * ang.d_gamma_dtheta
    return du, ds


# -- tensorial connection, tetrads, spin connection --------------------------


def tensorial_connection_at(pt: GridPoint, ang: AngleState):
    """Coordinate components R[nu, rho, mu] = R_{nu rho mu}, antisymmetric
    in the first pair; unlisted independent components are zero."""
    r, th = pt.r, pt.theta
    s_, c_ = np.sin(th), np.cos(th)
    R_ = np.zeros((4, 4, 4))

    def put(n, p, mu, v):
        R_[n, p, mu] = v
        R_[p, n, mu] = -v

    put(TH, PH, PH, -r * r * c_ * s_)
    put(R, PH, PH, -r * s_ * s_)
    put(R, TH, TH, -r * (1.0 + ang.d_gamma_dtheta))
    put(TH, R, R, r * ang.d_gamma_dr)
    put(T, PH, TH, r * s_ * ang.d_alpha_dtheta)
    put(T, PH, R, r * s_ * ang.d_alpha_dr)
    return R_


def tetrad_at(pt: GridPoint, ang: AngleState):
    """Frame vectors xi[a, mu] = xi_a^mu (flat index first)."""
    r, th = pt.r, pt.theta
    xi = np.zeros((4, 4))
    xi[0, T] = ang.cosh_alpha
    xi[2, T] = -ang.sinh_alpha
    xi[1, R] = ang.sin_gamma
    xi[3, R] = -ang.cos_gamma
    xi[1, TH] = -ang.cos_gamma / r
    xi[3, TH] = -ang.sin_gamma / r
    xi[0, PH] = -ang.sinh_alpha / (r * np.sin(th))
    xi[2, PH] = ang.cosh_alpha / (r * np.sin(th))
    return xi


def cotetrad_at(pt: GridPoint, ang: AngleState):
    """Coframe xi[a, mu] = xi^a_mu, dual to tetrad_at and soldering the
    metric: g_{mu nu} = xi^a_mu xi^b_nu eta_ab."""
    r, th = pt.r, pt.theta
    co = np.zeros((4, 4))
    co[0, T] = ang.cosh_alpha
    co[2, T] = ang.sinh_alpha
    co[1, R] = ang.sin_gamma
    co[3, R] = -ang.cos_gamma
    co[1, TH] = -r * ang.cos_gamma
    co[3, TH] = -r * ang.sin_gamma
    co[0, PH] = r * np.sin(th) * ang.sinh_alpha
    co[2, PH] = r * np.sin(th) * ang.cosh_alpha
    return co


def spin_connection_at(pt: GridPoint, ang: AngleState):
    """Spin connection C[a, b, mu] = C_{ab mu} compatible with the tetrad.

    Twelve nonzero components (six independent), antisymmetric in (a, b).
    The trig sums cos/sin(theta + gamma) come from the composition of the
    coordinate rotation with the spin tilt.
    """
    th = pt.theta
    ctg = np.cos(th) * ang.cos_gamma - np.sin(th) * ang.sin_gamma
    stg = np.sin(th) * ang.cos_gamma + np.cos(th) * ang.sin_gamma
    C = np.zeros((4, 4, 4))

    def put(a, b, mu, v):
        C[a, b, mu] = v
        C[b, a, mu] = -v

    put(0, 2, R, -ang.d_alpha_dr)
    put(0, 2, TH, -ang.d_alpha_dtheta)
    put(1, 3, R, -ang.d_gamma_dr)
    put(1, 3, TH, -(1.0 + ang.d_gamma_dtheta))
    put(0, 1, PH, -ctg * ang.sinh_alpha)
    put(0, 3, PH, -stg * ang.sinh_alpha)
    put(2, 3, PH, stg * ang.cosh_alpha)
    put(1, 2, PH, -ctg * ang.cosh_alpha)
    return C


def coordinate_epsilon_lower(pt: GridPoint):
    """eps_{mu nu rho sigma} = sqrt|g| [mu nu rho sigma], [t r theta phi] = +1."""
    return EPS4 * sqrt_abs_g(pt)


@dataclass(frozen=True)
class BackgroundPoint:
    """Everything the field equations need, evaluated at one grid point.

    Bundles the metric data, both frames, both connections and the momentum
    covector; the soldering and duality of the frames and the antisymmetry
    of the tensorial connection are guaranteed by construction and checked
    in the test suite.
    """

    point: GridPoint
    angles: AngleState
    metric: np.ndarray
    christoffel: np.ndarray
    tetrad: np.ndarray
    cotetrad: np.ndarray
    spin_connection: np.ndarray
    tensorial_connection: np.ndarray
    momentum: np.ndarray

    @property
    def alpha(self):
        return self.angles.alpha

    @property
    def gamma(self):
        return self.angles.gamma


def background_at(pt: GridPoint, ang: AngleState, energy, angular_momentum):
    return BackgroundPoint(
        point=pt,
        angles=ang,
        metric=metric_at(pt),
        christoffel=christoffel_at(pt),
        tetrad=tetrad_at(pt, ang),
        cotetrad=cotetrad_at(pt, ang),
        spin_connection=spin_connection_at(pt, ang),
        tensorial_connection=tensorial_connection_at(pt, ang),
        momentum=momentum_covector(energy, angular_momentum),
    )


# -- identity residuals -------------------------------------------------------


def transport_residuals(pt: GridPoint, ang: AngleState):
    """Max violation of nabla_mu v_nu = v^rho R_{rho nu mu} for v in {s, u}.

    Uses analytic first partials only; the identities are exact for the
    parametrized frame, so the result is pure rounding noise.
    """
    lam = christoffel_at(pt)
    ginv = inverse_metric_at(pt)
    R_ = tensorial_connection_at(pt, ang)
    u = velocity_covector(pt, ang)
    s = spin_covector(pt, ang)
    du, ds = velocity_spin_partials(pt, ang)

    def violation(vec, dvec):
        cov = dvec - np.einsum("rnm,r->mn", lam, vec)
        rhs = np.einsum("r,rnm->mn", ginv @ vec, R_)
        return float(np.max(np.abs(cov - rhs)))

    return violation(s, ds), violation(u, du)


def richardson_partials(f, r, theta, step=1e-5, tol_factor=1e-4):
    """Central-difference d/dr and d/dtheta of an array-valued field with one
    Richardson halving; raises StepTooLarge on non-convergence.

    Returns (df_dr, df_dtheta, error_estimate).
    """

    def central(h):
        dr = (np.asarray(f(r + h, theta)) - np.asarray(f(r - h, theta))) / (2 * h)
        dt = (np.asarray(f(r, theta + h)) - np.asarray(f(r, theta - h))) / (2 * h)
        return dr, dt

    dr1, dt1 = central(step)
    dr2, dt2 = central(step / 2)
    df_dr = (4.0 * dr2 - dr1) / 3.0
    df_dt = (4.0 * dt2 - dt1) / 3.0
    est = max(float(np.max(np.abs(dr2 - dr1))), float(np.max(np.abs(dt2 - dt1))))
    scale = 1.0 + max(float(np.max(np.abs(df_dr))), float(np.max(np.abs(df_dt))))
    if est > tol_factor * scale:
        raise StepTooLarge(
            f"finite-difference estimate {est:.3e} did not converge at "
            f"(r={r!r}, theta={theta!r}) with step {step!r}"
        )
    return df_dr, df_dt, est


def curvature_strength_residuals(pt: GridPoint, tensorial_field, momentum,
                                 step=1e-5):
    """Residual norms of the two potential identities on a flat background.

    ``tensorial_field(r, theta)`` must return the coordinate components
    R_{nu rho mu}; its mixed-index curvature

        nabla_mu R^i_{j nu} - nabla_nu R^i_{j mu}
        + R^i_{k mu} R^k_{j nu} - R^i_{k nu} R^k_{j mu}

    must vanish (zero spacetime curvature), as must the curl of the constant
    momentum covector (zero electromagnetic strength).  Derivatives are
    central differences with one Richardson halving.
    """
    r, th = pt.r, pt.theta

    def mixed(rr, tt):
        p = GridPoint(rr, tt)
        return np.einsum("ix,xjn->ijn", inverse_metric_at(p), tensorial_field(rr, tt))

    dR_dr, dR_dth, _ = richardson_partials(mixed, r, th, step=step)
    dR = np.zeros((4, 4, 4, 4))
    dR[R] = dR_dr
    dR[TH] = dR_dth
    Rm = mixed(r, th)
    lam = christoffel_at(pt)
    cov = (
        dR
        + np.einsum("ism,sjn->mijn", lam, Rm)
        - np.einsum("sjm,isn->mijn", lam, Rm)
        - np.einsum("snm,ijs->mijn", lam, Rm)
    )
    curv = (
        np.einsum("mijn->ijmn", cov)
        - np.einsum("nijm->ijmn", cov)
        + np.einsum("ikm,kjn->ijmn", Rm, Rm)
        - np.einsum("ikn,kjm->ijmn", Rm, Rm)
    )
    rie_norm = float(np.max(np.abs(curv)))

    # Strength: the momentum covector is constant, so its curl vanishes
    # identically; differentiate it anyway so that a perturbed P is detected.
    if callable(momentum):
        dP_dr, dP_dth, _ = richardson_partials(
            lambda rr, tt: momentum(rr, tt), r, th, step=step
        )
        dP = np.zeros((4, 4))
        dP[R] = dP_dr
        dP[TH] = dP_dth
    else:
        dP = np.zeros((4, 4))
    far = dP - dP.T
    far_norm = float(np.max(np.abs(far)))
    return rie_norm, far_norm


def tetrad_postulate_residual(pt: GridPoint, cotetrad_field, spin_connection_field,
                              step=1e-5):
    """Max violation of the joint covariant constancy of the coframe.

    d_mu xi^a_nu - Lambda^rho_{nu mu} xi^a_rho + C^a_{b mu} xi^b_nu = 0
    defines the link between the coordinate connection and the spin
    connection; the coframe partials are taken by finite differences.
    """
    r, th = pt.r, pt.theta
    dxi_dr, dxi_dth, _ = richardson_partials(cotetrad_field, r, th, step=step)
    dxi = np.zeros((4, 4, 4))  # [mu, a, nu]
    dxi[R] = dxi_dr
    dxi[TH] = dxi_dth
    co = cotetrad_field(r, th)
    C = spin_connection_field(r, th)
    lam = christoffel_at(pt)
    eta_diag = np.array([1.0, -1.0, -1.0, -1.0])
    c_up = eta_diag[:, None, None] * C  # C^a_{b mu}
    total = (
        dxi
        - np.einsum("rnm,ar->man", lam, co)
        + np.einsum("abm,bn->man", c_up, co)
    )
    return float(np.max(np.abs(total)))
