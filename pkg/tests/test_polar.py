import numpy as np
import pytest

from nldirac import clifford, polar
from nldirac.errors import SingularG, SingularPoint
from nldirac.geometry import GridPoint
from nldirac.polar import (
    G_exact,
    ModelSpec,
    X_exact,
    analytic_derivatives,
    assemble_spinor,
    chiral_components,
    module_general_p,
    module_njl,
    module_soler,
    module_log_derivatives,
    phi2_grid,
    polar_decomposition_residual,
    polar_state,
    r_dX_dr_exact,
    spin_coupling_sign,
)

def random_points(n, seed=2024, r_lo=0.1, r_hi=10.0, ring_margin=0.05):
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        r = float(np.exp(rng.uniform(np.log(r_lo), np.log(r_hi))))
        th = float(rng.uniform(0.3, np.pi - 0.3))
        if abs(2.0 * r - 1.0) < ring_margin:
            continue
        pts.append(GridPoint(r, th))
    return pts


def test_model_spec_defaults_and_validation():
    spec = ModelSpec.njl(m=2.0)
    assert spec.E == 2.0 and spec.l == 0.5 and spec.p == 1.0
    assert ModelSpec.soler().p == 0.0
    assert ModelSpec.interpolating(0.3).p == 0.3
    with pytest.raises(ValueError):
        ModelSpec(m=-1.0)
    with pytest.raises(ValueError):
        ModelSpec(p=1.5)


def test_X_exact_values():
    spec = ModelSpec(m=1.0)
    assert X_exact(0.5, spec) == pytest.approx(0.0, abs=1e-16)
    assert X_exact(1.0, spec) == pytest.approx(0.75)
    spec2 = ModelSpec(m=3.0)
    assert X_exact(1.0 / 6.0, spec2) == pytest.approx(0.0, abs=1e-16)


def test_X_is_sinh_of_log_over_six_decades():
    spec = ModelSpec(m=1.0)
    rs = np.geomspace(0.01, 100.0, 400)
    X = X_exact(rs, spec)
    ref = np.sinh(np.log(2.0 * rs))
    assert np.max(np.abs(X - ref) / np.maximum(np.abs(ref), 1.0)) <= 1e-14
    assert np.allclose(r_dX_dr_exact(rs, spec), np.cosh(np.log(2 * rs)), rtol=1e-14)


def test_G_exact_values_and_singularity():
    spec = ModelSpec(m=1.0)
    assert G_exact(1.0, spec) == pytest.approx(2.0 / 0.5625, rel=1e-14)
    X10 = 0.5 * (20.0 - 1.0 / 20.0)
    assert X10 == pytest.approx(9.975)
    assert G_exact(10.0, spec) == pytest.approx(2.0 / (10.0 * X10**2), rel=1e-14)
    with pytest.raises(SingularG):
        G_exact(0.5, spec)


def test_module_njl_values():
    spec = ModelSpec.njl(m=1.0)
    # regular at the origin: phi^2 -> 8m
    assert module_njl(GridPoint(1e-6, 1.1), spec) == pytest.approx(8.0, rel=1e-10)
    # on the singular ring
    with pytest.raises(SingularPoint):
        module_njl(GridPoint(0.5, np.pi / 2), spec)
    # same radius on the axis stays finite: radicand = 1 + 2 + 1 = 4
    assert phi2_grid("njl", 0.5, 0.0, 1.0) == pytest.approx(4.0, rel=1e-14)
    assert module_njl(GridPoint(0.5, 1e-3), spec) == pytest.approx(4.0, rel=1e-5)


def test_module_soler_values():
    spec = ModelSpec.soler(m=1.0)
    for th in (0.3, 1.2, np.pi / 2):
        with pytest.raises(SingularPoint):
            module_soler(GridPoint(0.5, th), spec)
    assert module_soler(GridPoint(1e-6, 0.7), spec) == pytest.approx(8.0, rel=1e-10)
    r = 100.0
    assert module_soler(GridPoint(r, np.pi / 2), spec) * r * r == pytest.approx(
        2.0, rel=1e-3
    )


def test_module_prefactor_consistency_with_closed_form():
    # the compact 2/(r sqrt(X^2 + cos^2)) form and the explicit radicand form
    # of the chiral density must agree once the exact profile is inserted
    spec = ModelSpec.njl(m=1.0)
    for pt in random_points(100):
        X = X_exact(pt.r, spec)
        compact = 2.0 / (pt.r * np.sqrt(X * X + np.cos(pt.theta) ** 2))
        assert module_njl(pt, spec) == pytest.approx(compact, rel=1e-12)


def test_module_soler_factorizes_through_G():
    spec = ModelSpec.soler(m=1.0)
    for pt in random_points(100):
        X = X_exact(pt.r, spec)
        factored = np.sqrt(X * X + np.cos(pt.theta) ** 2) * G_exact(pt.r, spec)
        assert module_soler(pt, spec) == pytest.approx(factored, rel=1e-12)


def test_general_p_endpoint_agreement():
    m = 1.3
    spec = ModelSpec(m=m, p=0.5)
    for pt in random_points(100, r_lo=0.05 / m, r_hi=20.0 / m):
        if abs(2 * m * pt.r - 1) < 0.05:
            continue
        njl = module_njl(pt, ModelSpec.njl(m=m))
        soler = module_soler(pt, ModelSpec.soler(m=m))
        assert module_general_p(pt, spec, p=1.0) == pytest.approx(njl, rel=1e-12)
        assert module_general_p(pt, spec, p=0.0) == pytest.approx(soler, rel=1e-12)


def test_general_p_singular_on_ring():
    spec = ModelSpec.interpolating(0.5, m=1.0)
    with pytest.raises(SingularPoint):
        module_general_p(GridPoint(0.5, np.pi / 2), spec)
    # off the equator the interpolated density is finite at 2mr = 1
    assert module_general_p(GridPoint(0.5, 1.0), spec) > 0.0


def test_angle_state_refuses_the_ring():
    # the kinematic quotients are 0/0 exactly there; no limit is taken
    spec = ModelSpec.njl()
    with pytest.raises(SingularPoint):
        polar.angle_state(GridPoint(0.5, np.pi / 2), spec)
    assert polar.angle_state(GridPoint(0.5, 1.0), spec).cosh_alpha > 0


def test_module_positivity_and_tail():
    for model, spec in (("njl", ModelSpec.njl()), ("soler", ModelSpec.soler())):
        for pt in random_points(50):
            val = phi2_grid(model, pt.r, pt.theta, spec.m)
            assert val > 0.0
        r2 = float(phi2_grid(model, 100.0, 1.0, spec.m)) * 100.0**2
        assert r2 == pytest.approx(2.0, rel=1e-3)
        r3 = float(phi2_grid(model, 1000.0, 1.0, spec.m)) * 1000.0**2
        assert r3 == pytest.approx(2.0, rel=1e-5)


def test_analytic_derivatives_equatorial_values():
    X = 0.8
    rxp = np.sqrt(X * X + 1.0)  # on-branch relation
    der = analytic_derivatives(X, rxp, np.pi / 2)
    assert der.d_gamma_dtheta == pytest.approx(np.sqrt(X * X + 1.0) / X)
    assert der.r_d_gamma_dr == pytest.approx(0.0, abs=1e-16)


def test_analytic_derivatives_match_finite_differences():
    spec = ModelSpec(m=1.0)
    h = 1e-5
    worst = 0.0
    # scalar-angle differences need a branch-cut-free region: keep X > 0
    for pt in random_points(50, r_lo=0.6, r_hi=10.0):
        X = X_exact(pt.r, spec)
        der = analytic_derivatives(X, r_dX_dr_exact(pt.r, spec), pt.theta)

        def gamma(r, th):
            sa, ca, sg, cg = polar.geometry.velocity_spin_components(
                X_exact(r, spec), th
            )
            return np.arctan2(sg, cg)

        def alpha(r, th):
            sa, *_ = polar.geometry.velocity_spin_components(X_exact(r, spec), th)
            return np.arcsinh(sa)

        def beta(r, th):
            sb, cb = chiral_components(X_exact(r, spec), th)
            return np.arctan2(sb, cb)

        for fn, dth, rdr in (
            (gamma, der.d_gamma_dtheta, der.r_d_gamma_dr),
            (alpha, der.d_alpha_dtheta, der.r_d_alpha_dr),
            (beta, der.d_beta_dtheta, der.r_d_beta_dr),
        ):
            fd_th = (fn(pt.r, pt.theta + h) - fn(pt.r, pt.theta - h)) / (2 * h)
            fd_r = (fn(pt.r + h, pt.theta) - fn(pt.r - h, pt.theta)) / (2 * h)
            worst = max(worst, abs(fd_th - dth), abs(pt.r * fd_r - rdr))
    assert worst <= 1e-6


def test_derivative_component_identity_across_sign_change():
    # d_theta sin(beta) = cos(beta) d_theta beta holds on both sides of X = 0
    spec = ModelSpec(m=1.0)
    h = 1e-6
    for pt in random_points(30, r_lo=0.1, r_hi=10.0):
        X = X_exact(pt.r, spec)
        der = analytic_derivatives(X, r_dX_dr_exact(pt.r, spec), pt.theta)
        sb_p, _ = chiral_components(X, pt.theta + h)
        sb_m, _ = chiral_components(X, pt.theta - h)
        _, cb = chiral_components(X, pt.theta)
        assert (sb_p - sb_m) / (2 * h) == pytest.approx(
            cb * der.d_beta_dtheta, abs=1e-6
        )


def test_polar_state_invariants():
    spec = ModelSpec.njl()
    for pt in random_points(30):
        st = polar_state(pt, spec)
        assert st.X == pytest.approx(np.sinh(st.zeta), abs=1e-12)
        assert st.sin_beta**2 + st.cos_beta**2 == pytest.approx(1.0, abs=1e-12)
        assert st.phi2 > 0.0


def test_assembled_spinor_rest_frame_bilinears():
    spec = ModelSpec(m=1.0)
    pt = GridPoint(1.0, np.pi / 2)  # beta = 0 here
    psi = assemble_spinor(pt, spec, phi2=1.0)
    bl = clifford.bilinears(psi)
    assert bl.phi == pytest.approx(2.0, rel=1e-14)
    assert bl.theta == pytest.approx(0.0, abs=1e-14)


def test_assembled_spinor_chiral_ratio():
    spec = ModelSpec.njl(m=1.0)
    pt = GridPoint(1.0, np.pi / 4)
    psi = assemble_spinor(pt, spec)
    bl = clifford.bilinears(psi)
    X = X_exact(pt.r, spec)
    assert bl.theta / bl.phi == pytest.approx(-np.cos(pt.theta) / X, rel=1e-12)
    sb, cb = chiral_components(X, pt.theta)
    phi2 = module_njl(pt, spec)
    assert bl.theta == pytest.approx(2 * phi2 * sb, rel=1e-10)
    assert bl.phi == pytest.approx(2 * phi2 * cb, rel=1e-10)


def test_assembled_spinor_vector_bilinears():
    # frame components: the assembled spinor is at rest with spin up, so
    # U^a = 2 phi^2 (1,0,0,0) and S^a = 2 phi^2 (0,0,0,1); the coordinate
    # versions follow by contracting with the frame vectors
    from nldirac import geometry

    spec = ModelSpec.njl(m=1.0)
    for pt in random_points(20, seed=77):
        phi2 = module_njl(pt, spec)
        bl = clifford.bilinears(assemble_spinor(pt, spec))
        assert np.allclose(bl.U, [2 * phi2, 0, 0, 0], rtol=1e-10, atol=1e-10)
        assert np.allclose(bl.S, [0, 0, 0, 2 * phi2], rtol=1e-10, atol=1e-10)
        ang = polar.angle_state(pt, spec)
        xi = geometry.tetrad_at(pt, ang)
        ginv = geometry.inverse_metric_at(pt)
        u_up = np.einsum("am,a->m", xi, bl.U) / (2 * phi2)
        s_up = np.einsum("am,a->m", xi, bl.S) / (2 * phi2)
        assert np.allclose(u_up, ginv @ geometry.velocity_covector(pt, ang),
                           atol=1e-10)
        assert np.allclose(s_up, ginv @ geometry.spin_covector(pt, ang),
                           atol=1e-10)


def test_assembled_spinor_time_phase_invariance():
    spec = ModelSpec.njl(m=1.0)
    pt = GridPoint(0.8, 1.0)
    a = clifford.bilinears(assemble_spinor(pt, spec, t=0.0))
    b = clifford.bilinears(assemble_spinor(pt, spec, t=1.3, azimuth=0.4))
    assert a.phi == pytest.approx(b.phi, rel=1e-12)
    assert a.theta == pytest.approx(b.theta, abs=1e-12)


def test_spin_coupling_sign_is_calibrated_positive():
    assert spin_coupling_sign() == 1.0


def test_polar_decomposition_residual_exact_solutions():
    for spec in (ModelSpec.njl(), ModelSpec.soler()):
        worst = max(
            polar_decomposition_residual(pt, spec)
            for pt in random_points(20)
        )
        assert worst <= 1e-8


def test_polar_decomposition_residual_fd_mode():
    spec = ModelSpec.njl()
    res = polar_decomposition_residual(GridPoint(1.0, np.pi / 3), spec, mode="fd")
    assert res <= 1e-8


def test_fd_mode_fails_loudly_at_chiral_branch_cut():
    # inside 2mr = 1 the principal chiral rotation flips the spinor's sign
    # across the equator; the finite-difference path must refuse rather than
    # differentiate through the jump, while the analytic path is exact
    from nldirac.errors import StepTooLarge

    spec = ModelSpec.njl()
    pt = GridPoint(0.3, np.pi / 2)
    with pytest.raises(StepTooLarge):
        polar_decomposition_residual(pt, spec, mode="fd")
    assert polar_decomposition_residual(pt, spec, mode="analytic") <= 1e-10


def test_polar_decomposition_momentum_sensitivity():
    spec = ModelSpec.njl()
    res = polar_decomposition_residual(
        GridPoint(1.0, np.pi / 3), spec,
        momentum_override=[spec.E, 0.0, 0.0, 0.6],
    )
    assert res >= 1e-3


def test_module_log_derivatives_match_finite_differences():
    h = 1e-6
    for p in (0.0, 0.5, 1.0):
        spec = ModelSpec(m=1.0, p=p)
        for pt in random_points(20):
            r_dr, d_th = module_log_derivatives(pt, spec)
            f = lambda r, th: np.log(phi2_grid(p, r, th, 1.0))
            fd_r = pt.r * (f(pt.r + h, pt.theta) - f(pt.r - h, pt.theta)) / (2 * h)
            fd_t = (f(pt.r, pt.theta + h) - f(pt.r, pt.theta - h)) / (2 * h)
            assert r_dr == pytest.approx(fd_r, abs=2e-5)
            assert d_th == pytest.approx(fd_t, abs=2e-5)
