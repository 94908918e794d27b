import numpy as np
import pytest

from nldirac import ode
from nldirac.errors import DivergingState, StepUnderflow
from nldirac.ode import (
    IntegratorConfig,
    OdeState,
    departure_norms,
    exact_rhs,
    exact_state,
    generic_el_components,
    integrate,
    post_separation_components,
    quantum_number_scan,
    soler_rhs,
    tracking_deviation,
    trajectory_to_csv,
)
from nldirac.polar import ModelSpec

SPEC = ModelSpec.soler(m=1.0)


def test_rhs_matches_closed_form_derivatives():
    for r in np.geomspace(0.6, 20.0, 100):
        st = exact_state(r, SPEC)
        dX, dG = soler_rhs(r, [st.X, st.G], SPEC)
        eX, eG = exact_rhs(r, SPEC)
        assert dX == pytest.approx(eX, rel=1e-10, abs=1e-10)
        assert dG == pytest.approx(eG, rel=1e-10, abs=1e-10)
    # the lower branch too
    for r in np.geomspace(0.05, 0.45, 50):
        st = exact_state(r, SPEC)
        dX, dG = soler_rhs(r, [st.X, st.G], SPEC)
        eX, eG = exact_rhs(r, SPEC)
        assert dX == pytest.approx(eX, rel=1e-10)
        assert dG == pytest.approx(eG, rel=1e-10)


def test_rhs_G_zero_is_invariant():
    for r in (0.2, 1.0, 5.0):
        _, dG = soler_rhs(r, [0.7, 0.0], SPEC)
        assert dG == 0.0


def test_rhs_direct_substitution():
    dX, dG = soler_rhs(1.0, [0.0, 1.0], SPEC)
    # bracket: 2*1*1*1 - 0 - 2 + 0 = 0
    assert dX == pytest.approx(0.0, abs=1e-16)
    assert dG == pytest.approx(0.0, abs=1e-16)


def test_exact_branch_tracking_forward():
    cfg = IntegratorConfig(r_span=(1.0, 10.0), rtol=1e-9, atol=1e-12)
    traj = integrate(cfg, exact_state(1.0, SPEC), SPEC)
    dev = tracking_deviation(traj, SPEC)
    assert dev["max_rel"] <= 1e-6


def test_exact_branch_tracking_reverse_within_segment():
    # the outer segment ends at 2mr = 1; reverse integration stays inside it
    cfg = IntegratorConfig(r_span=(1.0, 0.55), rtol=1e-9, atol=1e-12)
    traj = integrate(cfg, exact_state(1.0, SPEC), SPEC)
    assert tracking_deviation(traj, SPEC)["max_rel"] <= 1e-6


def test_span_straddling_singular_radius_is_rejected():
    cfg = IntegratorConfig(r_span=(0.3, 1.0), rtol=1e-9, atol=1e-12)
    with pytest.raises(ValueError, match="split"):
        integrate(cfg, exact_state(0.3, SPEC), SPEC)


def test_perturbed_data_departs_from_closed_form():
    cfg = IntegratorConfig(r_span=(1.0, 10.0), rtol=1e-9, atol=1e-12)
    st = exact_state(1.0, SPEC)
    traj = integrate(cfg, OdeState(r=1.0, X=st.X + 1e-3, G=st.G), SPEC)
    rs, dist = departure_norms(traj, SPEC)
    assert dist[0] == pytest.approx(1e-3, rel=1e-2)
    assert dist[-1] > 10 * dist[0]  # departure grows; no uniqueness here


def test_divergence_guard_near_singular_radius():
    cfg = IntegratorConfig(r_span=(1.0, 0.5000001), rtol=1e-9, atol=1e-12)
    with pytest.raises(DivergingState) as err:
        integrate(cfg, exact_state(1.0, SPEC), SPEC)
    assert err.value.r_last > 0.5


def test_step_underflow_when_guard_is_lifted(monkeypatch):
    # with the overflow guard out of reach, driving the integration to within
    # float spacing of 2mr = 1 collapses the adaptive step instead
    monkeypatch.setattr(ode, "OVERFLOW_GUARD", 1e30)
    cfg = IntegratorConfig(r_span=(1.0, 0.5 + 5e-16), rtol=1e-9, atol=1e-12)
    with pytest.raises((StepUnderflow, DivergingState)):
        integrate(cfg, exact_state(1.0, SPEC), SPEC)


def test_observed_convergence_order():
    # cap the step and loosen tolerances so the solver marches uniformly;
    # halving the cap must shrink the tracking error at 4th/5th order
    errs = []
    for h in (0.1, 0.05, 0.025):
        cfg = IntegratorConfig(r_span=(1.0, 4.0), rtol=1e-2, atol=1e-2,
                               max_step=h)
        traj = integrate(cfg, exact_state(1.0, SPEC), SPEC)
        errs.append(tracking_deviation(traj, SPEC)["max_rel"])
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 3.5


def test_trajectory_csv_columns(tmp_path):
    cfg = IntegratorConfig(r_span=(1.0, 2.0), rtol=1e-9, atol=1e-12)
    traj = integrate(cfg, exact_state(1.0, SPEC), SPEC)
    path = tmp_path / "traj.csv"
    trajectory_to_csv(traj, SPEC, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,X,G,X_exact,G_exact,dev_X,dev_G"
    assert len(lines) == traj.r.size + 1
    first = lines[1].split(",")
    assert float(first[0]) == pytest.approx(1.0)
    assert float(first[5]) <= 1e-12  # starts on the closed form


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(r_span=(1.0, 2.0), rtol=-1.0)


# -- quantum-number scan -------------------------------------------------------


def test_scan_unique_zero_cell():
    result = quantum_number_scan(SPEC)
    assert result.zero_cells(tol=1e-10) == [(1.0, 0.5)]
    assert result.best_cell() == (1.0, 0.5)
    # every neighbouring cell is far from zero
    i0 = int(np.argmin(np.abs(result.e_over_m - 1.0)))
    j0 = int(np.argmin(np.abs(result.l_values - 0.5)))
    for di, dj in ((0, 1), (1, 0), (0, -1), (-1, 0), (1, 1), (-1, -1)):
        assert result.surface[i0 + di, j0 + dj] >= 1e-3


def test_scan_separation_residual_at_wrong_l():
    comp = generic_el_components(1.0, np.pi / 3, 1.0, 0.6, SPEC)
    assert abs(comp["separation"]) >= 1e-2
    exact = generic_el_components(1.0, np.pi / 3, 1.0, 0.5, SPEC)
    assert max(abs(v) for v in exact.values()) <= 1e-10


def test_post_separation_system():
    # on-branch: the second equation holds for any E, the third fixes E = m
    good = post_separation_components(1.0, 1.0, SPEC)
    assert max(abs(v) for v in good.values()) <= 1e-12
    off = post_separation_components(1.0, 1.2, SPEC)
    assert abs(off["second"]) <= 1e-12
    assert abs(off["third"]) >= 1e-2
    assert abs(off["first"]) >= 1e-2
