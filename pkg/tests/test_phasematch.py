"""Phase-matching function, mismatch bookkeeping, and root finding."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import c

from topdc.errors import NoRoot
from topdc.materials import load_materials
from topdc.phasematch import (
    PhaseMatchProblem,
    PhaseMatchScan,
    delta_beta,
    find_phase_match,
    is_degenerate_triple,
    phase_matching_function,
    phase_matching_intensity,
)
from conftest import linear_mode


def test_phase_matching_function_values():
    L = 0.1
    assert abs(phase_matching_function(0.0, L)) == pytest.approx(L)
    # first zero at delta_beta = 2 pi / L
    assert abs(phase_matching_function(2 * np.pi / L, L)) < 1e-12 * L
    # half-argument pi/2: |f| = L sinc(pi/2) = 2 L / pi
    assert abs(phase_matching_function(np.pi / L, L)) == pytest.approx(
        2 * L / np.pi, rel=1e-12)
    assert phase_matching_intensity(0.0, L) == pytest.approx(L**2)


@given(db=st.floats(-1e4, 1e4), scale=st.floats(0.1, 10.0))
@settings(max_examples=200, deadline=None)
def test_intensity_depends_on_product_only(db, scale):
    """|f|^2 normalised by L^2 is a function of delta_beta * L alone."""
    L = 0.05
    a = phase_matching_intensity(db, L) / L**2
    b = phase_matching_intensity(db / scale, L * scale) / (L * scale) ** 2
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


def _vacuum_problem(pump_frequency=3e15, beta_nl=0.0):
    pump = linear_mode("HE11", omega_lo=1e14, omega_hi=6e15)
    trip = linear_mode("HE11", omega_lo=1e13, omega_hi=6e15)
    return PhaseMatchProblem(pump_mode=pump, mode1=trip, mode2=trip,
                             mode3=trip, pump_frequency=pump_frequency,
                             beta_nl=beta_nl)


def test_delta_beta_vacuum_closes():
    p = _vacuum_problem()
    w1, w2 = 1.2e15, 0.9e15
    w3 = p.pump_frequency - w1 - w2
    assert delta_beta(p, w1, w2, w3) == pytest.approx(0.0, abs=1e-7)


def test_delta_beta_nonlinear_shift_additive():
    p0 = _vacuum_problem()
    p1 = _vacuum_problem(beta_nl=10.0)
    w1, w2 = 1.2e15, 0.9e15
    w3 = p0.pump_frequency - w1 - w2
    shift = delta_beta(p1, w1, w2, w3) - delta_beta(p0, w1, w2, w3)
    assert shift == pytest.approx(-10.0, rel=1e-12)


def test_pump_coverage_validated():
    pump = linear_mode("HE11", omega_lo=1e14, omega_hi=2e15)
    trip = linear_mode("HE11", omega_lo=1e13, omega_hi=6e15)
    with pytest.raises(ValueError):
        PhaseMatchProblem(pump_mode=pump, mode1=trip, mode2=trip,
                          mode3=trip, pump_frequency=3e15)


def test_degenerate_interval_collapses_to_one_root():
    """A mismatch that is identically zero across the scan yields exactly
    one solution flagged as a degenerate interval."""
    scan = PhaseMatchScan(scan_parameter="pressure", lower=1.0, upper=2.0,
                          mismatch_at=lambda p: 0.0)
    sols = find_phase_match(scan)
    assert len(sols) == 1
    assert sols[0].degenerate_interval


def test_roots_re_evaluate_small():
    scan = PhaseMatchScan(scan_parameter="diameter", lower=0.0, upper=10.0,
                          mismatch_at=lambda x: np.cos(x))
    sols = find_phase_match(scan, tolerance=1e-6)
    assert len(sols) == 3  # pi/2, 3pi/2, 5pi/2
    for s in sols:
        assert abs(np.cos(s.parameter_value)) < 1e-6
        assert np.sign(s.slope) == np.sign(-np.sin(s.parameter_value))


def test_root_count_stable_under_refinement():
    f = lambda x: np.sin(5 * x) + 0.1
    a = find_phase_match(PhaseMatchScan("none", 0.0, 6.0, f), n_points=400)
    b = find_phase_match(PhaseMatchScan("none", 0.0, 6.0, f), n_points=799)
    assert len(a) == len(b)
    for sa, sb in zip(a, b):
        assert sa.parameter_value == pytest.approx(sb.parameter_value,
                                                   abs=1e-9)


def test_invalid_scan_range():
    with pytest.raises(NoRoot):
        PhaseMatchScan("pressure", 2.0, 1.0, lambda p: p)


def test_is_degenerate_triple():
    w = 1e15
    assert is_degenerate_triple(w, w, w)
    assert not is_degenerate_triple(w, w, 1.2 * w)


@pytest.fixture(scope="module")
def db():
    return load_materials()


def test_taper_diameter_root_near_790nm(db):
    from topdc.platforms import taper_diameter_scan
    scan = taper_diameter_scan(700e-9, 900e-9, 532e-9, db)
    sols = find_phase_match(scan, n_points=200)
    assert len(sols) == 1
    assert sols[0].parameter_value == pytest.approx(790e-9, abs=10e-9)


def test_hollow_pressure_roots_in_window(db):
    from topdc.modes import ModeLabel
    from topdc.platforms import hollow_pressure_scan
    scan = hollow_pressure_scan(
        19.35e-6, db.gas("xenon"), 293.15, 1e5, 15e5, 532e-9,
        pump_label=ModeLabel("HE", 1, 3))
    sols = find_phase_match(scan, n_points=200)
    assert len(sols) == 1
    assert 5.7e5 < sols[0].parameter_value < 11.7e5
