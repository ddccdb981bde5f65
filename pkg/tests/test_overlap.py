"""Four-mode overlap areas and nonlinear coefficients."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import c, epsilon_0

from topdc.errors import DisjointModes, GridMismatch, NonPositiveOverlap
from topdc.modes import field_grid_from_profile
from topdc.overlap import (
    OverlapSet,
    effective_area_4mode,
    effective_area_spm,
    effective_area_xpm,
    gamma_squared_seeded,
    gamma_squared_spontaneous,
    kerr_gamma_cross,
    kerr_gamma_self,
    nonlinear_mismatch,
)


def gaussian(w, x0=0.0, y0=0.0):
    return field_grid_from_profile(
        lambda x, y: np.exp(-((x - x0) ** 2 + (y - y0) ** 2) / w**2),
        extent=8e-6, n_points=256)


def flat_top(radius):
    return field_grid_from_profile(
        lambda x, y: 1.0 * (x**2 + y**2 <= radius**2),
        extent=8e-6, n_points=512)


def test_flat_top_area():
    """All four fields a uniform disc: every area equals the disc area."""
    g = flat_top(3e-6)
    area = np.pi * (3e-6) ** 2
    assert effective_area_4mode(g, g, g, g) == pytest.approx(area, rel=2e-2)
    assert effective_area_spm(g) == pytest.approx(area, rel=2e-2)
    assert effective_area_xpm(g, g) == pytest.approx(area, rel=2e-2)


def test_gaussian_area_oracle():
    """For a Gaussian with 1/e^2 intensity radius w the self-phase area is
    pi w^2; the four-fold overlap of identical Gaussians matches it."""
    w_field = 2e-6  # 1/e field radius used in the profile
    g = gaussian(w_field)
    # intensity ~ exp(-2 r^2 / w_field^2) -> 1/e^2 radius = w_field
    expected = np.pi * w_field**2
    assert effective_area_spm(g) == pytest.approx(expected, rel=1e-3)
    assert effective_area_4mode(g, g, g, g) == pytest.approx(expected,
                                                             rel=1e-3)


def test_4mode_reduces_to_spm():
    g = gaussian(1.5e-6)
    assert effective_area_4mode(g, g, g, g) == pytest.approx(
        effective_area_spm(g), rel=1e-12)


def test_translation_invariance():
    a0 = effective_area_spm(gaussian(1.5e-6))
    a1 = effective_area_spm(gaussian(1.5e-6, x0=0.5e-6, y0=-0.3e-6))
    assert a1 == pytest.approx(a0, rel=1e-6)


def test_disjoint_modes():
    left = field_grid_from_profile(
        lambda x, y: np.exp(-((x + 5e-6) ** 2 + y**2) / 0.25e-12),
        extent=8e-6, n_points=256)
    right = field_grid_from_profile(
        lambda x, y: np.exp(-((x - 5e-6) ** 2 + y**2) / 0.25e-12),
        extent=8e-6, n_points=256)
    with pytest.raises(DisjointModes):
        effective_area_4mode(left, right, left, right)


def test_negative_overlap_guard():
    g = gaussian(2e-6)
    odd = field_grid_from_profile(
        lambda x, y: x * np.exp(-(x**2 + y**2) / 4e-12),
        extent=8e-6, n_points=256)
    with pytest.raises(NonPositiveOverlap):
        effective_area_4mode(g, odd, g, g)
    area = effective_area_4mode(g, odd, g, g, allow_sign_flip=True)
    assert area > 0


def test_grid_mismatch():
    a = gaussian(2e-6)
    b = field_grid_from_profile(
        lambda x, y: np.exp(-(x**2 + y**2) / 4e-12),
        extent=8e-6, n_points=128)
    with pytest.raises(GridMismatch):
        effective_area_4mode(a, b, a, a)
    with pytest.raises(GridMismatch):
        effective_area_xpm(a, b)


def test_overlap_set_sources():
    g = gaussian(2e-6)
    computed = OverlapSet.from_fields(g, [g, g, g])
    assert computed.source == "computed"
    assert computed.a_eff_4mode == pytest.approx(computed.a_eff_spm,
                                                 rel=1e-12)
    supplied = OverlapSet.supplied(1e-12)
    assert supplied.source == "supplied"
    assert supplied.a_eff_xpm == (1e-12, 1e-12, 1e-12)


@given(
    chi3=st.floats(1e-25, 1e-20),
    omega_p=st.floats(1e15, 5e15),
    n=st.floats(1.0, 2.5),
    a_eff=st.floats(1e-13, 1e-9),
)
@settings(max_examples=200, deadline=None)
def test_gamma_squared_dimension_factoring(chi3, omega_p, n, a_eff):
    """gamma^2 * A^2 n^4 / (chi^2 omega_p^2) is the universal constant
    9 / (eps0^2 c^4) regardless of inputs."""
    g2 = gamma_squared_spontaneous(chi3, omega_p, n, n, n, n, a_eff)
    combo = g2 * a_eff**2 * n**4 / (chi3**2 * omega_p**2)
    assert combo == pytest.approx(9.0 / (epsilon_0**2 * c**4), rel=1e-12)


def test_gamma_squared_seeded_uses_reduced_pump():
    chi3, a_eff, n = 1e-22, 1e-11, 1.5
    omega_p, omega_s = 3e15, 1e15
    g2 = gamma_squared_seeded(chi3, omega_p, omega_s, n, n, n, n, a_eff)
    ref = gamma_squared_spontaneous(chi3, omega_p - omega_s, n, n, n, n,
                                    a_eff)
    assert g2 == pytest.approx(ref, rel=1e-12)


def test_kerr_gammas_and_mismatch():
    chi3, n, a = 2.5e-22, 1.46, 1e-11
    omega_p = 2 * np.pi * c / 532e-9
    gp = kerr_gamma_self(chi3, omega_p, n, a)
    assert gp == pytest.approx(3 * chi3 * omega_p / (4 * epsilon_0 * c**2
                                                     * n**2 * a), rel=1e-12)
    gpn = kerr_gamma_cross(chi3, omega_p / 3, n, n, a)
    assert gpn == pytest.approx(gp / 3, rel=1e-12)
    # self-term only, unit power: mismatch is just gamma_p
    assert nonlinear_mismatch(gp, [], 1.0) == pytest.approx(gp)
    assert nonlinear_mismatch(gp, [gpn, gpn, gpn], 2.0) == pytest.approx(
        2.0 * (gp - 2 * 3 * gpn))
    assert nonlinear_mismatch(gp, [gpn], 0.0) == 0.0
