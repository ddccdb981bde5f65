"""Taper adiabaticity criterion, beat periods, and splice overlaps."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.constants import c

from topdc.errors import DegenerateModes, GridMismatch, ParseError, ProfileTooShort
from topdc.materials import load_materials
from topdc.modes import HE11, HE12, ModeLabel
from topdc.taper import (
    TaperProfile,
    adiabatic_limit,
    beat_period,
    check_profile,
    launch_overlap,
    read_profile,
)
from topdc.platforms import cladding_beta_pair, fiber_mode


SMF28_BEAT_532 = 211.3e-6  # frozen: HE11/HE12 beat in a 125 um silica rod


@pytest.fixture(scope="module")
def db():
    return load_materials()


# --- adiabatic limit ---


def test_adiabatic_limit_values():
    assert adiabatic_limit(1e-6, 1.0e7, 1.0e7) == 0.0
    # rho |dbeta| / 2 pi with rho=1 um, dbeta=2 pi x 1e5 -> 0.1 rad
    assert adiabatic_limit(1e-6, 2 * np.pi * 1e5, 0.0) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        adiabatic_limit(0.0, 1.0, 2.0)


@given(rho=st.floats(1e-7, 1e-4), b1=st.floats(1e5, 1e7),
       b2=st.floats(1e5, 1e7), scale=st.floats(0.1, 10.0))
@settings(max_examples=200, deadline=None)
def test_adiabatic_limit_symmetry_and_scaling(rho, b1, b2, scale):
    lim = adiabatic_limit(rho, b1, b2)
    assert lim == adiabatic_limit(rho, b2, b1)
    assert adiabatic_limit(scale * rho, b1, b2) == pytest.approx(
        scale * lim, rel=1e-12)


# --- profile checking ---


def linear_profile(r0, r1, length, n=41):
    z = np.linspace(0.0, length, n)
    return TaperProfile(z=z, radius=np.linspace(r0, r1, n))


def test_profile_validation():
    with pytest.raises(ProfileTooShort):
        TaperProfile(z=np.array([0.0, 1.0]), radius=np.array([1e-6, 1e-6]))
    from topdc.errors import MonotonicityError
    with pytest.raises(MonotonicityError):
        TaperProfile(z=np.array([0.0, 0.0, 1.0]),
                     radius=np.array([3e-6, 2e-6, 1e-6]))
    with pytest.raises(ValueError):
        TaperProfile(z=np.array([0.0, 0.5, 1.0]),
                     radius=np.array([3e-6, -1e-6, 1e-6]))
    with pytest.raises(MonotonicityError):
        TaperProfile(z=np.array([0.0, 0.4, 0.5, 1.0]),
                     radius=np.array([3e-6, 1e-6, 2e-6, 1.5e-6]))


def test_shallow_taper_passes():
    # beta difference ~ 1e5 1/m at um radii -> limit ~ r * 1e5 / 2 pi
    pair = {"toy": lambda r: (1.0e7, 1.0e7 + 1e5)}
    profile = linear_profile(60e-6, 0.4e-6, 0.2)  # angle ~ 3e-4 rad
    report = check_profile(profile, pair)
    # limit at the waist: 0.4e-6 * 1e5 / 2 pi ~ 6.4e-3 > 3e-4
    assert report.passed
    assert report.worst_margin > 1.0


def test_steep_taper_fails():
    pair = {"toy": lambda r: (1.0e7, 1.0e7 + 1e5)}
    profile = linear_profile(60e-6, 0.4e-6, 2e-3)  # angle ~ 3e-2 rad
    report = check_profile(profile, pair)
    assert not report.passed
    assert report.worst_margin < 1.0


def test_tangent_profile_fails_strictly():
    """Angle exactly equal to the limit everywhere must not pass."""
    r0, length = 60e-6, 0.1
    slope = (r0 - 0.4e-6) / length
    # dbeta(r) = 2 pi slope / r makes the limit equal the linear-profile
    # angle at every sample; the criterion is strict, so this must fail
    pair = {"toy": lambda r: (1.0e7, 1.0e7 + 2 * np.pi * slope / r)}
    report = check_profile(linear_profile(r0, 0.4e-6, length, n=101), pair)
    assert report.worst_margin == pytest.approx(1.0, rel=1e-9)
    assert not report.passed


def test_half_length_doubles_angles():
    pair = {"toy": lambda r: (1.0e7, 1.0e7 + 1e5)}
    full = check_profile(linear_profile(60e-6, 0.4e-6, 0.2), pair)
    half = check_profile(linear_profile(60e-6, 0.4e-6, 0.1), pair)
    assert np.allclose(half.angle_actual, 2 * full.angle_actual, rtol=1e-9)
    assert half.worst_margin == pytest.approx(full.worst_margin / 2,
                                              rel=1e-9)


def test_cutoff_pairs_drop_out():
    def pair_fn(r):
        return None if r < 1e-6 else (1.0e7, 1.0e7 + 1e5)

    profile = linear_profile(60e-6, 0.4e-6, 0.2)
    report = check_profile(profile, {"toy": pair_fn})
    lim = report.limits["toy"]
    assert np.isnan(lim[profile.radius < 1e-6]).all()
    assert np.isfinite(lim[profile.radius >= 1e-6]).all()
    assert report.passed


def test_read_profile_errors(tmp_path):
    p = tmp_path / "short.csv"
    p.write_text("z_m,radius_m\n0.0,1e-6\n1.0,0.5e-6\n")
    with pytest.raises(ProfileTooShort):
        read_profile(p)
    p2 = tmp_path / "bad.csv"
    p2.write_text("z_m,radius_m\n0.0,1e-6\nfoo\n0.2,0.5e-6\n")
    with pytest.raises(ParseError):
        read_profile(p2)


# --- beat periods ---


def test_beat_period_against_frozen_value(db):
    a = fiber_mode("smf28", 532e-9, HE11, db, with_field=False)
    b = fiber_mode("smf28", 532e-9, HE12, db, with_field=False)
    omega = 2 * np.pi * c / 532e-9
    period = beat_period(a, b, omega)
    assert period == pytest.approx(SMF28_BEAT_532, rel=1e-3)
    assert period == pytest.approx(230e-6, rel=0.15)
    assert beat_period(b, a, omega) == period


def test_beat_period_unit_mismatch():
    from conftest import linear_mode
    a = linear_mode(intercept=0.0)
    b = linear_mode(intercept=2 * np.pi)  # dbeta = 2 pi -> period 1 m
    assert beat_period(a, b, 1e15) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(DegenerateModes):
        beat_period(a, a, 1e15)


# --- launch overlap ---


def test_launch_overlap_identity_and_orthogonality(db):
    he11 = fiber_mode("smf28", 532e-9, HE11, db)
    he12 = fiber_mode("smf28", 532e-9, HE12, db)
    assert launch_overlap(he11, he11) == pytest.approx(1.0, abs=1e-12)
    assert launch_overlap(he11, he12) < 1e-6


def test_launch_overlap_cross_fiber(db):
    """460HP HE11 light entering SMF28: mostly HE11, a little HE12."""
    extent = 15e-6  # common grid so overlaps across fibers are defined
    src = fiber_mode("460hp", 532e-9, HE11, db, field_extent=extent)
    same = launch_overlap(src, fiber_mode("smf28", 532e-9, HE11, db,
                                          field_extent=extent))
    cross = launch_overlap(src, fiber_mode("smf28", 532e-9, HE12, db,
                                           field_extent=extent))
    assert same > 0.5
    assert 0.0 < cross < same


def test_launch_overlap_grid_mismatch(db):
    from topdc.modes import field_grid_from_profile
    a = field_grid_from_profile(lambda x, y: np.exp(-(x**2 + y**2) / 1e-12),
                                extent=5e-6, n_points=64)
    b = field_grid_from_profile(lambda x, y: np.exp(-(x**2 + y**2) / 1e-12),
                                extent=5e-6, n_points=32)
    with pytest.raises(GridMismatch):
        launch_overlap(a, b)


# --- full-stack profile check on cladding-guided modes ---


def test_cladding_pair_check(db):
    """A very long linear taper of a 125 um fiber passes the criterion for
    the pump-wavelength HE11/HE12 pair; a mm-scale one fails."""
    pair = {"HE11-HE12@532nm": cladding_beta_pair(HE11, HE12, 532e-9, db)}
    slow = check_profile(linear_profile(62.5e-6, 0.395e-6, 0.2, n=31), pair)
    fast = check_profile(linear_profile(62.5e-6, 0.395e-6, 2e-4, n=31), pair)
    assert slow.passed
    assert not fast.passed
