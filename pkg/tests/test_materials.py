"""Material database: Sellmeier fits, gas refractivity, chi3 scaling."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from topdc.errors import OutOfRange, UnknownSpecies
from topdc.materials import (
    GAS_REF_PRESSURE,
    GasState,
    MaterialModel,
    VACUUM,
    effective_chi3,
    gas_index,
    load_materials,
    solid_index,
)


@pytest.fixture(scope="module")
def db():
    return load_materials()


# frozen oracle values: independent single-line evaluations of the
# published fits, computed before the implementation
SILICA_ORACLE = {
    0.532e-6: 1.460706345,
    1.0e-6: 1.450417409,
    1.596e-6: 1.443467789,
    1.5806e-6: 1.443654927,
}
XENON_REFRACTIVITY_532 = 6.498272e-4  # n - 1 at 1 bar, 293.15 K


def test_silica_sellmeier_matches_oracle(db):
    silica = db.solid("silica")
    for lam, n_ref in SILICA_ORACLE.items():
        assert solid_index(silica, lam) == pytest.approx(n_ref, abs=1e-8)


def test_empty_sellmeier_gives_unity():
    mat = MaterialModel(name="toy", sellmeier_coefficients=(),
                        valid_range=(0.1e-6, 10e-6), chi3=0.0, citation="")
    assert solid_index(mat, 1e-6) == 1.0


def test_out_of_range_raises(db):
    with pytest.raises(OutOfRange):
        solid_index(db.solid("silica"), 20e-6)


def test_solid_index_smooth_on_validity_scan(db):
    silica = db.solid("silica")
    lo, hi = silica.valid_range
    lams = np.linspace(lo * 1.001, hi * 0.999, 1000)
    n = np.array([solid_index(silica, lam) for lam in lams])
    assert np.all(n > 1)
    deriv = np.gradient(n, lams)
    assert np.all(np.isfinite(deriv))


def test_xenon_refractivity_oracle(db):
    state = GasState(species=db.gas("xenon"), pressure=1e5,
                     temperature=293.15)
    assert gas_index(state, 0.532e-6) - 1 == pytest.approx(
        XENON_REFRACTIVITY_532, rel=1e-6)


def test_vacuum_limit(db):
    state = GasState(species=db.gas("xenon"), pressure=0.0,
                     temperature=293.15)
    assert gas_index(state, 0.532e-6) == 1.0
    assert effective_chi3(state) == 0.0
    assert gas_index(VACUUM, 1.0e-6) == 1.0


def test_density_ratio_scaling(db):
    xe = db.gas("xenon")
    s1 = GasState(species=xe, pressure=1e5, temperature=293.0)
    s2 = GasState(species=xe, pressure=2e5, temperature=293.0)
    r = (gas_index(s2, 1e-6) - 1) / (gas_index(s1, 1e-6) - 1)
    assert r == pytest.approx(2.0, rel=1e-2)


@given(pressure=st.floats(1e3, 2e6), temperature=st.floats(200.0, 400.0))
def test_chi3_linear_in_pressure(pressure, temperature):
    db = load_materials()
    xe = db.gas("xenon")
    one = effective_chi3(GasState(species=xe, pressure=pressure,
                                  temperature=temperature))
    two = effective_chi3(GasState(species=xe, pressure=2 * pressure,
                                  temperature=temperature))
    assert two == pytest.approx(2 * one, rel=1e-12)


def test_chi3_reference_value(db):
    xe = db.gas("xenon")
    at_ref = effective_chi3(GasState(species=xe, pressure=GAS_REF_PRESSURE,
                                     temperature=293.15))
    assert at_ref == pytest.approx(6.4e-26, rel=1e-12)
    at_87 = effective_chi3(GasState(species=xe, pressure=8.7e5,
                                    temperature=293.15))
    assert at_87 == pytest.approx(8.7 * 6.4e-26, rel=1e-12)


def test_unknown_species(db):
    with pytest.raises(UnknownSpecies):
        db.gas("argonne")
    with pytest.raises(UnknownSpecies):
        db.solid("unobtainium")


def test_gas_index_monotone_in_pressure(db):
    xe = db.gas("xenon")
    ns = [gas_index(GasState(species=xe, pressure=p, temperature=293.15),
                    1.596e-6)
          for p in np.linspace(0.1e5, 15e5, 50)]
    assert np.all(np.diff(ns) > 0)
