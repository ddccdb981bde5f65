"""Refractive-index and third-order-susceptibility models.

Solids are described by Sellmeier fits, gases by a wavelength-dependent
refractivity fit plus ideal-gas density scaling of both (n - 1) and
chi3.  All coefficients live in ``data/materials.toml`` together with
their literature citations; nothing numerical is hard-coded here.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import OutOfRange, UnknownSpecies

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_MATERIALS_FILE = DATA_DIR / "materials.toml"

# Reference condition for gas properties (1 bar, 20 C).
GAS_REF_PRESSURE = 1.0e5       # Pa
GAS_REF_TEMPERATURE = 293.15   # K


@dataclass(frozen=True)
class MaterialModel:
    """A solid described by a Sellmeier fit n^2 = 1 + sum B_i l^2/(l^2 - C_i).

    ``sellmeier_coefficients`` holds (B_i, C_i) pairs with C_i in um^2;
    ``valid_range`` is (min, max) wavelength in meters.  ``chi3`` is the
    third-order susceptibility in m^2/V^2 (0 when unknown).
    """

    name: str
    sellmeier_coefficients: tuple[tuple[float, float], ...]
    valid_range: tuple[float, float]
    chi3: float = 0.0
    citation: str = ""


def solid_index(material: MaterialModel, wavelength: float) -> float:
    """Sellmeier refractive index at vacuum wavelength (m)."""
    lo, hi = material.valid_range
    wl = np.asarray(wavelength, dtype=float)
    if np.any(wl < lo) or np.any(wl > hi):
        raise OutOfRange(
            f"{material.name}: wavelength {wavelength} m outside "
            f"validity window [{lo}, {hi}] m"
        )
    l2 = (wl * 1e6) ** 2
    n2 = 1.0 + sum(b * l2 / (l2 - c) for b, c in material.sellmeier_coefficients)
    n = np.sqrt(n2)
    return float(n) if np.isscalar(wavelength) else n


@dataclass(frozen=True)
class GasSpecies:
    """Dispersion and nonlinearity data for one gas.

    The refractivity fit gives (n - 1) at its own reference condition
    (``fit_pressure``, ``fit_temperature``); terms use the three-term
    form (n-1) = A * sum B_i / (C_i - sigma^2) with sigma = 1/lambda in
    1/um.  ``base_chi3`` is chi3 at 1 bar / 293.15 K.
    """

    name: str
    refractivity_scale: float
    refractivity_terms: tuple[tuple[float, float], ...]
    fit_pressure: float
    fit_temperature: float
    valid_range: tuple[float, float]
    base_chi3: float
    citation: str = ""

    def refractivity_at_fit_reference(self, wavelength):
        """(n - 1) at the fit's own reference condition."""
        sigma2 = (1e-6 / np.asarray(wavelength, dtype=float)) ** 2
        acc = sum(b / (c - sigma2) for b, c in self.refractivity_terms)
        return self.refractivity_scale * acc


@dataclass(frozen=True)
class GasState:
    """A gas at a given pressure (Pa) and temperature (K)."""

    species: GasSpecies
    pressure: float
    temperature: float = GAS_REF_TEMPERATURE

    def __post_init__(self):
        if self.pressure < 0:
            raise ValueError("gas pressure must be >= 0")
        if self.temperature <= 0:
            raise ValueError("gas temperature must be > 0")

    @property
    def density_ratio_to_reference(self) -> float:
        """Ideal-gas number-density ratio relative to 1 bar / 293.15 K."""
        return (self.pressure / GAS_REF_PRESSURE) * (
            GAS_REF_TEMPERATURE / self.temperature
        )


class Vacuum:
    """Stand-in gas state for an evacuated waveguide (n = 1, chi3 = 0)."""

    pressure = 0.0
    temperature = GAS_REF_TEMPERATURE

    @property
    def density_ratio_to_reference(self):
        return 0.0


VACUUM = Vacuum()


def gas_index(state, wavelength: float):
    """Refractive index of the gas: 1 + (n_fit - 1) scaled by ideal-gas density."""
    if isinstance(state, Vacuum):
        return 1.0 if np.isscalar(wavelength) else np.ones_like(
            np.asarray(wavelength, dtype=float)
        )
    sp = state.species
    # density ratio relative to the fit's own reference condition
    rho = (state.pressure / sp.fit_pressure) * (
        sp.fit_temperature / state.temperature
    )
    n = 1.0 + sp.refractivity_at_fit_reference(wavelength) * rho
    return float(n) if np.isscalar(wavelength) else n


def effective_chi3(state) -> float:
    """chi3 of the gas at its current density (linear in pressure)."""
    if isinstance(state, Vacuum):
        return 0.0
    return state.species.base_chi3 * state.density_ratio_to_reference


@dataclass(frozen=True)
class FiberSpec:
    """Two-layer step-index description of a commercial fiber."""

    name: str
    core_radius: float       # m
    cladding_radius: float   # m
    index_step: float        # relative step: n_core = n_clad * (1 + step)
    cladding_material: str
    note: str = ""


@dataclass(frozen=True)
class MaterialDatabase:
    solids: dict = field(default_factory=dict)
    gases: dict = field(default_factory=dict)
    fibers: dict = field(default_factory=dict)
    source_path: Path | None = None

    def solid(self, name: str) -> MaterialModel:
        try:
            return self.solids[name]
        except KeyError:
            raise UnknownSpecies(f"unknown solid material {name!r}") from None

    def gas(self, name: str) -> GasSpecies:
        try:
            return self.gases[name]
        except KeyError:
            raise UnknownSpecies(f"unknown gas species {name!r}") from None

    def fiber(self, name: str) -> FiberSpec:
        try:
            return self.fibers[name]
        except KeyError:
            raise UnknownSpecies(f"unknown fiber {name!r}") from None


def load_materials(path=None) -> MaterialDatabase:
    """Load the material database (TOML).  Field layout is documented in the
    shipped ``data/materials.toml``."""
    path = Path(path) if path is not None else DEFAULT_MATERIALS_FILE
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)

    solids = {}
    for name, rec in raw.get("solid", {}).items():
        solids[name] = MaterialModel(
            name=name,
            sellmeier_coefficients=tuple(
                (float(b), float(c)) for b, c in rec["sellmeier"]
            ),
            valid_range=(float(rec["valid_min_m"]), float(rec["valid_max_m"])),
            chi3=float(rec.get("chi3", 0.0)),
            citation=rec.get("citation", ""),
        )

    gases = {}
    for name, rec in raw.get("gas", {}).items():
        gases[name] = GasSpecies(
            name=name,
            refractivity_scale=float(rec["refractivity_scale"]),
            refractivity_terms=tuple(
                (float(b), float(c)) for b, c in rec["refractivity_terms"]
            ),
            fit_pressure=float(rec["fit_pressure_pa"]),
            fit_temperature=float(rec["fit_temperature_k"]),
            valid_range=(float(rec["valid_min_m"]), float(rec["valid_max_m"])),
            base_chi3=float(rec["base_chi3"]),
            citation=rec.get("citation", ""),
        )

    fibers = {}
    for name, rec in raw.get("fiber", {}).items():
        fibers[name] = FiberSpec(
            name=name,
            core_radius=float(rec["core_radius_m"]),
            cladding_radius=float(rec["cladding_radius_m"]),
            index_step=float(rec["index_step"]),
            cladding_material=rec["cladding_material"],
            note=rec.get("note", ""),
        )

    return MaterialDatabase(
        solids=solids, gases=gases, fibers=fibers, source_path=path
    )
