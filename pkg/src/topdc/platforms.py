"""Ready-made problem builders for the three fiber platforms.

* tapered fiber: silica strand in vacuum, exact step-index dispersion;
* gas-filled hollow core: capillary closed form, Xe pressure tuning;
* hybrid fiber: ingested tabulated dispersion (visible pump branch and
  infrared triplet branch).

Each builder samples the guided modes over exactly the frequency ranges
the rate quadrature will touch (detection window, implied third-photon
range, seed) and assembles PhaseMatchProblem / RateProblem records.
"""

from __future__ import annotations

import numpy as np
from scipy.constants import c

from .errors import ModeCutOff
from .materials import (
    GasState,
    MaterialDatabase,
    gas_index,
    load_materials,
    solid_index,
)
from .modes import (
    HE11,
    HE12,
    HE13,
    DispersionTable,
    GuidedMode,
    ModeLabel,
    sample_capillary_mode,
    sample_step_index_mode,
    solve_step_index,
    capillary_mode,
)
from .phasematch import PhaseMatchProblem, PhaseMatchScan
from .rates import ProcessConfig, RateProblem, seeded_window, spontaneous_window

_WINDOW_MARGIN = 0.03   # relative widening of sampled mode domains
_N_SAMPLES = 160


# ---------------------------------------------------------------------------
# frequency coverage


def required_omega_range(config: ProcessConfig):
    """(omega_min, omega_max) the down-converted modes must cover.

    Union of the per-axis detection window, the implied third-photon
    range omega_p - omega1 - omega2 (spontaneous), and the seed frequency
    (seeded), widened by a small margin for spline headroom.
    """
    omega_p = config.pump_frequency
    if config.seeded:
        lo, hi = seeded_window(config)
        omega_s = 2 * np.pi * c / config.seed_wavelength
        lo, hi = min(lo, omega_s), max(hi, omega_s)
    else:
        lo, hi = spontaneous_window(config)
        lo3 = omega_p - 2 * hi
        hi3 = omega_p - 2 * lo
        lo, hi = min(lo, lo3), max(hi, hi3)
    lo = max(lo * (1 - _WINDOW_MARGIN), 1e12)
    hi = hi * (1 + _WINDOW_MARGIN)
    return lo, hi


def _pump_range(config: ProcessConfig):
    omega_p = config.pump_frequency
    return omega_p * 0.99, omega_p * 1.01


# ---------------------------------------------------------------------------
# tapered fiber (silica strand in vacuum)


def silica_index_fn(db: MaterialDatabase):
    silica = db.solid("silica")
    return lambda lam: solid_index(silica, lam)


def taper_modes(diameter: float, config: ProcessConfig,
                db: MaterialDatabase | None = None,
                pump_label: ModeLabel = HE12,
                triplet_label: ModeLabel = HE11,
                with_fields: bool = False):
    """(pump_mode, triplet_mode) for a silica strand of given diameter."""
    db = db or load_materials()
    n_core = silica_index_fn(db)
    n_clad = lambda lam: 1.0  # noqa: E731 - vacuum cladding
    a = diameter / 2
    pump = sample_step_index_mode(
        a, n_core, n_clad, pump_label, *_pump_range(config),
        n_samples=24, with_field=with_fields,
    )
    triplet = sample_step_index_mode(
        a, n_core, n_clad, triplet_label, *required_omega_range(config),
        n_samples=_N_SAMPLES, with_field=with_fields,
    )
    return pump, triplet


def taper_rate_problem(diameter: float, config: ProcessConfig, chi3: float,
                       a_eff: float, db: MaterialDatabase | None = None,
                       pump_label: ModeLabel = HE12,
                       triplet_label: ModeLabel = HE11,
                       beta_nl: float = 0.0) -> RateProblem:
    pump, triplet = taper_modes(diameter, config, db, pump_label,
                                triplet_label)
    phase = PhaseMatchProblem(
        pump_mode=pump, mode1=triplet, mode2=triplet, mode3=triplet,
        pump_frequency=config.pump_frequency, beta_nl=beta_nl,
    )
    return RateProblem(
        phase=phase, chi3=chi3, a_eff=a_eff, a_eff_source="supplied",
        dispersion_sources=(f"step_index(d={diameter!r})",),
    )


def taper_degenerate_mismatch(pump_wavelength: float,
                              db: MaterialDatabase | None = None,
                              pump_label: ModeLabel = HE12,
                              triplet_label: ModeLabel = HE11,
                              beta_nl: float = 0.0):
    """diameter (m) -> delta_beta (rad/m) at the triple-degenerate point."""
    db = db or load_materials()
    n_core = silica_index_fn(db)
    omega_p = 2 * np.pi * c / pump_wavelength
    lam3 = 3 * pump_wavelength

    def mismatch(diameter):
        a = diameter / 2
        n_p = solve_step_index(a, n_core(pump_wavelength), 1.0,
                               pump_wavelength, pump_label)
        n_t = solve_step_index(a, n_core(lam3), 1.0, lam3, triplet_label)
        return (n_p * omega_p - 3 * n_t * omega_p / 3) / c - beta_nl

    return mismatch


def taper_diameter_scan(lower: float, upper: float, pump_wavelength: float,
                        db: MaterialDatabase | None = None,
                        beta_nl: float = 0.0) -> PhaseMatchScan:
    return PhaseMatchScan(
        scan_parameter="diameter", lower=lower, upper=upper,
        mismatch_at=taper_degenerate_mismatch(pump_wavelength, db,
                                              beta_nl=beta_nl),
        metadata={"pump_wavelength_m": pump_wavelength},
    )


# ---------------------------------------------------------------------------
# hollow-core fiber (capillary model, Xe filling)


def hollow_modes(core_radius: float, gas: GasState, config: ProcessConfig,
                 pump_label: ModeLabel, triplet_label: ModeLabel = HE11,
                 with_fields: bool = False):
    pump = sample_capillary_mode(
        core_radius, gas, pump_label, *_pump_range(config),
        n_samples=24, with_field=with_fields,
    )
    triplet = sample_capillary_mode(
        core_radius, gas, triplet_label, *required_omega_range(config),
        n_samples=_N_SAMPLES, with_field=with_fields,
    )
    return pump, triplet


def hollow_rate_problem(core_radius: float, gas: GasState,
                        config: ProcessConfig, chi3: float, a_eff: float,
                        pump_label: ModeLabel,
                        triplet_label: ModeLabel = HE11,
                        beta_nl: float = 0.0) -> RateProblem:
    pump, triplet = hollow_modes(core_radius, gas, config, pump_label,
                                 triplet_label)
    phase = PhaseMatchProblem(
        pump_mode=pump, mode1=triplet, mode2=triplet, mode3=triplet,
        pump_frequency=config.pump_frequency, beta_nl=beta_nl,
    )
    return RateProblem(
        phase=phase, chi3=chi3, a_eff=a_eff, a_eff_source="supplied",
        dispersion_sources=(
            f"capillary(a={core_radius!r},p={gas.pressure!r})",
        ),
    )


def hollow_degenerate_mismatch(core_radius: float, species, temperature: float,
                               pump_wavelength: float,
                               pump_label: ModeLabel,
                               triplet_label: ModeLabel = HE11,
                               beta_nl: float = 0.0):
    """pressure (Pa) -> delta_beta at the triple-degenerate point."""
    omega_p = 2 * np.pi * c / pump_wavelength
    lam3 = 3 * pump_wavelength

    def mismatch(pressure):
        gas = GasState(species=species, pressure=pressure,
                       temperature=temperature)
        n_p = capillary_mode(core_radius, gas, pump_wavelength, pump_label)
        n_t = capillary_mode(core_radius, gas, lam3, triplet_label)
        return (n_p - n_t) * omega_p / c - beta_nl

    return mismatch


def hollow_pressure_scan(core_radius: float, species, temperature: float,
                         lower: float, upper: float, pump_wavelength: float,
                         pump_label: ModeLabel,
                         triplet_label: ModeLabel = HE11,
                         beta_nl: float = 0.0) -> PhaseMatchScan:
    return PhaseMatchScan(
        scan_parameter="pressure", lower=lower, upper=upper,
        mismatch_at=hollow_degenerate_mismatch(
            core_radius, species, temperature, pump_wavelength,
            pump_label, triplet_label, beta_nl,
        ),
        metadata={"pump_wavelength_m": pump_wavelength,
                  "pump_label": str(pump_label)},
    )


def hollow_candidate_labels(n_zeros: int = 4):
    """High-order capillary labels whose mode constants can exceed the
    fundamental's enough for visible/infrared index matching.

    Spans HE/EH families over the first few Bessel-zero branches; which
    one phase-matches is decided by the pressure scan, not assumed.
    """
    labels = []
    for nu in range(1, n_zeros):
        for m in range(1, n_zeros + 1):
            labels.append(ModeLabel("HE", nu, m))
            labels.append(ModeLabel("EH", nu, m))
    return labels


# ---------------------------------------------------------------------------
# hybrid fiber (tabulated dispersion)


def hybrid_rate_problem(vis_table: DispersionTable, ir_table: DispersionTable,
                        config: ProcessConfig, chi3: float, a_eff: float,
                        beta_nl: float = 0.0) -> RateProblem:
    """Pump on the visible branch, all down-converted photons (and seed)
    on the infrared branch."""
    pump = vis_table.to_guided_mode()
    triplet = ir_table.to_guided_mode()
    phase = PhaseMatchProblem(
        pump_mode=pump, mode1=triplet, mode2=triplet, mode3=triplet,
        pump_frequency=config.pump_frequency, beta_nl=beta_nl,
    )
    return RateProblem(
        phase=phase, chi3=chi3, a_eff=a_eff, a_eff_source="supplied",
        dispersion_sources=(
            f"tabulated({vis_table.fiber_id or 'vis'})",
            f"tabulated({ir_table.fiber_id or 'ir'})",
        ),
    )


# ---------------------------------------------------------------------------
# step-index fibers for the splice/taper diagnostics


def fiber_mode(fiber_name: str, wavelength: float, label: ModeLabel,
               db: MaterialDatabase | None = None,
               with_field: bool = True,
               span: float = 0.02, n_samples: int = 12,
               field_extent=None) -> GuidedMode:
    """GuidedMode of a cataloged step-index fiber near one wavelength."""
    db = db or load_materials()
    spec = db.fiber(fiber_name)
    clad = db.solid(spec.cladding_material)
    n_clad_fn = lambda lam: solid_index(clad, lam)  # noqa: E731
    n_core_fn = lambda lam: solid_index(clad, lam) * (1 + spec.index_step)  # noqa: E731
    omega = 2 * np.pi * c / wavelength
    return sample_step_index_mode(
        spec.core_radius, n_core_fn, n_clad_fn, label,
        omega * (1 - span), omega * (1 + span),
        n_samples=n_samples, with_field=with_field,
        field_extent=field_extent,
    )


def cladding_beta_pair(label_a: ModeLabel, label_b: ModeLabel,
                       wavelength: float,
                       db: MaterialDatabase | None = None):
    """radius -> (beta_a, beta_b) of the silica-rod-in-air model, or None
    past cutoff.  Used for adiabaticity limits along a taper transition,
    where the modes are guided at the cladding-air interface."""
    db = db or load_materials()
    n_core = silica_index_fn(db)
    k = 2 * np.pi / wavelength

    def pair(radius):
        try:
            na = solve_step_index(radius, n_core(wavelength), 1.0,
                                  wavelength, label_a)
            nb = solve_step_index(radius, n_core(wavelength), 1.0,
                                  wavelength, label_b)
        except ModeCutOff:
            return None
        return na * k, nb * k

    return pair


def default_taper_pairs(pump_wavelength: float,
                        db: MaterialDatabase | None = None):
    """The default adiabaticity pair set: fundamental vs first higher
    mode at the pump and triplet wavelengths, and the pump mode vs its
    higher neighbor at the pump wavelength."""
    lam3 = 3 * pump_wavelength
    return {
        f"HE11-HE12@{pump_wavelength * 1e9:.0f}nm":
            cladding_beta_pair(HE11, HE12, pump_wavelength, db),
        f"HE11-HE12@{lam3 * 1e9:.0f}nm":
            cladding_beta_pair(HE11, HE12, lam3, db),
        f"HE12-HE13@{pump_wavelength * 1e9:.0f}nm":
            cladding_beta_pair(HE12, HE13, pump_wavelength, db),
    }
