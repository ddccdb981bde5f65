"""Spectral densities and integrated conversion rates.

Spontaneous (CW pump) spectral density of triplet emission:

    dR(omega1, omega2) = (hbar / (2 pi^2)) P_p gamma^2_{1,2,3}
                         * omega1 omega2 omega3 / omega_p^2
                         * |f(delta_beta)|^2,          omega3 = omega_p - omega1 - omega2

integrated over the detection window to give a rate in Hz.  Seeded
(pulsed) pair number per pulse:

    dN(omega1, omega2) = (1 / pi^2) P_p P_s gamma^2_{1,2,s}
                         * omega1 omega2 / omega_tilde_p^2
                         * |f(delta_beta)|^2 rho(delta_omega, t),

with omega_tilde_p = omega_p - omega_s, delta_omega = omega_p - omega1 -
omega2 - omega_s, and the square-pulse envelope density
rho(delta_omega, t) = t^2 sinc^2(delta_omega t / 2).

Both integrals use trapezoidal quadrature on uniform omega grids with a
one-step grid-doubling convergence check; cells violating energy
conservation (omega1 + omega2 >= omega_p) are masked out of the
quadrature, and the excluded area is reported.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy.constants import c, hbar

from .errors import GridTooCoarse, MissingSeed, NonPositiveOmega3
from .overlap import gamma_squared_seeded, gamma_squared_spontaneous
from .phasematch import PhaseMatchProblem, phase_matching_intensity, _sinc

_MAX_GRID = 102401
_CONVERGENCE_RTOL = 0.01
_CHUNK_CELLS = 2**23        # cells per evaluation block


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ProcessConfig:
    """Powers, wavelengths and integration window of one conversion run.

    ``pump_power`` is the CW average power for spontaneous runs and the
    pulse peak power for seeded runs (inverse duty cycle is never applied
    implicitly — peak powers are supplied by the user).
    ``detection_bandwidth`` is a full wavelength width, centered per axis
    on the degenerate down-converted wavelength (see window helpers).
    """

    pump_power: float                   # W
    pump_wavelength: float              # m
    fiber_length: float                 # m
    detection_bandwidth: float          # m (wavelength full width)
    seed_power: Optional[float] = None  # W
    seed_wavelength: Optional[float] = None
    pulse_duration: Optional[float] = None
    inverse_duty_cycle: Optional[float] = None
    repetition_rate: Optional[float] = None
    grid_resolution: int = 801

    def __post_init__(self):
        if self.pump_power < 0:
            raise ValueError("pump power must be >= 0")
        if self.fiber_length <= 0:
            raise ValueError("fiber length must be > 0")
        if self.detection_bandwidth <= 0:
            raise ValueError("detection bandwidth must be > 0")
        if (self.seed_power is None) != (self.seed_wavelength is None):
            raise ValueError("seed power and wavelength must come together")
        if self.seed_power is not None and self.seed_power < 0:
            raise ValueError("seed power must be >= 0")
        if self.grid_resolution < 2:
            raise ValueError("grid resolution must be >= 2")

    @property
    def pump_frequency(self):
        return 2 * np.pi * c / self.pump_wavelength

    @property
    def seeded(self):
        return self.seed_power is not None


@dataclass(frozen=True)
class RateProblem:
    """Dispersion, nonlinearity and mode indices for one platform setup.

    ``phase`` holds the four guided modes (mode3 is the third photon or
    the seed).  ``a_eff`` is the process effective area; ``a_eff_source``
    records whether it was integrated from fields or externally supplied.
    Refractive indices entering the coupling coefficient are evaluated at
    the window centers once per run (they vary negligibly across the
    detection window compared with the factor-level target accuracy).
    """

    phase: PhaseMatchProblem
    chi3: float
    a_eff: float
    a_eff_source: str = "computed"
    dispersion_sources: tuple = ()

    def __post_init__(self):
        if self.chi3 <= 0 or self.a_eff <= 0:
            raise ValueError("chi3 and effective area must be positive")


# ---------------------------------------------------------------------------
# detection windows


def omega_window(center_wavelength: float, bandwidth: float):
    """(omega_lo, omega_hi) for a wavelength window of full width
    ``bandwidth`` centered on ``center_wavelength`` (exact conversion,
    hence asymmetric in omega)."""
    lam_lo = center_wavelength - bandwidth / 2
    lam_hi = center_wavelength + bandwidth / 2
    if lam_lo <= 0:
        raise ValueError("detection window extends below zero wavelength")
    return 2 * np.pi * c / lam_hi, 2 * np.pi * c / lam_lo


def spontaneous_window(config: ProcessConfig):
    """Per-axis window centered on the degenerate triplet wavelength."""
    return omega_window(3 * config.pump_wavelength, config.detection_bandwidth)


def seeded_window(config: ProcessConfig):
    """Per-axis window centered on the energy-matched pair wavelength
    2 pi c / (omega_tilde_p / 2)."""
    om_tilde = config.pump_frequency - 2 * np.pi * c / config.seed_wavelength
    if om_tilde <= 0:
        raise ValueError("seed frequency must lie below the pump frequency")
    center = 2 * np.pi * c / (om_tilde / 2)
    return omega_window(center, config.detection_bandwidth)


# ---------------------------------------------------------------------------
# spectral grid container


@dataclass
class SpectralGrid:
    """S(omega1, omega2) on a uniform grid plus the integrated total.

    ``mask`` marks energy-violating cells (omega1 + omega2 >= omega_p)
    excluded from the quadrature; ``excluded_area`` is their total
    (rad/s)^2 measure.  Values are zero on masked cells by construction.
    """

    omega1: np.ndarray
    omega2: np.ndarray
    values: np.ndarray
    total: float
    mask: np.ndarray
    excluded_area: float
    provenance: dict = dc_field(default_factory=dict)

    def to_csv(self, path):
        """Rows of omega1, omega2, S with a provenance comment header."""
        with open(path, "w") as fh:
            for key in sorted(self.provenance):
                fh.write(f"# {key}: {self.provenance[key]}\n")
            fh.write("omega1_rad_s,omega2_rad_s,spectral_density\n")
            for i, w2 in enumerate(self.omega2):
                for j, w1 in enumerate(self.omega1):
                    fh.write(f"{float(w1)!r},{float(w2)!r},"
                             f"{float(self.values[i, j])!r}\n")

    def to_json_dict(self):
        return {
            "omega1_rad_s": [repr(float(v)) for v in self.omega1],
            "omega2_rad_s": [repr(float(v)) for v in self.omega2],
            "values": [[repr(float(v)) for v in row]
                       for row in self.values],
            "total": repr(self.total),
            "mask_rule": "omega1 + omega2 >= pump_frequency",
            "masked_cells": int(np.count_nonzero(self.mask)),
            "excluded_area_rad2_s2": repr(self.excluded_area),
            "provenance": self.provenance,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")


# ---------------------------------------------------------------------------
# densities


def pulse_envelope_density(delta_omega, duration: float):
    """Square-pulse envelope density rho = t^2 sinc^2(delta_omega t / 2)."""
    if duration <= 0:
        raise ValueError("pulse duration must be positive")
    return (duration * _sinc(np.asarray(delta_omega) * duration / 2)) ** 2


def _indices_at(problem: RateProblem, config: ProcessConfig, seeded: bool):
    """Effective indices at the pump and the per-axis window centers."""
    ph = problem.phase
    omega_p = config.pump_frequency
    n_p = ph.pump_mode.n_eff_at(omega_p)
    if seeded:
        omega_s = 2 * np.pi * c / config.seed_wavelength
        om_c = (omega_p - omega_s) / 2
        return n_p, ph.mode1.n_eff_at(om_c), ph.mode2.n_eff_at(om_c), \
            ph.mode3.n_eff_at(omega_s)
    om_c = omega_p / 3
    return n_p, ph.mode1.n_eff_at(om_c), ph.mode2.n_eff_at(om_c), \
        ph.mode3.n_eff_at(om_c)


def _gamma_sq(problem: RateProblem, config: ProcessConfig, seeded: bool):
    n_p, n1, n2, n3 = _indices_at(problem, config, seeded)
    if seeded:
        omega_s = 2 * np.pi * c / config.seed_wavelength
        return gamma_squared_seeded(
            problem.chi3, config.pump_frequency, omega_s,
            n_p, n1, n2, n3, problem.a_eff,
        )
    return gamma_squared_spontaneous(
        problem.chi3, config.pump_frequency, n_p, n1, n2, n3, problem.a_eff,
    )


def _spontaneous_density_array(problem, config, w1, w2,
                               perfect_phase_matching=False):
    """Vectorized dR over outer(w2, w1); masked cells set to 0.

    Returns (values, mask) with mask True on omega1+omega2 >= omega_p.
    """
    ph = problem.phase
    omega_p = config.pump_frequency
    w1g, w2g = np.meshgrid(w1, w2)
    w3g = omega_p - w1g - w2g
    mask = w3g <= 0

    gamma_sq = _gamma_sq(problem, config, seeded=False)
    beta_p = ph.pump_mode.beta_at(omega_p)
    b1 = ph.mode1.beta_at(w1)
    b2 = ph.mode2.beta_at(w2)
    w3_safe = np.where(mask, omega_p / 3, w3g)
    b3 = ph.mode3.beta_at(w3_safe)
    db = beta_p - b1[None, :] - b2[:, None] - b3 - ph.beta_nl
    if perfect_phase_matching:
        f2 = config.fiber_length**2
    else:
        f2 = phase_matching_intensity(db, config.fiber_length)
    vals = (hbar / (2 * np.pi**2) * config.pump_power * gamma_sq
            * w1g * w2g * w3g / omega_p**2 * f2)
    vals = np.where(mask, 0.0, vals)
    return vals, mask


def _seeded_density_array(problem, config, w1, w2):
    ph = problem.phase
    omega_p = config.pump_frequency
    omega_s = 2 * np.pi * c / config.seed_wavelength
    om_tilde = omega_p - omega_s
    w1g, w2g = np.meshgrid(w1, w2)
    mask = (w1g + w2g) >= omega_p

    gamma_sq = _gamma_sq(problem, config, seeded=True)
    beta_p = ph.pump_mode.beta_at(omega_p)
    b1 = ph.mode1.beta_at(w1)
    b2 = ph.mode2.beta_at(w2)
    b_s = ph.mode3.beta_at(omega_s)
    db = beta_p - b1[None, :] - b2[:, None] - b_s - ph.beta_nl
    f2 = phase_matching_intensity(db, config.fiber_length)
    rho = pulse_envelope_density(omega_p - w1g - w2g - omega_s,
                                 config.pulse_duration)
    vals = (config.pump_power * config.seed_power / np.pi**2 * gamma_sq
            * w1g * w2g / om_tilde**2 * f2 * rho)
    vals = np.where(mask, 0.0, vals)
    return vals, mask


def spectral_density(problem: RateProblem, config: ProcessConfig,
                     omega1: float, omega2: float) -> float:
    """Spontaneous spectral rate density at a single (omega1, omega2).

    Raises NonPositiveOmega3 when the point violates energy conservation.
    """
    omega_p = config.pump_frequency
    if omega1 <= 0 or omega2 <= 0:
        raise ValueError("omega1 and omega2 must be positive")
    if omega_p - omega1 - omega2 <= 0:
        raise NonPositiveOmega3(
            f"omega3 = {omega_p - omega1 - omega2:.6g} <= 0 at "
            f"(omega1, omega2) = ({omega1:.6g}, {omega2:.6g})"
        )
    vals, _ = _spontaneous_density_array(
        problem, config, np.array([omega1]), np.array([omega2])
    )
    return float(vals[0, 0])


def seeded_spectral_density(problem: RateProblem, config: ProcessConfig,
                            omega1: float, omega2: float) -> float:
    """Seeded pair-number density at a single (omega1, omega2)."""
    _require_seed(config)
    vals, _ = _seeded_density_array(
        problem, config, np.array([omega1]), np.array([omega2])
    )
    return float(vals[0, 0])


# ---------------------------------------------------------------------------
# integrated quantities


def _masked_trapezoid(vals, mask, w1, w2):
    """2-D trapezoid with masked cells zeroed; returns (total, excluded)."""
    total = float(np.trapezoid(np.trapezoid(vals, w1, axis=1), w2))
    d1 = (w1[-1] - w1[0]) / (len(w1) - 1)
    d2 = (w2[-1] - w2[0]) / (len(w2) - 1)
    excluded = float(np.count_nonzero(mask)) * d1 * d2
    return total, excluded


def _axes(window, n):
    lo, hi = window
    return np.linspace(lo, hi, n)


def _trapezoid_weights(axis):
    d = (axis[-1] - axis[0]) / (len(axis) - 1)
    w = np.full(len(axis), d)
    w[0] = w[-1] = d / 2
    return w


def _integrate_chunked(problem, config, n, seeded, perfect_phase_matching):
    """Trapezoid over an n x n grid evaluated in row blocks.

    Avoids materializing huge grids during the convergence loop; the
    row-major accumulation order is fixed, so results are deterministic.
    Returns (total, excluded_area).
    """
    window = seeded_window(config) if seeded else spontaneous_window(config)
    w1 = _axes(window, n)
    w2 = _axes(window, n)
    wt1 = _trapezoid_weights(w1)
    wt2 = _trapezoid_weights(w2)
    rows_per_block = max(1, _CHUNK_CELLS // n)
    total = 0.0
    masked_cells = 0
    for start in range(0, n, rows_per_block):
        stop = min(start + rows_per_block, n)
        if seeded:
            vals, mask = _seeded_density_array(problem, config,
                                               w1, w2[start:stop])
        else:
            vals, mask = _spontaneous_density_array(
                problem, config, w1, w2[start:stop],
                perfect_phase_matching=perfect_phase_matching,
            )
        total += float((vals @ wt1) @ wt2[start:stop])
        masked_cells += int(np.count_nonzero(mask))
    d1 = (w1[-1] - w1[0]) / (n - 1)
    d2 = (w2[-1] - w2[0]) / (n - 1)
    return total, masked_cells * d1 * d2


def _converged_total(evaluate, n0):
    """Grid-doubling convergence: |R_2n - R_n| < 1% of R_2n (or both ~ 0).

    ``evaluate(n)`` returns (total, excluded) at an n x n grid.  Doubles
    until converged or the grid cap is hit, then raises GridTooCoarse.
    Returns ((total, excluded), n_fine).
    """
    n = n0
    coarse = evaluate(n)
    while True:
        n_fine = 2 * n - 1
        fine = evaluate(n_fine)
        scale = max(abs(fine[0]), abs(coarse[0]))
        if scale == 0.0 or abs(fine[0] - coarse[0]) < _CONVERGENCE_RTOL * scale:
            return fine, n_fine
        if n_fine >= _MAX_GRID:
            raise GridTooCoarse(
                f"quadrature not converged at {n_fine} points per axis "
                f"(last change {abs(fine[0] - coarse[0]) / scale:.3%})"
            )
        n, coarse = n_fine, fine


def _grid_provenance(problem, config, kind):
    payload = {
        "kind": kind,
        "pump_wavelength_m": repr(config.pump_wavelength),
        "pump_power_w": repr(config.pump_power),
        "fiber_length_m": repr(config.fiber_length),
        "detection_bandwidth_m": repr(config.detection_bandwidth),
        "a_eff_m2": repr(problem.a_eff),
        "a_eff_source": problem.a_eff_source,
        "chi3_m2_v2": repr(problem.chi3),
        "dispersion_sources": ";".join(problem.dispersion_sources),
    }
    if config.seeded:
        payload["seed_wavelength_m"] = repr(config.seed_wavelength)
        payload["seed_power_w"] = repr(config.seed_power)
        payload["pulse_duration_s"] = repr(config.pulse_duration)
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True).encode()
    ).hexdigest()
    payload["config_hash"] = digest
    return payload


def _require_seed(config):
    if not config.seeded or config.seed_power == 0:
        raise MissingSeed(
            "seeded evaluation requires nonzero seed power and wavelength"
        )
    if config.pulse_duration is None:
        raise MissingSeed("seeded evaluation requires a pulse duration")


def spontaneous_grid(problem: RateProblem, config: ProcessConfig,
                     perfect_phase_matching: bool = False) -> SpectralGrid:
    """Spontaneous spectral density sampled at exactly grid_resolution.

    The exported grid is for plotting and topology analysis; its ``total``
    is the trapezoid of the sampled values at this fixed resolution.  For
    a convergence-checked rate use :func:`spontaneous_rate`.
    """
    window = spontaneous_window(config)
    n = config.grid_resolution
    w1 = _axes(window, n)
    w2 = _axes(window, n)
    vals, mask = _spontaneous_density_array(
        problem, config, w1, w2,
        perfect_phase_matching=perfect_phase_matching,
    )
    total, excluded = _masked_trapezoid(vals, mask, w1, w2)
    return SpectralGrid(
        omega1=w1, omega2=w2, values=vals, total=total, mask=mask,
        excluded_area=excluded,
        provenance={**_grid_provenance(problem, config, "spontaneous"),
                    "grid_points_per_axis": str(n)},
    )


def spontaneous_rate(problem: RateProblem, config: ProcessConfig,
                     perfect_phase_matching: bool = False) -> float:
    """Integrated spontaneous triplet rate (Hz) over the detection window.

    Grid-doubling convergence is enforced, starting from
    config.grid_resolution (GridTooCoarse when the cap is reached
    unconverged).
    """
    if config.pump_power == 0:
        return 0.0
    (total, _), _ = _converged_total(
        lambda n: _integrate_chunked(problem, config, n, seeded=False,
                                     perfect_phase_matching=perfect_phase_matching),
        config.grid_resolution,
    )
    return total


def seeded_grid(problem: RateProblem, config: ProcessConfig) -> SpectralGrid:
    """Seeded pair-number density sampled at exactly grid_resolution.

    As with :func:`spontaneous_grid`, this is the plotting/topology view;
    the convergence-checked pair number is :func:`seeded_pairs_per_pulse`.
    """
    _require_seed(config)
    window = seeded_window(config)
    n = config.grid_resolution
    w1 = _axes(window, n)
    w2 = _axes(window, n)
    vals, mask = _seeded_density_array(problem, config, w1, w2)
    total, excluded = _masked_trapezoid(vals, mask, w1, w2)
    return SpectralGrid(
        omega1=w1, omega2=w2, values=vals, total=total, mask=mask,
        excluded_area=excluded,
        provenance={**_grid_provenance(problem, config, "seeded"),
                    "grid_points_per_axis": str(n)},
    )


def seeded_pairs_per_pulse(problem: RateProblem, config: ProcessConfig) -> float:
    """Mean seeded pair number per pump pulse over the detection window.

    Integrated with the same grid-doubling convergence policy as
    :func:`spontaneous_rate`; the seeded integrand is far stiffer (the
    phase-matching sinc varies along omega1 + omega2 with the full group
    index when the seed frequency is pinned), so convergence may require
    much finer grids than the spontaneous case.
    """
    _require_seed(config)
    if config.pump_power == 0:
        return 0.0
    (total, _), _ = _converged_total(
        lambda n: _integrate_chunked(problem, config, n, seeded=True,
                                     perfect_phase_matching=False),
        config.grid_resolution,
    )
    return total


def seeded_pairs_per_second(problem: RateProblem, config: ProcessConfig) -> float:
    """pairs/pulse times the repetition rate (must be configured)."""
    if config.repetition_rate is None:
        raise ValueError("repetition rate not configured")
    return seeded_pairs_per_pulse(problem, config) * config.repetition_rate


def peak_cells(grid: SpectralGrid, fraction: float = 0.5):
    """Boolean array of cells at or above ``fraction`` of the grid maximum."""
    peak = float(np.max(grid.values))
    if peak <= 0:
        raise ValueError("grid has no positive density")
    return grid.values >= fraction * peak


def emission_extent_wavelength(grid: SpectralGrid,
                               fraction: float = 0.5) -> float:
    """Wavelength span (m) of the omega1 axis covered by the peak region.

    For a single degenerate island this is the emission bandwidth; for a
    split (ring-shaped) density it measures the full extent of the split
    structure.
    """
    cells = peak_cells(grid, fraction)
    lam1 = 2 * np.pi * c / grid.omega1
    covered = lam1[np.any(cells, axis=0)]
    return float(np.max(covered) - np.min(covered))


def is_degenerate_topology(grid: SpectralGrid, fraction: float = 0.5) -> bool:
    """True when the density peaks at the triple-degenerate point
    (single island); False when that point has dropped out of the peak
    region (split structure)."""
    cells = peak_cells(grid, fraction)
    lam_p = float(grid.provenance["pump_wavelength_m"])
    omega_deg = 2 * np.pi * c / (3 * lam_p)
    j = int(np.argmin(np.abs(grid.omega1 - omega_deg)))
    i = int(np.argmin(np.abs(grid.omega2 - omega_deg)))
    return bool(cells[i, j])


def grid_sweep(make_problem, config: ProcessConfig, values,
               seeded: bool = False):
    """One SpectralGrid per sweep value.

    ``make_problem(value)`` rebuilds the RateProblem (and may return a
    replacement config as a (problem, config) pair) for each swept
    parameter value — pressure, waist diameter, or pump wavelength.
    """
    grids = []
    for v in values:
        built = make_problem(v)
        if isinstance(built, tuple):
            problem_v, config_v = built
        else:
            problem_v, config_v = built, config
        grid = (seeded_grid(problem_v, config_v) if seeded
                else spontaneous_grid(problem_v, config_v))
        grid.provenance["sweep_value"] = repr(float(v))
        grids.append(grid)
    return grids
