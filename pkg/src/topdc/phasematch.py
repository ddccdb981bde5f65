"""Phase mismatch, spectral amplitude, and phase-matching root finding.

The mismatch for pump -> (1, 2, 3) conversion is

    delta_beta = beta_p(omega_p) - beta_1(omega_1) - beta_2(omega_2)
                 - beta_3(omega_3) - beta_nl,

evaluated on energy-conserving triples omega_1 + omega_2 + omega_3 =
omega_p.  The finite-length spectral amplitude is

    f(delta_beta) = L sinc(delta_beta L / 2) exp(i delta_beta L / 2)

with the unnormalized sinc(x) = sin(x)/x, sinc(0) = 1.

Root finding scans a single physical parameter (gas pressure, waist
diameter, or pump wavelength); the caller provides the parameter ->
mismatch map, usually built by ``platforms``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect

from .errors import NoRoot
from .modes import GuidedMode

_DEFAULT_TOL = 1e-3          # rad/m on the residual
_BISECT_MAX_ITER = 80
_DEGENERATE_EPS = 1e-9       # relative spread for omega1=omega2=omega3 flag


# ---------------------------------------------------------------------------
# mismatch evaluation


@dataclass(frozen=True)
class PhaseMatchProblem:
    """Four guided modes plus the pump frequency and Kerr offset.

    ``mode3`` carries the third down-converted photon for the spontaneous
    process or the seed for the seeded process.
    """

    pump_mode: GuidedMode
    mode1: GuidedMode
    mode2: GuidedMode
    mode3: GuidedMode
    pump_frequency: float          # rad/s
    beta_nl: float = 0.0           # rad/m

    def __post_init__(self):
        if self.pump_frequency <= 0:
            raise ValueError("pump frequency must be positive")
        lo, hi = self.pump_mode.domain
        if not (lo <= self.pump_frequency <= hi):
            raise ValueError(
                "pump mode not sampled at the pump frequency "
                f"({self.pump_frequency:.6g} outside [{lo:.6g}, {hi:.6g}])"
            )


def delta_beta(problem: PhaseMatchProblem, omega1, omega2, omega3):
    """Mismatch on an energy-conserving triple (enforced by the caller)."""
    return (
        problem.pump_mode.beta_at(problem.pump_frequency)
        - problem.mode1.beta_at(omega1)
        - problem.mode2.beta_at(omega2)
        - problem.mode3.beta_at(omega3)
        - problem.beta_nl
    )


def _sinc(x):
    """Unnormalized sinc: sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x) / np.pi)


def phase_matching_function(db, length: float):
    """f = L sinc(db L/2) exp(i db L/2); |f(0)| = L, first zero at 2 pi/L."""
    if length <= 0:
        raise ValueError("fiber length must be positive")
    x = np.asarray(db) * length / 2
    out = length * _sinc(x) * np.exp(1j * x)
    return complex(out) if np.isscalar(db) else out


def phase_matching_intensity(db, length: float):
    """|f|^2 = L^2 sinc^2(db L / 2), the quantity entering the rates."""
    if length <= 0:
        raise ValueError("fiber length must be positive")
    return (length * _sinc(np.asarray(db) * length / 2)) ** 2


# ---------------------------------------------------------------------------
# parameter scans


@dataclass(frozen=True)
class PhaseMatchScan:
    """A one-parameter phase-matching search.

    ``mismatch_at(value)`` rebuilds the dispersion for the given parameter
    value (pressure in Pa, waist diameter in m, or pump wavelength in m)
    and returns delta_beta at the evaluation point, which defaults to the
    triple-degenerate one (omega1 = omega2 = omega3 = omega_p / 3).
    """

    scan_parameter: str            # pressure | diameter | pump_wavelength
    lower: float
    upper: float
    mismatch_at: Callable[[float], float]
    evaluation_point: Optional[tuple] = None   # (omega1, omega2) or None
    metadata: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.scan_parameter not in ("pressure", "diameter",
                                       "pump_wavelength", "none"):
            raise ValueError(f"unknown scan parameter {self.scan_parameter!r}")
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)
                and self.lower < self.upper):
            raise NoRoot(
                f"invalid scan range [{self.lower}, {self.upper}]"
            )


@dataclass(frozen=True)
class PhaseMatchSolution:
    parameter_value: float
    residual: float                # rad/m at the root
    slope: float                   # d(delta_beta)/d(parameter)
    degenerate: bool               # triple-degenerate evaluation point
    degenerate_interval: bool = False   # whole scan cell at |db| ~ 0


def find_phase_match(scan: PhaseMatchScan, n_points: int = 400,
                     tolerance: float = _DEFAULT_TOL):
    """All roots of delta_beta(parameter) on the scan range, ascending.

    Sign changes on a uniform grid (>= 100 points) are refined by
    bisection.  Grid cells where the mismatch is already below tolerance
    at both ends are collapsed into a single solution flagged
    ``degenerate_interval`` (the linear-dispersion limit where every
    parameter value is a root).  An empty list is a valid outcome.
    """
    n_points = max(n_points, 100)
    xs = np.linspace(scan.lower, scan.upper, n_points)
    ys = np.array([scan.mismatch_at(x) for x in xs])
    if not np.all(np.isfinite(ys)):
        raise NoRoot("mismatch not finite over the scan range")

    degenerate_eval = scan.evaluation_point is None
    solutions = []
    in_flat = False
    step = xs[1] - xs[0]
    for i in range(n_points - 1):
        flat = abs(ys[i]) < tolerance and abs(ys[i + 1]) < tolerance
        if flat:
            if not in_flat:
                slope = (ys[i + 1] - ys[i]) / step
                solutions.append(PhaseMatchSolution(
                    parameter_value=float(xs[i]),
                    residual=float(ys[i]),
                    slope=float(slope),
                    degenerate=degenerate_eval,
                    degenerate_interval=True,
                ))
            in_flat = True
            continue
        in_flat = False
        if ys[i] == 0.0 or ys[i] * ys[i + 1] >= 0:
            continue
        root = bisect(scan.mismatch_at, xs[i], xs[i + 1],
                      maxiter=_BISECT_MAX_ITER,
                      xtol=step * 2.0 ** (-_BISECT_MAX_ITER + 2))
        residual = scan.mismatch_at(root)
        h = step * 1e-3
        slope = (scan.mismatch_at(root + h) - scan.mismatch_at(root - h)) / (2 * h)
        solutions.append(PhaseMatchSolution(
            parameter_value=float(root),
            residual=float(residual),
            slope=float(slope),
            degenerate=degenerate_eval,
        ))
    solutions.sort(key=lambda s: s.parameter_value)
    return solutions


def is_degenerate_triple(omega1, omega2, omega3,
                         rel_tol: float = _DEGENERATE_EPS) -> bool:
    """True when all three frequencies coincide within rel_tol."""
    om = np.array([omega1, omega2, omega3])
    return bool(np.ptp(om) <= rel_tol * np.max(om))
