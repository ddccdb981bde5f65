"""Modal overlap integrals and nonlinear coupling coefficients.

Effective areas follow the multi-mode convention

    A_eff = prod_k [ integral |F_k|^2 ] / integral prod_k F_k*,

evaluated on matched cartesian grids; for four identical Gaussian modes of
1/e^2 intensity radius w this reduces to pi w^2, which the test suite uses
as an analytic oracle.

Coupling coefficients:

    gamma^2_{1,2,3} = 9 [chi3]^2 omega_p^2 /
                      (eps0^2 c^4 n_p n_1 n_2 n_3 A_eff^2)

for the spontaneous triplet process, the same with omega_p -> omega_p -
omega_s and n_3 -> n_s for the seeded process, and the single-mode /
cross-mode Kerr coefficients

    gamma_p   = 3 chi3 omega_p / (4 eps0 c^2 n_p^2 A_eff^(p))
    gamma_pn  = 3 chi3 omega_n / (4 eps0 c^2 n_p n_n A_eff^(p,n))

entering the pump self/cross-phase correction
beta_NL = [gamma_p - 2 (gamma_p1 + gamma_p2 + gamma_p3)] P_p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c, epsilon_0

from .errors import DisjointModes, GridMismatch, NonPositiveOverlap
from .modes import FieldGrid

_OVERLAP_FLOOR = 1e-30


def _check_grids(grids):
    first = grids[0]
    for g in grids[1:]:
        if not first.same_geometry(g):
            raise GridMismatch(
                "effective-area integrals need identical grid geometry; "
                f"got {first.ny}x{first.nx} step ({first.dx:.3g},{first.dy:.3g}) "
                f"vs {g.ny}x{g.nx} step ({g.dx:.3g},{g.dy:.3g})"
            )


def effective_area_4mode(pump: FieldGrid, m1: FieldGrid, m2: FieldGrid,
                         m3: FieldGrid, allow_sign_flip: bool = False) -> float:
    """Four-mode effective area entering the triplet coupling coefficient.

    A_eff = 1 / Re integral F_p F_1* F_2* F_3* dA for power-normalized
    fields (each norm integral is 1).  Raises DisjointModes when the cross
    term underflows (spatially non-overlapping fields); a negative overlap
    (antisymmetric mode combination) raises NonPositiveOverlap unless
    ``allow_sign_flip`` requests the absolute value.
    """
    grids = (pump, m1, m2, m3)
    _check_grids(grids)
    da = pump.dx * pump.dy
    cross = np.asarray(pump.amplitude)
    for g in (m1, m2, m3):
        cross = cross * np.conjugate(g.amplitude)
    denom = float(np.real(np.sum(cross)) * da)
    if abs(denom) < _OVERLAP_FLOOR:
        raise DisjointModes(
            "mode overlap integral underflows; fields are spatially disjoint"
        )
    if denom < 0:
        if not allow_sign_flip:
            raise NonPositiveOverlap(
                "negative scalar overlap (antisymmetric mode combination); "
                "pass allow_sign_flip=True for the magnitude"
            )
        denom = -denom
    return 1.0 / denom


def effective_area_spm(pump: FieldGrid) -> float:
    """Self-phase-modulation area: (int |F|^2)^2 / int |F|^4."""
    da = pump.dx * pump.dy
    amp2 = np.abs(pump.amplitude) ** 2
    denom = float(np.sum(amp2 * amp2) * da)
    if denom < _OVERLAP_FLOOR:
        raise NonPositiveOverlap("degenerate field: |F|^4 integral underflows")
    return 1.0 / denom


def effective_area_xpm(pump: FieldGrid, other: FieldGrid) -> float:
    """Cross-phase-modulation area: 1 / int |F_p|^2 |F_n|^2."""
    _check_grids((pump, other))
    da = pump.dx * pump.dy
    denom = float(
        np.sum(np.abs(pump.amplitude) ** 2 * np.abs(other.amplitude) ** 2) * da
    )
    if denom < _OVERLAP_FLOOR:
        raise DisjointModes("pump and mode intensities do not overlap")
    return 1.0 / denom


# ---------------------------------------------------------------------------
# bundled records


@dataclass(frozen=True)
class OverlapSet:
    """All effective areas for one process, with their provenance.

    ``source`` is 'computed' when integrated from field grids and
    'supplied' when taken from external electromagnetic simulation, in
    which case grid integration is bypassed entirely.
    """

    a_eff_4mode: float
    a_eff_spm: float
    a_eff_xpm: tuple  # one per triplet mode
    source: str = "computed"

    def __post_init__(self):
        if self.source not in ("computed", "supplied"):
            raise ValueError("source must be 'computed' or 'supplied'")
        if self.a_eff_4mode <= 0 or self.a_eff_spm <= 0 or any(
            a <= 0 for a in self.a_eff_xpm
        ):
            raise ValueError("effective areas must be positive")

    @classmethod
    def from_fields(cls, pump: FieldGrid, modes) -> "OverlapSet":
        modes = tuple(modes)
        return cls(
            a_eff_4mode=effective_area_4mode(pump, *modes),
            a_eff_spm=effective_area_spm(pump),
            a_eff_xpm=tuple(effective_area_xpm(pump, m) for m in modes),
            source="computed",
        )

    @classmethod
    def supplied(cls, a_eff: float) -> "OverlapSet":
        """Single externally supplied area used in every slot."""
        return cls(a_eff_4mode=a_eff, a_eff_spm=a_eff,
                   a_eff_xpm=(a_eff, a_eff, a_eff), source="supplied")


@dataclass(frozen=True)
class NonlinearCoefficients:
    gamma_self: float        # pump SPM, 1/(W m)
    gamma_cross: tuple       # pump-mode XPM, 1/(W m) each
    gamma_sq: float          # squared process coupling
    beta_nl: float           # rad/m at the configured pump power


# ---------------------------------------------------------------------------
# coupling coefficients


def gamma_squared_spontaneous(chi3, omega_p, n_p, n1, n2, n3, a_eff) -> float:
    """Squared triplet coupling coefficient gamma^2_{1,2,3}.

    chi3 in m^2/V^2.  Combined with hbar, pump power and the frequency
    factors of the rate integrand this yields a spectral rate density.
    """
    if min(n_p, n1, n2, n3) <= 0 or a_eff <= 0 or omega_p <= 0:
        raise ValueError("indices, area and frequency must be positive")
    return (9 * chi3**2 * omega_p**2) / (
        epsilon_0**2 * c**4 * n_p * n1 * n2 * n3 * a_eff**2
    )


def gamma_squared_seeded(chi3, omega_p, omega_s, n_p, n1, n2, n_s, a_eff) -> float:
    """Seeded-process coupling: pump frequency replaced by omega_p - omega_s."""
    om_eff = omega_p - omega_s
    if om_eff <= 0:
        raise ValueError("seed frequency must be below the pump frequency")
    return (9 * chi3**2 * om_eff**2) / (
        epsilon_0**2 * c**4 * n_p * n1 * n2 * n_s * a_eff**2
    )


def kerr_gamma_self(chi3, omega_p, n_p, a_eff_spm) -> float:
    """Pump self-phase Kerr coefficient gamma_p (1/(W m))."""
    return 3 * chi3 * omega_p / (4 * epsilon_0 * c**2 * n_p**2 * a_eff_spm)


def kerr_gamma_cross(chi3, omega_n, n_p, n_n, a_eff_xpm) -> float:
    """Pump-to-mode-n cross-phase Kerr coefficient gamma_{p,n} (1/(W m))."""
    return 3 * chi3 * omega_n / (4 * epsilon_0 * c**2 * n_p * n_n * a_eff_xpm)


def nonlinear_mismatch(gamma_self, gamma_cross_list, pump_power) -> float:
    """Kerr contribution to the phase mismatch:
    beta_NL = [gamma_p - 2 sum_n gamma_{p,n}] P_p."""
    return (gamma_self - 2 * sum(gamma_cross_list)) * pump_power
