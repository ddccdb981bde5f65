"""Shared fixtures: toy dispersion models and repo paths."""

import numpy as np
import pytest
from scipy.constants import c

from topdc.modes import GuidedMode, ModeLabel
from topdc.phasematch import PhaseMatchProblem


REPO_CONFIGS = __file__.rsplit("/", 2)[0] + "/configs"
PACKAGE_DATA = __file__.rsplit("/", 2)[0] + "/src/topdc/data"


def linear_mode(label="HE11", omega_lo=5e14, omega_hi=5e15, n=64,
                slope=1.0 / c, intercept=0.0):
    """GuidedMode with beta = intercept + slope * omega (vacuum-like)."""
    omega = np.linspace(omega_lo, omega_hi, n)
    return GuidedMode(
        label=ModeLabel.parse(label) if isinstance(label, str) else label,
        omega=omega, beta=intercept + slope * omega, source="tabulated",
    )


def polynomial_mode(coeffs, omega0, label="HE11",
                    omega_lo=5e14, omega_hi=5e15, n=256):
    """beta = sum_k coeffs[k] (omega - omega0)^k / k! (Taylor dispersion)."""
    omega = np.linspace(omega_lo, omega_hi, n)
    d = omega - omega0
    beta = np.zeros_like(omega)
    fact = 1.0
    for k, ck in enumerate(coeffs):
        if k:
            fact *= k
        beta += ck * d**k / fact
    lab = ModeLabel.parse(label) if isinstance(label, str) else label
    return GuidedMode(label=lab, omega=omega, beta=beta, source="tabulated")


@pytest.fixture
def vacuum_problem():
    """All four modes on the vacuum line: delta_beta = 0 everywhere."""
    m = linear_mode()
    return PhaseMatchProblem(pump_mode=m, mode1=m, mode2=m, mode3=m,
                             pump_frequency=3e15)
