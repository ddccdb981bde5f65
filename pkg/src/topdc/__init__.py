"""Design and estimation toolkit for third-order parametric down-conversion
(photon-triplet generation and its seeded counterpart) in optical fibers.

Submodules
----------
materials   refractive index and chi3 data for glasses and filling gases
modes       step-index / capillary / tabulated guided-mode dispersion
overlap     effective areas and nonlinear coupling coefficients
phasematch  mismatch evaluation, sinc spectral amplitude, root finding
rates       spontaneous triplet rates and seeded pair numbers
taper       adiabaticity and intermodal-beat diagnostics for tapers
platforms   ready-made problem builders for the three fiber platforms
cli         command-line entry point (``topdc``)
"""

__version__ = "0.1.0"
