"""Exception hierarchy shared by all topdc modules."""


class TopdcError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(TopdcError):
    """Invalid or inconsistent run configuration."""


class OutOfRange(TopdcError):
    """Wavelength outside the validity window of a material fit."""


class UnknownSpecies(TopdcError):
    """Gas species not present in the material database."""


class ModeCutOff(TopdcError):
    """The requested mode is not guided at this wavelength/geometry."""


class InvalidGeometry(TopdcError):
    """Geometry outside the validity of the chosen waveguide model."""


class ParseError(TopdcError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MonotonicityError(TopdcError):
    """Tabulated wavelengths are not strictly increasing."""


class DomainEdge(TopdcError):
    """Evaluation requested at or outside the sampled domain of a mode."""


class GridMismatch(TopdcError):
    """Field grids do not share (nx, ny, dx, dy)."""


class NonPositiveOverlap(TopdcError):
    """Overlap integral came out non-positive (multi-lobed sign convention)."""


class DisjointModes(NonPositiveOverlap):
    """Cross-modulation overlap vanished: fields have disjoint support."""


class NonPositiveOmega3(TopdcError):
    """Energy conservation would force omega_3 <= 0."""


class MissingSeed(TopdcError):
    """Seeded-rate operation called without a seed field."""


class GridTooCoarse(TopdcError):
    """Quadrature failed the convergence check at the maximum resolution."""


class NoRoot(TopdcError):
    """Phase-match scan asked over an invalid/empty parameter range."""


class DegenerateModes(TopdcError):
    """Beat period undefined: the two modes share a propagation constant."""


class ProfileTooShort(TopdcError):
    """Taper profile has fewer than 3 samples."""
