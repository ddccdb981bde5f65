"""Taper transition diagnostics: adiabaticity, mode beating, launch overlap.

The local taper angle must stay below the adiabatic limit

    Omega = rho |beta_i - beta_neighbor| / (2 pi)

for every coupled mode pair at every position z; rho is the local outer
radius (the relevant modes are cladding-guided along the transition, so
the outer radius is the physically relevant scale).  Mode beating after a
non-adiabatic splice has period 2 pi / |beta_a - beta_b|, and the splice
launch efficiency is the squared normalized field inner product.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    DegenerateModes,
    GridMismatch,
    MonotonicityError,
    ParseError,
    ProfileTooShort,
)
from .modes import FieldGrid, GuidedMode

# Below this outer radius the original core no longer influences the
# cladding-guided modes and the silica-rod-in-air model applies directly.
CORE_INFLUENCE_RADIUS = 15e-6


# ---------------------------------------------------------------------------
# profile


@dataclass
class TaperProfile:
    """Sampled outer radius along the pull direction."""

    z: np.ndarray          # m, strictly increasing
    radius: np.ndarray     # m, > 0

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.radius = np.asarray(self.radius, dtype=float)
        if self.z.size != self.radius.size:
            raise ValueError("z and radius must have equal length")
        if self.z.size < 3:
            raise ProfileTooShort("need at least 3 profile samples")
        if np.any(np.diff(self.z) <= 0):
            raise MonotonicityError("z samples must be strictly increasing")
        if np.any(self.radius <= 0):
            raise ValueError("all radii must be positive")
        i_min = int(np.argmin(self.radius))
        if (np.any(np.diff(self.radius[: i_min + 1]) > 0)
                or np.any(np.diff(self.radius[i_min:]) < 0)):
            raise MonotonicityError(
                "radius must decrease monotonically into the waist "
                "on each side"
            )

    @property
    def waist_radius(self):
        return float(np.min(self.radius))

    def local_angle(self):
        """|d radius / d z| by centered differences (one-sided at ends)."""
        return np.abs(np.gradient(self.radius, self.z))


def read_profile(path) -> TaperProfile:
    """CSV with header 'z_m,radius_m'; '#' comment lines allowed."""
    zs, rs = [], []
    header_seen = False
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if not header_seen:
                if [t.strip() for t in text.split(",")] != ["z_m", "radius_m"]:
                    raise ParseError("expected header 'z_m,radius_m'",
                                     line=lineno)
                header_seen = True
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise ParseError(f"expected 2 columns, got {len(parts)}",
                                 line=lineno)
            try:
                zs.append(float(parts[0]))
                rs.append(float(parts[1]))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from None
    if not header_seen:
        raise ParseError("missing header 'z_m,radius_m'", line=1)
    return TaperProfile(z=np.asarray(zs), radius=np.asarray(rs))


# ---------------------------------------------------------------------------
# adiabaticity


def adiabatic_limit(local_radius: float, beta_i: float,
                    beta_neighbor: float) -> float:
    """Maximum local taper angle for adiabatic conversion (radians).

    Symmetric in the two propagation constants, linear in the radius,
    zero exactly at modal degeneracy.
    """
    if local_radius <= 0:
        raise ValueError("local radius must be positive")
    return local_radius * abs(beta_i - beta_neighbor) / (2 * np.pi)


@dataclass
class AdiabaticityReport:
    """Per-position comparison of the actual angle with all pair limits."""

    z: np.ndarray
    radius: np.ndarray
    angle_actual: np.ndarray
    limits: dict                 # pair name -> per-z limit array (NaN: cutoff)
    passed: bool
    worst_margin: float          # min over z of min(limit)/angle (inf if flat)
    notes: list = dc_field(default_factory=list)

    def to_json_dict(self):
        return {
            "z_m": [repr(float(v)) for v in self.z],
            "radius_m": [repr(float(v)) for v in self.radius],
            "angle_actual_rad": [repr(float(v))
                                 for v in self.angle_actual],
            "limits_rad": {
                name: [repr(float(v)) for v in arr]
                for name, arr in sorted(self.limits.items())
            },
            "passed": self.passed,
            "worst_margin": repr(self.worst_margin),
            "notes": self.notes,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")


def check_profile(profile: TaperProfile, beta_pairs) -> AdiabaticityReport:
    """Evaluate the adiabaticity criterion along a transition profile.

    ``beta_pairs`` maps a pair name to a callable
    ``(radius, ) -> (beta_i, beta_neighbor)`` or None when either mode is
    past cutoff at that radius (the pair then drops out of the comparison
    at that sample, with a note).
    """
    angle = profile.local_angle()
    limits = {}
    notes = []
    for name, beta_fn in beta_pairs.items():
        lim = np.full(profile.z.size, np.nan)
        for k, r in enumerate(profile.radius):
            betas = beta_fn(r)
            if betas is None:
                continue
            lim[k] = adiabatic_limit(r, betas[0], betas[1])
        if np.any(np.isnan(lim)):
            notes.append(
                f"{name}: {int(np.count_nonzero(np.isnan(lim)))} sample(s) "
                "past cutoff, excluded from the comparison"
            )
        limits[name] = lim

    stacked = np.array(list(limits.values()))  # (pairs, z)
    min_limit = np.full(profile.z.size, np.nan)
    if stacked.size:
        # positions where every pair is past cutoff stay NaN (exempt)
        have_limit = ~np.isnan(stacked).all(axis=0)
        if have_limit.any():
            min_limit[have_limit] = np.nanmin(stacked[:, have_limit], axis=0)
    else:
        min_limit[:] = np.inf
    margins = np.full(profile.z.size, np.inf)
    active = angle > 0
    valid = active & np.isfinite(min_limit)
    margins[valid] = min_limit[valid] / angle[valid]
    # strict inequality: a sample exactly at the limit fails
    passed = bool(np.all((angle < min_limit) | ~np.isfinite(min_limit)))
    worst = float(np.min(margins)) if margins.size else float("inf")
    return AdiabaticityReport(
        z=profile.z, radius=profile.radius, angle_actual=angle,
        limits=limits, passed=passed, worst_margin=worst, notes=notes,
    )


# ---------------------------------------------------------------------------
# beating and launch overlap


def beat_period(mode_a: GuidedMode, mode_b: GuidedMode, omega: float) -> float:
    """Intermodal beat period 2 pi / |beta_a - beta_b| at one frequency."""
    db = mode_a.beta_at(omega) - mode_b.beta_at(omega)
    if db == 0.0:
        raise DegenerateModes(
            f"{mode_a.label} and {mode_b.label} are degenerate at "
            f"omega={omega:.6g}"
        )
    return 2 * np.pi / abs(db)


def launch_overlap(field_in, field_out) -> float:
    """Splice launch efficiency: |<F_in, F_out>|^2 for normalized fields.

    Accepts FieldGrid or GuidedMode (with an attached field) arguments.
    Symmetric, in [0, 1], invariant to a global phase on either field.
    """
    if isinstance(field_in, GuidedMode):
        field_in = field_in.field
    if isinstance(field_out, GuidedMode):
        field_out = field_out.field
    if field_in is None or field_out is None:
        raise ValueError("both modes need an attached transverse field")
    if not field_in.same_geometry(field_out):
        raise GridMismatch(
            "launch overlap requires fields sampled on identical grids"
        )
    da = field_in.dx * field_in.dy
    inner = np.sum(np.conjugate(field_in.amplitude) * field_out.amplitude) * da
    return float(min(abs(inner) ** 2, 1.0))
