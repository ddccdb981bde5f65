"""Batch command-line front end.

    topdc <modes|phase-match|rate|spectral-density|taper-check>
          --config <path> [--out <dir>] [--format csv|json|both]
          [--grid N] [--quiet]

Configs are TOML, one file per run; paths inside a config are resolved
relative to the config file.  The material database can be overridden
with the TOPDC_DATA environment variable.  Every output embeds a SHA-256
hash of the config file and of all referenced data files, and identical
inputs produce byte-identical outputs.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np
from scipy.constants import c

from . import __version__
from .errors import (
    ConfigError,
    ModeCutOff,
    MonotonicityError,
    ParseError,
    TopdcError,
    UnknownSpecies,
)
from .materials import (
    GasState,
    effective_chi3,
    load_materials,
    solid_index,
)
from .modes import (
    HE11,
    ModeLabel,
    antiresonant_loss_estimate,
    capillary_mode,
    group_velocity_of,
    ingest_dispersion,
    sample_capillary_mode,
    sample_step_index_mode,
    solve_step_index,
)
from .phasematch import find_phase_match
from .platforms import (
    hollow_pressure_scan,
    hollow_rate_problem,
    hybrid_rate_problem,
    silica_index_fn,
    taper_diameter_scan,
    taper_rate_problem,
)
from .rates import (
    ProcessConfig,
    seeded_grid,
    seeded_pairs_per_pulse,
    spontaneous_grid,
    spontaneous_rate,
)
from .taper import check_profile, read_profile
from .platforms import default_taper_pairs

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


# ---------------------------------------------------------------------------
# config loading


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class RunConfig:
    """Parsed TOML run configuration plus file provenance hashes."""

    def __init__(self, path: Path):
        self.path = Path(path)
        if not self.path.is_file():
            raise ConfigError(f"config file not found: {self.path}")
        try:
            with open(self.path, "rb") as fh:
                self.raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config parse error in {self.path}: {exc}")
        self.hashes = {"config": _sha256(self.path)}
        data_override = os.environ.get("TOPDC_DATA")
        materials_path = data_override or self.raw.get("materials")
        if materials_path:
            mp = self._resolve(materials_path)
            self.db = load_materials(mp)
            self.hashes["materials"] = _sha256(mp)
        else:
            self.db = load_materials()

    def _resolve(self, rel) -> Path:
        p = Path(rel)
        if not p.is_absolute():
            p = self.path.parent / p
        if not p.is_file():
            raise ConfigError(f"referenced file not found: {p}")
        return p

    def section(self, name: str) -> dict:
        if name not in self.raw:
            raise ConfigError(f"missing [{name}] section in {self.path}")
        return self.raw[name]

    def field(self, section: dict, key: str, section_name: str):
        if key not in section:
            raise ConfigError(f"missing field '{key}' in [{section_name}]")
        return section[key]


def _mode_labels(entries):
    try:
        return [ModeLabel.parse(e) for e in entries]
    except ValueError as exc:
        raise ConfigError(f"bad mode label: {exc}")


def _process_config(cfg: RunConfig, grid_override=None) -> ProcessConfig:
    sec = cfg.section("process")
    if sec.get("cw") and "seed_power_w" in sec:
        raise ConfigError(
            "[process] sets both cw=true and seed_power_w; a run is either "
            "continuous-wave spontaneous or pulsed seeded"
        )
    try:
        return ProcessConfig(
            pump_power=cfg.field(sec, "pump_power_w", "process"),
            pump_wavelength=cfg.field(sec, "pump_wavelength_m", "process"),
            fiber_length=cfg.field(sec, "fiber_length_m", "process"),
            detection_bandwidth=cfg.field(sec, "detection_bandwidth_m",
                                          "process"),
            seed_power=sec.get("seed_power_w"),
            seed_wavelength=sec.get("seed_wavelength_m"),
            pulse_duration=sec.get("pulse_duration_s"),
            inverse_duty_cycle=sec.get("inverse_duty_cycle"),
            repetition_rate=sec.get("repetition_rate_hz"),
            grid_resolution=grid_override or sec.get("grid_resolution", 801),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [process] values: {exc}")


def _gas_state(cfg: RunConfig, plat: dict) -> GasState:
    species = cfg.db.gas(cfg.field(plat, "gas", "platform"))
    return GasState(
        species=species,
        pressure=cfg.field(plat, "pressure_pa", "platform"),
        temperature=plat.get("temperature_k", 293.15),
    )


def _platform(cfg: RunConfig) -> dict:
    plat = cfg.section("platform")
    kind = cfg.field(plat, "kind", "platform")
    if kind not in ("taper", "hollow", "hybrid", "fiber"):
        raise ConfigError(f"unknown platform kind {kind!r}")
    return plat


def _rate_problem(cfg: RunConfig, pc: ProcessConfig):
    plat = _platform(cfg)
    kind = plat["kind"]
    proc = cfg.section("process")
    chi3 = cfg.field(proc, "chi3_m2_v2", "process")
    a_eff = cfg.field(proc, "a_eff_m2", "process")
    beta_nl = proc.get("beta_nl_rad_m", 0.0)
    if kind == "taper":
        return taper_rate_problem(
            cfg.field(plat, "diameter_m", "platform"), pc, chi3, a_eff,
            db=cfg.db, beta_nl=beta_nl,
        )
    if kind == "hollow":
        gas = _gas_state(cfg, plat)
        label = ModeLabel.parse(cfg.field(plat, "pump_label", "platform"))
        if plat.get("chi3_pressure_scaled"):
            chi3 = effective_chi3(gas)
        return hollow_rate_problem(
            cfg.field(plat, "core_radius_m", "platform"), gas, pc,
            chi3, a_eff, pump_label=label, beta_nl=beta_nl,
        )
    if kind == "hybrid":
        vis_path = cfg._resolve(cfg.field(plat, "vis_table", "platform"))
        ir_path = cfg._resolve(cfg.field(plat, "ir_table", "platform"))
        cfg.hashes["vis_table"] = _sha256(vis_path)
        cfg.hashes["ir_table"] = _sha256(ir_path)
        vis = ingest_dispersion(vis_path, HE11, fiber_id="hybrid-vis")
        ir = ingest_dispersion(ir_path, HE11, fiber_id="hybrid-ir")
        return hybrid_rate_problem(vis, ir, pc, chi3, a_eff,
                                   beta_nl=beta_nl)
    raise ConfigError(f"platform kind {kind!r} cannot run a rate pipeline")


# ---------------------------------------------------------------------------
# output helpers


def _write_json(payload: dict, path: Path, quiet: bool):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    if not quiet:
        print(f"wrote {path}")


def _summary(cfg: RunConfig, kind: str) -> dict:
    return {
        "tool": f"topdc {__version__}",
        "command": kind,
        "input_hashes_sha256": dict(sorted(cfg.hashes.items())),
    }


# ---------------------------------------------------------------------------
# commands


def cmd_modes(cfg: RunConfig, out: Path, fmt: str, grid, quiet: bool) -> int:
    plat = _platform(cfg)
    sec = cfg.section("modes")
    wavelengths = cfg.field(sec, "wavelengths_m", "modes")
    labels = _mode_labels(cfg.field(sec, "labels", "modes"))
    rows = []
    for lam in wavelengths:
        omega = 2 * np.pi * c / lam
        for label in labels:
            row = {"wavelength_m": repr(float(lam)), "label": str(label)}
            try:
                _modes_row(cfg, plat, lam, omega, label, row)
            except ModeCutOff as exc:
                row["guided"] = False
                row["note"] = str(exc)
            else:
                row["guided"] = True
            rows.append(row)
    payload = {**_summary(cfg, "modes"), "rows": rows}
    if fmt in ("json", "both"):
        _write_json(payload, out / "modes.json", quiet)
    if fmt in ("csv", "both"):
        keys = sorted({k for r in rows for k in r})
        with open(out / "modes.csv", "w") as fh:
            fh.write(f"# config_sha256: {cfg.hashes['config']}\n")
            fh.write(",".join(keys) + "\n")
            for r in rows:
                fh.write(",".join(str(r.get(k, "")) for k in keys) + "\n")
        if not quiet:
            print(f"wrote {out / 'modes.csv'}")
    if not quiet:
        for r in rows:
            print(r)
    return 0


def _modes_row(cfg, plat, lam, omega, label, row):
    if plat["kind"] == "taper":
        a = cfg.field(plat, "diameter_m", "platform") / 2
        n_core = silica_index_fn(cfg.db)
        mode = sample_step_index_mode(
            a, n_core, lambda _: 1.0, label,
            omega * 0.99, omega * 1.01, n_samples=12,
        )
        row["core_radius_m"] = repr(float(a))
    elif plat["kind"] == "fiber":
        from .platforms import fiber_mode
        mode = fiber_mode(cfg.field(plat, "name", "platform"),
                          lam, label, db=cfg.db, with_field=False)
    elif plat["kind"] == "hollow":
        gas = _gas_state(cfg, plat)
        a = cfg.field(plat, "core_radius_m", "platform")
        mode = sample_capillary_mode(
            a, gas, label, omega * 0.99, omega * 1.01, n_samples=12,
        )
        row["core_radius_m"] = repr(float(a))
        if "wall_thickness_m" in plat:
            silica = cfg.db.solid("silica")
            est = antiresonant_loss_estimate(
                a, plat["wall_thickness_m"], lam,
                solid_index(silica, lam), label=label,
            )
            row["loss_db_per_m"] = repr(est.loss_db_per_m)
            row["on_resonance"] = est.on_resonance
    else:
        raise ConfigError(
            "the modes command supports taper, hollow and fiber platforms"
        )
    row["n_eff"] = repr(float(mode.n_eff_at(omega)))
    row["v_g_m_s"] = repr(float(group_velocity_of(mode, omega)))


def cmd_phase_match(cfg: RunConfig, out: Path, fmt: str, grid,
                    quiet: bool) -> int:
    plat = _platform(cfg)
    sec = cfg.section("scan")
    parameter = cfg.field(sec, "parameter", "scan")
    lower = cfg.field(sec, "lower", "scan")
    upper = cfg.field(sec, "upper", "scan")
    if not lower < upper:
        raise ConfigError("[scan] requires lower < upper")
    lam_p = cfg.field(sec, "pump_wavelength_m", "scan")
    points = sec.get("points", 400)
    if parameter == "diameter":
        scan = taper_diameter_scan(lower, upper, lam_p, db=cfg.db)
    elif parameter == "pressure":
        species = cfg.db.gas(cfg.field(plat, "gas", "platform"))
        label = ModeLabel.parse(cfg.field(plat, "pump_label", "platform"))
        scan = hollow_pressure_scan(
            cfg.field(plat, "core_radius_m", "platform"), species,
            plat.get("temperature_k", 293.15), lower, upper, lam_p, label,
        )
    else:
        raise ConfigError(f"unknown scan parameter {parameter!r}")
    solutions = find_phase_match(scan, n_points=points)
    payload = {
        **_summary(cfg, "phase-match"),
        "scan_parameter": parameter,
        "roots": [
            {
                "parameter_value": repr(s.parameter_value),
                "residual_rad_m": repr(s.residual),
                "slope": repr(s.slope),
                "degenerate": s.degenerate,
                "degenerate_interval": s.degenerate_interval,
            }
            for s in solutions
        ],
    }
    if not solutions:
        payload["note"] = "no roots in the scanned range"
    _write_json(payload, out / "phase_match.json", quiet)
    if not quiet:
        for r in payload["roots"]:
            print(r)
        if not solutions:
            print("no roots in the scanned range")
    return 0


def cmd_rate(cfg: RunConfig, out: Path, fmt: str, grid, quiet: bool) -> int:
    pc = _process_config(cfg, grid_override=grid)
    problem = _rate_problem(cfg, pc)
    payload = _summary(cfg, "rate")
    if pc.seeded:
        pairs = seeded_pairs_per_pulse(problem, pc)
        payload["pairs_per_pulse"] = repr(pairs)
        if pc.repetition_rate is not None:
            payload["pairs_per_second"] = repr(pairs * pc.repetition_rate)
    else:
        payload["rate_hz"] = repr(spontaneous_rate(problem, pc))
    payload["a_eff_source"] = problem.a_eff_source
    payload["pump_wavelength_nm"] = repr(pc.pump_wavelength * 1e9)
    _write_json(payload, out / "rate.json", quiet)
    if not quiet:
        key = "pairs_per_pulse" if pc.seeded else "rate_hz"
        print(f"{key} = {payload[key]}")
    return 0


def cmd_spectral_density(cfg: RunConfig, out: Path, fmt: str, grid,
                         quiet: bool) -> int:
    pc = _process_config(cfg, grid_override=grid)
    sweep = cfg.raw.get("sweep")
    if sweep:
        parameter = cfg.field(sweep, "parameter", "sweep")
        values = cfg.field(sweep, "values", "sweep")
    else:
        parameter, values = None, [None]
    plat = _platform(cfg)
    for value in values:
        cfg_run = cfg
        if parameter == "diameter":
            plat_run = dict(plat, diameter_m=value)
        elif parameter == "pressure":
            plat_run = dict(plat, pressure_pa=value)
        elif parameter is None:
            plat_run = plat
        else:
            raise ConfigError(f"unknown sweep parameter {parameter!r}")
        cfg_run.raw["platform"] = plat_run
        problem = _rate_problem(cfg_run, pc)
        grid_obj = (seeded_grid(problem, pc) if pc.seeded
                    else spontaneous_grid(problem, pc))
        if value is None:
            stem = "spectral"
        else:
            stem = f"spectral_{parameter}_{value:.6g}"
        grid_obj.provenance["config_sha256"] = cfg.hashes["config"]
        if value is not None:
            grid_obj.provenance["sweep_parameter"] = parameter
            grid_obj.provenance["sweep_value"] = repr(float(value))
        if fmt in ("csv", "both"):
            grid_obj.to_csv(out / f"{stem}.csv")
            if not quiet:
                print(f"wrote {out / (stem + '.csv')}")
        if fmt in ("json", "both"):
            grid_obj.to_json(out / f"{stem}.json")
            if not quiet:
                print(f"wrote {out / (stem + '.json')}")
    cfg.raw["platform"] = plat
    return 0


def cmd_taper_check(cfg: RunConfig, out: Path, fmt: str, grid,
                    quiet: bool) -> int:
    sec = cfg.section("taper_check")
    profile_path = cfg._resolve(cfg.field(sec, "profile", "taper_check"))
    cfg.hashes["profile"] = _sha256(profile_path)
    profile = read_profile(profile_path)
    lam_p = cfg.field(sec, "pump_wavelength_m", "taper_check")
    pairs = default_taper_pairs(lam_p, db=cfg.db)
    report = check_profile(profile, pairs)
    payload = {**_summary(cfg, "taper-check"), **report.to_json_dict()}
    _write_json(payload, out / "taper_report.json", quiet)
    if not quiet:
        print(f"passed = {report.passed}, worst margin = "
              f"{report.worst_margin:.3g}")
    return 0


# ---------------------------------------------------------------------------
# entry point

_COMMANDS = {
    "modes": cmd_modes,
    "phase-match": cmd_phase_match,
    "rate": cmd_rate,
    "spectral-density": cmd_spectral_density,
    "taper-check": cmd_taper_check,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="topdc",
        description="Design and estimation toolkit for photon-triplet "
                    "generation in fibers",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default=".")
    parser.add_argument("--format", choices=("csv", "json", "both"),
                        default="both")
    parser.add_argument("--grid", type=int, default=None,
                        help="override grid resolution (points per axis)")
    parser.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    if args.grid is not None and args.grid < 2:
        print("error: --grid must be >= 2", file=sys.stderr)
        return 2
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        cfg = RunConfig(Path(args.config))
        return _COMMANDS[args.command](cfg, out, args.format, args.grid,
                                       args.quiet)
    except (ConfigError, UnknownSpecies, ParseError,
            MonotonicityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TopdcError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
