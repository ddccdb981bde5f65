#!/usr/bin/env python3
"""Export joint spectral density maps across phase-matching sweeps.

Runs the shipped taper-diameter and hollow-core-pressure sweeps and
prints the emission topology of each grid (single degenerate island vs
split structure) along with the wavelength extent of the peak region.

Usage:
    python scripts/emission_maps.py [--out results/maps] [--grid 401]
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent


def summarize(out_dir: Path):
    from scipy.constants import c

    for path in sorted(out_dir.glob("spectral_*.json")):
        payload = json.loads(path.read_text())
        values = np.array([[float(v) for v in row]
                           for row in payload["values"]])
        omega1 = np.array([float(v) for v in payload["omega1_rad_s"]])
        peak = values >= 0.5 * values.max()
        cols = np.where(peak.any(axis=0))[0]
        lam = 2 * np.pi * c / omega1
        extent = abs(lam[cols.max()] - lam[cols.min()])
        sweep = payload["provenance"].get("sweep_value", "?")
        omega_deg = (2 * np.pi * c
                     / (3 * float(payload["provenance"]["pump_wavelength_m"])))
        k = int(np.argmin(np.abs(omega1 - omega_deg)))
        degenerate = bool(peak[k, k])
        print(f"  sweep={sweep}: degenerate={degenerate}, "
              f"peak extent = {extent * 1e9:.1f} nm")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/maps")
    ap.add_argument("--grid", type=int, default=401)
    args = ap.parse_args()

    for name in ("taper_sweep", "hollow_sweep"):
        out = Path(args.out) / name
        print(f"{name}:")
        r = subprocess.run(
            [sys.executable, "-m", "topdc.cli", "spectral-density",
             "--config", str(REPO / "configs" / f"{name}.toml"),
             "--out", str(out), "--grid", str(args.grid), "--quiet"],
        )
        if r.returncode != 0:
            print(f"  FAILED (exit {r.returncode})")
            continue
        summarize(out)


if __name__ == "__main__":
    main()
