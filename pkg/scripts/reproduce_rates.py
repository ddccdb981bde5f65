#!/usr/bin/env python3
"""Reproduce the headline rate estimates for all three platforms.

Runs the six shipped rate configs (three spontaneous, three seeded)
through the CLI and prints a small summary table.  Outputs land under
results/rates/<config>/.

Usage:
    python scripts/reproduce_rates.py [--out results/rates]
"""

import argparse
import json
import subprocess
import sys
import time
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
CONFIGS = [
    ("taper_spontaneous", "spontaneous, tapered fiber"),
    ("hybrid_spontaneous", "spontaneous, hybrid intermodal fiber"),
    ("hollow_spontaneous", "spontaneous, Xe-filled hollow core"),
    ("taper_seeded", "seeded, tapered fiber"),
    ("hybrid_seeded", "seeded, hybrid intermodal fiber"),
    ("hollow_seeded", "seeded, Xe-filled hollow core"),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/rates")
    args = ap.parse_args()
    out_root = Path(args.out)

    rows = []
    for name, description in CONFIGS:
        out = out_root / name
        t0 = time.perf_counter()
        r = subprocess.run(
            [sys.executable, "-m", "topdc.cli", "rate",
             "--config", str(REPO / "configs" / f"{name}.toml"),
             "--out", str(out), "--quiet"],
        )
        dt = time.perf_counter() - t0
        if r.returncode != 0:
            print(f"{name}: FAILED (exit {r.returncode})")
            continue
        payload = json.loads((out / "rate.json").read_text())
        if "rate_hz" in payload:
            value = f"{float(payload['rate_hz']):.3g} Hz"
        else:
            value = f"{float(payload['pairs_per_pulse']):.3g} pairs/pulse"
        rows.append((name, description, value, dt))

    width = max(len(r[0]) for r in rows)
    for name, description, value, dt in rows:
        print(f"{name:<{width}}  {value:>20}  ({dt:5.1f} s)  {description}")


if __name__ == "__main__":
    main()
