"""Regenerate the packaged sample delay scans.

Synthetic data from the forward model with the default configuration:
gaussian 700 kHz detuning distribution, offsets 0.07 / 0.03 / 0.0 at
1 / 2 / 3 MHz, 1% multiplicative noise, electronics floor at -14 dB added
back in so the analysis pipeline exercises the subtraction step.  The
seed is fixed; rerunning reproduces the shipped files byte for byte.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from squeezekit.config import load_config, default_config_path
from squeezekit.fitting import synthesize_scan

SEED = 20240817
OFFSETS = {1e6: 0.07, 2e6: 0.03, 3e6: 0.0}


def main() -> None:
    cfg = load_config(default_config_path())
    p = cfg.scaled_params()
    shape = cfg.laser_lineshape()
    grid = cfg.delay_grid_m()
    rng = np.random.default_rng(SEED)
    out_dir = default_config_path().parent

    for freq, offset in OFFSETS.items():
        scan = synthesize_scan(
            p,
            shape,
            demod_freq_hz=freq,
            excess_fiber_m=grid,
            offset_linear=offset,
            noise_frac=0.01,
            rng=rng,
            group_index=cfg.scan.group_index,
            electronics_floor_db=cfg.detection.electronics_floor_db,
        )
        path = out_dir / f"sample_scan_{freq / 1e6:.10g}mhz.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("excess_fiber_m", "noise_db", "std_dev_db"))
            for row in zip(scan.excess_fiber_m, scan.noise_db, scan.std_dev_db):
                writer.writerow([repr(float(v)) for v in row])
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
