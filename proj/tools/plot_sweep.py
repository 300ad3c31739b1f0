#!/usr/bin/env python3
"""Render a sertool sweep CSV as a PNG.

Usage: plot_sweep.py SWEEP.csv [OUT.png]

Picks the rate-like columns automatically (everything except the SNR and
variance columns) and plots them against snr_db.
"""

import csv
import sys


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0] + ".png"

    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        print(f"{path}: no data rows", file=sys.stderr)
        return 2

    skip = {"snr_db", "sigma_z_sq", "certificate_pass",
            "residual_alignment", "residual_spread"}
    columns = [c for c in rows[0] if c not in skip]
    snr = [float(r["snr_db"]) for r in rows]

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for col in columns:
        ax.plot(snr, [float(r[col]) for r in rows], marker="o", ms=3, label=col)
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel("rate / distortion")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
