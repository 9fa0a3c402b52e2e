"""Render ifm-cavity tables with matplotlib.

usage: python scripts/plot.py OUT_DIR

Plots whatever of sweep_xi.csv, security_curve.csv and the param_map_*.csv
files exist in OUT_DIR and saves PNGs next to them.
"""

import csv
import sys
from pathlib import Path

import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def sweep_xi(out):
    data = read(out / "sweep_xi.csv")
    fig, ax = plt.subplots()
    for n0 in sorted(set(data["n0"])):
        idx = [i for i, v in enumerate(data["n0"]) if v == n0]
        xi = [data["xi"][i] for i in idx]
        ax.plot(xi, [data["eta_tot"][i] for i in idx], "k", label=f"eta_tot N0={n0:g}")
        ax.plot(xi, [data["snr1"][i] for i in idx], "b", label=f"SNR refl N0={n0:g}")
        ax.plot(xi, [data["snr2"][i] for i in idx], "r", label=f"SNR trans N0={n0:g}")
    ax.set_xlabel("xi")
    ax.legend(fontsize="small")
    fig.savefig(out / "sweep_xi.png", dpi=150)


def security_curve(out):
    data = read(out / "security_curve.csv")
    fig, ax = plt.subplots()
    ax.plot(data["snr"], data["eta_tot_reflection"], "b", label="reflection")
    ax.plot(data["snr"], data["eta_tot_transmission"], "r", label="transmission")
    ax.set_xlabel("SNR")
    ax.set_ylabel("eta_tot")
    ax.legend()
    fig.savefig(out / "security_curve.png", dpi=150)


def param_map(path):
    data = read(path)
    ks = sorted(set(data["kappa3"]))
    ds = sorted(set(data["deltaP"]))
    grid = [[0.0] * len(ks) for _ in ds]
    for k, d, v in zip(data["kappa3"], data["deltaP"], data["value"]):
        grid[ds.index(d)][ks.index(k)] = v
    fig, ax = plt.subplots()
    mesh = ax.pcolormesh(ks, ds, grid, shading="nearest")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("kappa_3 / 2pi (Hz)")
    ax.set_ylabel("Delta_P / 2pi (Hz)")
    fig.colorbar(mesh, ax=ax, label=path.stem)
    fig.savefig(path.with_suffix(".png"), dpi=150)


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
    if (out / "sweep_xi.csv").exists():
        sweep_xi(out)
    if (out / "security_curve.csv").exists():
        security_curve(out)
    for path in sorted(out.glob("param_map_*.csv")):
        param_map(path)


if __name__ == "__main__":
    main()
