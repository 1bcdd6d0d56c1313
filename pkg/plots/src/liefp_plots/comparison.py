"""Eight-panel comparison of the spectral propagation against Monte Carlo:
mean attitude and b3 differences, attitude dispersion, angular-velocity mean
and dispersion, each with its difference panel."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .formats import read_moments, rotation_angle_between


def render(spectral_csv, mc_csv, out_path) -> None:
    spec = read_moments(spectral_csv)
    mc = read_moments(mc_csv)
    if spec["t"].shape != mc["t"].shape or not np.allclose(spec["t"], mc["t"]):
        raise ValueError("moment series have different time stamps")
    t = spec["t"]
    deg = 180 / np.pi

    fig, axes = plt.subplots(4, 2, figsize=(10, 12))

    ax = axes[0, 0]
    ax.plot(t, deg * rotation_angle_between(spec["mean_R"], mc["mean_R"]), "k-")
    ax.set_ylabel("mean attitude diff [deg]")

    ax = axes[0, 1]
    cosang = np.clip(np.sum(spec["b3"] * mc["b3"], axis=1), -1, 1)
    ax.plot(t, deg * np.arccos(cosang), "k-")
    ax.set_ylabel("mean $b_3$ diff [deg]")

    ax = axes[1, 0]
    for j, style in [(0, "-"), (1, "--")]:
        ax.plot(t, spec["disp"][:, j], "b" + style, label=f"spectral axis {j+1}")
        ax.plot(t, mc["disp"][:, j], "r" + style, label=f"MC axis {j+1}")
    ax.set_ylabel("attitude dispersion [rad]")
    ax.legend(fontsize=7)

    axes[1, 1].plot(t, spec["disp"] - mc["disp"])
    axes[1, 1].set_ylabel("dispersion diff [rad]")

    ax = axes[2, 0]
    for j, style in [(0, "-"), (1, "--")]:
        ax.plot(t, spec["mean_omega"][:, j], "b" + style)
        ax.plot(t, mc["mean_omega"][:, j], "r" + style)
    ax.set_ylabel(r"mean $\Omega$ [rad/s]")

    axes[2, 1].plot(t, spec["mean_omega"] - mc["mean_omega"])
    axes[2, 1].set_ylabel(r"mean $\Omega$ diff [rad/s]")

    ax = axes[3, 0]
    for j, style in [(0, "-"), (1, "--")]:
        ax.plot(t, spec["std_omega"][:, j], "b" + style)
        ax.plot(t, mc["std_omega"][:, j], "r" + style)
    ax.set_ylabel(r"$\Omega$ dispersion [rad/s]")

    axes[3, 1].plot(t, spec["std_omega"] - mc["std_omega"])
    axes[3, 1].set_ylabel(r"$\Omega$ dispersion diff [rad/s]")

    for ax in axes.ravel():
        ax.set_xlabel("t [s]")
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--in", dest="inp", required=True, nargs=2,
                        metavar=("SPECTRAL", "MC"),
                        help="moments.csv and mc_moments.csv")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        render(args.inp[0], args.inp[1], out / "comparison.png")
    except (OSError, ValueError) as exc:
        print(f"cannot render comparison: {exc}", file=sys.stderr)
        return 1
    print(f"rendered comparison panels into {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
