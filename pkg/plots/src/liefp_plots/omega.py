"""Heatmaps of the angular-velocity marginal from omega marginal exports."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .formats import marginal_files, read_omega_marginal


def render(path, out_path, cmap="viridis") -> None:
    om, values = read_omega_marginal(path)
    step = om[1] - om[0]
    edges = np.concatenate([om - step / 2, [om[-1] + step / 2]])
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    mesh = ax.pcolormesh(edges, edges, values.T, cmap=cmap, shading="flat")
    ax.set_xlabel(r"$\Omega_1$ [rad/s]")
    ax.set_ylabel(r"$\Omega_2$ [rad/s]")
    ax.set_title(Path(path).stem.replace("omega_t", "angular velocity, t = ")
                 + " s")
    fig.colorbar(mesh, ax=ax)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--in", dest="inp", required=True,
                        help="marginal export directory or a single omega CSV")
    parser.add_argument("--out", required=True)
    parser.add_argument("--times", help="comma-separated times to render")
    parser.add_argument("--cmap", default="viridis")
    args = parser.parse_args(argv)

    times = [float(x) for x in args.times.split(",")] if args.times else None
    src = Path(args.inp)
    jobs = [(0.0, src)] if src.is_file() else marginal_files(src, "omega", times)
    if not jobs:
        print(f"no omega marginal files under {src}", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for t, path in jobs:
        try:
            render(path, out / (path.stem + ".png"), cmap=args.cmap)
        except (OSError, ValueError) as exc:
            print(f"cannot render {path}: {exc}", file=sys.stderr)
            return 1
    print(f"rendered {len(jobs)} omega figure(s) into {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
