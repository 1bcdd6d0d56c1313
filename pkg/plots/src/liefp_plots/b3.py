"""Sphere-shaded marginal of the pendulum symmetry axis, viewed from below.

The b3 marginal export parameterizes the direction sphere by the first two
Euler angles: b3 = (cos(alpha) sin(beta), sin(alpha) sin(beta), cos(beta)).
The bottom view projects the lower hemisphere onto the (x, y) plane, scaled
by the pendulum length so the wall can be drawn at its physical offset.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .formats import marginal_files, read_b3_marginal

PENDULUM_LENGTH = 0.2016  # sqrt(h^2 + r^2) of the reference geometry, m
WALL_X = 0.12


def shading_points(alpha: np.ndarray, beta: np.ndarray, values: np.ndarray,
                   hemisphere: str = "lower"):
    """Projected (x, y) points and their shades for one hemisphere.

    Returns (points (N, 2), shades (N,), direction (N, 3)); the direction of
    the maximum shade is the mode of the marginal.
    """
    a, b = np.meshgrid(alpha, beta, indexing="ij")
    b3 = np.stack([np.cos(a) * np.sin(b), np.sin(a) * np.sin(b), np.cos(b)],
                  axis=-1)
    mask = b3[..., 2] <= 0 if hemisphere == "lower" else b3[..., 2] >= 0
    pts = b3[mask][:, :2]
    shades = values[mask]
    return pts, shades, b3[mask]


def max_shade_direction(alpha, beta, values) -> np.ndarray:
    """Direction of the largest marginal value over the whole sphere."""
    a, b = np.meshgrid(alpha, beta, indexing="ij")
    i = np.unravel_index(np.argmax(values), values.shape)
    aa, bb = a[i], b[i]
    return np.array([np.cos(aa) * np.sin(bb), np.sin(aa) * np.sin(bb),
                     np.cos(bb)])


def render(path, out_path, cmap="viridis", wall: bool = True,
           length: float = PENDULUM_LENGTH, wall_x: float = WALL_X) -> None:
    alpha, beta, values = read_b3_marginal(path)
    pts, shades, _ = shading_points(alpha, beta, values)

    fig, ax = plt.subplots(figsize=(5, 5))
    sc = ax.scatter(length * pts[:, 0], length * pts[:, 1], c=shades,
                    cmap=cmap, s=36, marker="o")
    circle = plt.Circle((0, 0), length, fill=False, color="0.6", lw=0.8)
    ax.add_patch(circle)
    if wall:
        ax.axvline(wall_x, color="0.5", lw=4, alpha=0.6)
    ax.set_xlim(-1.15 * length, 1.15 * length)
    ax.set_ylim(-1.15 * length, 1.15 * length)
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(Path(path).stem.replace("b3_t", "b3 marginal, t = ") + " s")
    fig.colorbar(sc, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--in", dest="inp", required=True,
                        help="marginal export directory or a single b3 CSV")
    parser.add_argument("--out", required=True, help="image output directory")
    parser.add_argument("--times", help="comma-separated times to render")
    parser.add_argument("--cmap", default="viridis")
    parser.add_argument("--no-wall", action="store_true",
                        help="skip the wall plane")
    parser.add_argument("--length", type=float, default=PENDULUM_LENGTH)
    parser.add_argument("--wall-x", type=float, default=WALL_X)
    args = parser.parse_args(argv)

    times = [float(x) for x in args.times.split(",")] if args.times else None
    src = Path(args.inp)
    if src.is_file():
        jobs = [(0.0, src)]
    else:
        jobs = marginal_files(src, "b3", times)
    if not jobs:
        print(f"no b3 marginal files under {src}", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for t, path in jobs:
        try:
            render(path, out / (path.stem + ".png"), cmap=args.cmap,
                   wall=not args.no_wall, length=args.length,
                   wall_x=args.wall_x)
        except (OSError, ValueError) as exc:
            print(f"cannot render {path}: {exc}", file=sys.stderr)
            return 1
    print(f"rendered {len(jobs)} b3 figure(s) into {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
