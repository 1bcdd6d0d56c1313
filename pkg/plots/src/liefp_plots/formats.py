"""Readers for the delimited export formats produced by the liefp CLI.

These parse the documented file schemas directly; the plots never import the
solver package.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

MOMENT_HEADER = (
    ["t"]
    + [f"mR{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3)]
    + ["b3x", "b3y", "b3z", "dispR1", "dispR2", "mO1", "mO2", "sO1", "sO2"]
)


def read_b3_marginal(path):
    """b3 marginal triples -> (alpha, beta, values[n_alpha, n_beta])."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if next(reader) != ["alpha", "beta", "value"]:
            raise ValueError(f"{path}: not a b3 marginal export")
        for row in reader:
            rows.append([float(x) for x in row])
    arr = np.array(rows)
    alpha = np.unique(arr[:, 0])
    beta = np.unique(arr[:, 1])
    return alpha, beta, arr[:, 2].reshape(alpha.size, beta.size)


def read_omega_marginal(path):
    """Omega marginal matrix -> (omega_axis, values[n, n])."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or "omega1" not in header[0]:
            raise ValueError(f"{path}: not an omega marginal export")
        om2 = np.array([float(x) for x in header[1:]])
        rows = [[float(x) for x in row] for row in reader]
    arr = np.array(rows)
    return om2, arr[:, 1:]


def read_moments(path):
    """Moments CSV -> dict of column arrays plus stacked mean_R (N, 3, 3)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != MOMENT_HEADER:
            raise ValueError(f"{path}: not a moments export")
        data = np.array([[float(x) for x in row] for row in reader])
    if data.size == 0:
        raise ValueError(f"{path}: empty moments export")
    return {
        "t": data[:, 0],
        "mean_R": data[:, 1:10].reshape(-1, 3, 3),
        "b3": data[:, 10:13],
        "disp": data[:, 13:15],
        "mean_omega": data[:, 15:17],
        "std_omega": data[:, 17:19],
    }


def rotation_angle_between(r_a: np.ndarray, r_b: np.ndarray) -> np.ndarray:
    """Geodesic distance between paired rotation matrices, radians."""
    prod = np.einsum("nji,njk->nik", r_a, r_b)
    tr = np.clip((prod[:, 0, 0] + prod[:, 1, 1] + prod[:, 2, 2] - 1) / 2, -1, 1)
    return np.arccos(tr)


def marginal_files(root, prefix: str, times=None):
    """Matching exported marginal files under `root`, optionally filtered to
    the requested times; returns [(t, path)] sorted by time."""
    root = Path(root)
    found = []
    for path in sorted(root.glob(f"{prefix}_t*.csv")):
        try:
            t = float(path.stem.split("_t")[1])
        except (IndexError, ValueError):
            continue
        if times is None or any(abs(t - x) < 5e-4 for x in times):
            found.append((t, path))
    return found
