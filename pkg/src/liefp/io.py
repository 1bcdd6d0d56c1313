"""File formats: binary density snapshots and the CSV schemas shared by the
propagator, the Monte Carlo sampler, and the plot scripts.

Snapshot container: magic bytes ``LFP1``, then little-endian header
(l0: u32, n0: u32, L: f64, N_s: u32, t: f64), then the density array in
(s, nu1, nu2, nu3, mu1, mu2) row-major float64 order.

CSV headers are stable strings:
  diagnostics: ``t,ptotal,pmin,alias,stepms``
  moments:     ``t,mR11,...,mR33,b3x,b3y,b3z,dispR1,dispR2,mO1,mO2,sO1,sO2``
  compare:     ``t,dR_angle,db3_angle,ddispR1,ddispR2,dmO1,dmO2,dsO1,dsO2``
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .stats import MomentDifference, MomentSummary
from .transform import GridDensity
from .workspace import BandLimit, HarmonicWorkspace

MAGIC = b"LFP1"
_HEADER = struct.Struct("<IIdId")

DIAG_HEADER = ["t", "ptotal", "pmin", "alias", "stepms"]
MOMENT_HEADER = (
    ["t"]
    + [f"mR{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3)]
    + ["b3x", "b3y", "b3z", "dispR1", "dispR2", "mO1", "mO2", "sO1", "sO2"]
)
COMPARE_HEADER = ["t", "dR_angle", "db3_angle", "ddispR1", "ddispR2",
                  "dmO1", "dmO2", "dsO1", "dsO2"]


def save_snapshot(path, p: GridDensity, t: float) -> None:
    band = p.ws.band
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(band.l0, band.n0, band.L, p.n_modes, t))
        fh.write(np.ascontiguousarray(p.values, dtype="<f8").tobytes())


def load_snapshot(path) -> tuple[BandLimit, int, float, np.ndarray]:
    """Read a snapshot; returns (band, n_modes, t, values)."""
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ValueError(f"{path}: not a LFP1 snapshot")
        l0, n0, L, n_modes, t = _HEADER.unpack(fh.read(_HEADER.size))
        shape = (n_modes,) + (2 * l0,) * 3 + (2 * n0,) * 2
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(shape)
    return BandLimit(l0, n0, L), n_modes, t, data.copy()


def attach_workspace(path, ws: HarmonicWorkspace) -> tuple[float, GridDensity]:
    band, _, t, values = load_snapshot(path)
    if band != ws.band:
        raise ValueError(f"snapshot band {band} != workspace band {ws.band}")
    return t, GridDensity(ws, values)


def write_diagnostics(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DIAG_HEADER)
        for d in rows:
            w.writerow([f"{d.t:.6f}", f"{d.total:.12e}", f"{d.min_density:.6e}",
                        f"{d.alias:.6e}", f"{d.step_ms:.3f}"])


def write_moments(path, summaries) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(MOMENT_HEADER)
        for s in summaries:
            row = ([f"{s.t:.6f}"]
                   + [f"{x:.12e}" for x in s.mean_R.ravel()]
                   + [f"{x:.12e}" for x in s.mean_b3]
                   + [f"{x:.12e}" for x in s.att_dispersion]
                   + [f"{x:.12e}" for x in s.mean_omega]
                   + [f"{x:.12e}" for x in s.std_omega])
            w.writerow(row)


def read_moments(path) -> list:
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != MOMENT_HEADER:
            raise ValueError(f"{path}: unexpected moments header")
        for row in reader:
            v = np.array([float(x) for x in row])
            out.append(MomentSummary(
                t=v[0],
                mean_R=v[1:10].reshape(3, 3),
                mean_b3=v[10:13],
                att_dispersion=v[13:15],
                mean_omega=v[15:17],
                std_omega=v[17:19],
            ))
    return out


def write_compare(path, diffs) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COMPARE_HEADER)
        for d in diffs:
            w.writerow([f"{d.t:.6f}", f"{d.attitude_angle:.12e}",
                        f"{d.b3_angle:.12e}",
                        f"{d.d_dispersion[0]:.12e}", f"{d.d_dispersion[1]:.12e}",
                        f"{d.d_mean_omega[0]:.12e}", f"{d.d_mean_omega[1]:.12e}",
                        f"{d.d_std_omega[0]:.12e}", f"{d.d_std_omega[1]:.12e}"])


def write_b3_marginal(path, ws: HarmonicWorkspace, b3_marginal: np.ndarray) -> None:
    """(alpha, beta, value) triples over the (alpha, beta) sphere grid."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["alpha", "beta", "value"])
        for i, a in enumerate(ws.so3.alpha):
            for j, b in enumerate(ws.so3.beta):
                w.writerow([f"{a:.12e}", f"{b:.12e}", f"{b3_marginal[i, j]:.12e}"])


def write_omega_marginal(path, ws: HarmonicWorkspace, om_marginal: np.ndarray) -> None:
    """Dense (2n0)x(2n0) matrix with Omega axis headers: first row lists the
    Omega_2 grid, each data row starts with its Omega_1 value."""
    om = ws.torus.omega
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["omega1\\omega2"] + [f"{x:.6f}" for x in om])
        for i, o1 in enumerate(om):
            w.writerow([f"{o1:.6f}"] + [f"{v:.12e}" for v in om_marginal[i]])


def read_b3_marginal(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (alpha, beta, values) with values shaped (n_alpha, n_beta)."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if next(reader) != ["alpha", "beta", "value"]:
            raise ValueError(f"{path}: unexpected b3 marginal header")
        for row in reader:
            rows.append([float(x) for x in row])
    arr = np.array(rows)
    alpha = np.unique(arr[:, 0])
    beta = np.unique(arr[:, 1])
    vals = arr[:, 2].reshape(alpha.size, beta.size)
    return alpha, beta, vals


def read_omega_marginal(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (omega_axis, values)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        om2 = np.array([float(x) for x in header[1:]])
        rows = [[float(x) for x in row] for row in reader]
    arr = np.array(rows)
    om1 = arr[:, 0]
    if not np.allclose(om1, om2):
        raise ValueError(f"{path}: omega axes disagree")
    return om1, arr[:, 1:]
