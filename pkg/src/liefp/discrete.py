"""Quadrature-collocation propagation of the jump part of the density
evolution.

For attitude-preserving reset kernels the gain integral collapses to the
angular-velocity grid at each attitude point: with source quadrature weight
w' = L^2/(2n0)^2,

    dp(nu, mu, s+)/dt = sum_{s-, mu'} w' kappa~(nu; mu' -> mu) lambda(nu, mu')
                        p(nu, mu', s-)  -  lambda(nu, mu, s+) p(nu, mu, s+).

The discretized kernel is truncated (per source column, entries below
1e-14 of the column peak) and then renormalized so that each source column
has unit mass under w', which makes the forward-Euler step conserve total
probability to rounding and preserve positivity whenever dt * max(lambda) <= 1.
Attitude points where the rate vanishes for every angular velocity are
flagged inactive and skipped.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import NumericalError
from .model import GshsModel
from .transform import GridDensity
from .workspace import HarmonicWorkspace

KERNEL_TRUNCATION = 1e-14


@dataclass
class JumpOperator:
    """Precomputed gain/loss structure, reused every step."""

    ws: HarmonicWorkspace
    n_modes: int
    active: np.ndarray                # (K,) flat attitude indices with any rate
    rate_active: np.ndarray           # (n_modes, K, MM) rates on active points
    gain: dict                        # {(s-, s+): csr (K*MM, K*MM)} incl. w'λ
    max_rate: float

    @property
    def n_active(self) -> int:
        return int(self.active.size)

    def column_sums(self, s_minus: int) -> np.ndarray:
        """Summed gain per source column, equal to w' * lambda after kernel
        renormalization; exposed for the probability-balance checks."""
        total = np.zeros(self.n_active * (2 * self.ws.band.n0) ** 2)
        for (sm, sp_), mat in self.gain.items():
            if sm == s_minus:
                total += np.asarray(mat.sum(axis=0)).ravel()
        return total


def build_jump_operator(model: GshsModel, ws: HarmonicWorkspace) -> JumpOperator:
    """Assemble the collocation operator for an attitude-preserving model."""
    if not model.attitude_preserving:
        raise NotImplementedError(
            "only attitude-preserving reset kernels have a collocation path"
        )
    mm = (2 * ws.band.n0) ** 2
    if not model.has_jumps:
        return JumpOperator(ws, model.n_modes, np.empty(0, dtype=int),
                            np.empty((model.n_modes, 0, mm)), {}, 0.0)

    rots = ws.rotation_matrices.reshape(-1, 3, 3)
    om = ws.torus.omega
    om1, om2 = np.meshgrid(om, om, indexing="ij")
    om_grid = np.stack([om1.ravel(), om2.ravel()], axis=-1)
    w_leb = ws.torus.w_leb

    lam = np.stack([
        model.rate(rots[:, None, :, :], om_grid[None, :, :], s)
        for s in range(model.n_modes)
    ])                                              # (n_modes, A^3, MM)
    if np.any(lam < 0):
        raise ValueError("negative jump rate")
    active = np.flatnonzero(lam.max(axis=(0, 2)) > 0)
    lam_active = np.ascontiguousarray(lam[:, active, :])
    max_rate = float(lam.max()) if lam.size else 0.0

    # per mode pair, block-diagonal-over-attitude sparse gain matrices
    triplets: dict[tuple, list] = {}
    for s_minus in range(model.n_modes):
        for k, ia in enumerate(active):
            src = np.flatnonzero(lam_active[s_minus, k] > 0)
            if src.size == 0:
                continue
            cols = model.kernel_columns(ws, s_minus, rots[ia], src)
            for val in cols.values():
                if np.any(val < 0):
                    raise ValueError("negative kernel density")
            # truncate per source column relative to its peak across targets
            peak = np.zeros(src.size)
            for val in cols.values():
                peak = np.maximum(peak, val.max(axis=0))
            for s_plus, val in cols.items():
                val[val < KERNEL_TRUNCATION * peak[None, :]] = 0.0
            # renormalize each source column to unit mass under w'
            mass = sum(w_leb * val.sum(axis=0) for val in cols.values())
            dead = mass <= 0.0
            if np.any(dead):
                # reset target falls outside the representable angular-velocity
                # window (possible for |Omega| > L corner states, where the
                # bounded-window premise fails anyway): drop the jump there so
                # dead sources keep their mass instead of leaking it
                lam_active[s_minus, k, src[dead]] = 0.0
                src = src[~dead]
                if src.size == 0:
                    continue
                cols = {sp_: val[:, ~dead] for sp_, val in cols.items()}
                mass = mass[~dead]
            lam_w = w_leb * lam_active[s_minus, k, src]
            for s_plus, val in cols.items():
                rows_local, col_local = np.nonzero(val)
                # normalize before scaling: kernel values and column masses can
                # both be tiny (far sub-cell kernels), their ratio is tame
                data = (val[rows_local, col_local] / mass[col_local]
                        * lam_w[col_local])
                key = (s_minus, int(s_plus))
                triplets.setdefault(key, [[], [], []])
                triplets[key][0].append(data)
                triplets[key][1].append(k * mm + rows_local)
                triplets[key][2].append(k * mm + src[col_local])

    size = active.size * mm
    gain = {}
    for key, (data, rows, cols_) in triplets.items():
        gain[key] = sp.csr_matrix(
            (np.concatenate(data),
             (np.concatenate(rows), np.concatenate(cols_))),
            shape=(size, size),
        )
    return JumpOperator(ws, model.n_modes, active, lam_active, gain, max_rate)


def step(op: JumpOperator, p: GridDensity, dt: float) -> GridDensity:
    """One forward-Euler step of the collocation ODE system."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if op.max_rate * dt >= 1.0:
        raise NumericalError(
            f"forward-Euler bound violated: dt*max(lambda) = "
            f"{op.max_rate * dt:.3f} must stay below 1"
        )
    if op.n_active == 0 or dt == 0.0:
        return p.copy()
    mm = (2 * op.ws.band.n0) ** 2
    vals = p.values.reshape(p.n_modes, -1, mm)
    out = p.values.copy()
    out_view = out.reshape(p.n_modes, -1, mm)

    src_vecs = [vals[s, op.active, :].ravel() for s in range(op.n_modes)]
    for (s_minus, s_plus), mat in op.gain.items():
        gain = (mat @ src_vecs[s_minus]).reshape(op.n_active, mm)
        out_view[s_plus, op.active, :] += dt * gain
    for s in range(op.n_modes):
        out_view[s, op.active, :] -= dt * op.rate_active[s] * vals[s, op.active, :]
    return GridDensity(p.ws, out)
