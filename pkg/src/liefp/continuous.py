"""Spectral propagation of the advection-diffusion part of the density
evolution.

Per discrete mode, the coefficient vector obeys the linear ODE

    dF^{l,n}/dt = - sum_j  (coefficients of L_j(a_j p))
                  + sum_{j,k} D_jk v^n(e_j) v^n(e_k) F^{l,n},

where the attitude-axis drift terms use a_1 = Omega_1, a_2 = Omega_2 and the
angular-velocity drift splits into an attitude-dependent force minus linear
damping.  The Omega_j products support two strategies: pointwise grid
multiplication followed by re-analysis (default; the angular-velocity values
are exact at the nodes, aliasing only at the band edge) or the truncated
torus convolution with the analytic sawtooth coefficients of Omega,
i * L * (-1)^n / (pi n) (the partial sawtooth series ripples mid-window,
which measurably inflates dispersion errors at desk bandwidths).  Every term
carries a derivative factor, so the constant coefficient - and with it total
probability - is a fixed point of the right-hand side by construction.

Time stepping: fixed-step classical RK4 (default) or forward Euler, carried
out in coefficient space with one grid round-trip per stage for the products.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .model import GshsModel
from .transform import (
    GridDensity,
    convolution_matrix,
    convolve_axis,
    forward_real,
    inverse_real,
)
from .workspace import HarmonicWorkspace

log = logging.getLogger(__name__)

RK4_IMAG_STABILITY = 2.828  # |dt * eigenvalue| bound on the imaginary axis


def sawtooth_coefficients(ws: HarmonicWorkspace) -> np.ndarray:
    """Torus Fourier coefficients of Omega_j on [-L, L): i L (-1)^n/(pi n)."""
    n = ws.n_signed.astype(float)
    c = np.zeros(2 * ws.band.n0, dtype=complex)
    nz = n != 0
    c[nz] = 1j * ws.band.L * (-1.0) ** n[nz] / (np.pi * n[nz])
    return c


class ContinuousStepper:
    """Fixed-step integrator for the continuous part of one model."""

    def __init__(self, ws: HarmonicWorkspace, model: GshsModel, dt: float,
                 scheme: str = "rk4", mass_tol: float = 1e-8,
                 omega_product: str = "grid"):
        if dt < 0:
            raise ValueError("dt must be nonnegative")
        if scheme not in ("rk4", "euler"):
            raise ValueError("scheme must be 'rk4' or 'euler'")
        if omega_product not in ("convolution", "grid"):
            raise ValueError("omega_product must be 'convolution' or 'grid'")
        self.ws = ws
        self.model = model
        self.dt = dt
        self.scheme = scheme
        self.mass_tol = mass_tol
        self.omega_product = omega_product
        om = ws.torus.omega
        self._omega_grids = (om[:, None], om[None, :])

        self._conv_omega = convolution_matrix(sawtooth_coefficients(ws))
        # v^n(e_j) expanded over the whole flat coefficient layout so the
        # derivative factors are single vectorized multiplies
        self._v1_flat = _flat_n_factor(ws, ws.v_factor[:, None]
                                       * np.ones((1, 2 * ws.band.n0)))
        self._v2_flat = _flat_n_factor(ws, np.ones((2 * ws.band.n0, 1))
                                       * ws.v_factor[None, :])

        self._force = []      # per mode: (2, A, A, A) or None
        self._diff_flat = []  # per mode: (n_coeff,) real <= 0 or None
        for dyn in model.continuous:
            if dyn.attitude_force is not None:
                self._force.append(np.ascontiguousarray(dyn.attitude_force(ws)))
            else:
                self._force.append(None)
            if dyn.diffusion is not None:
                d = np.asarray(dyn.diffusion)
                n1 = ws.n_signed[:, None].astype(float)
                n2 = ws.n_signed[None, :].astype(float)
                quad = (d[0, 0] * n1**2 + (d[0, 1] + d[1, 0]) * n1 * n2
                        + d[1, 1] * n2**2)
                factor = -((np.pi / ws.band.L) ** 2) * quad
                self._diff_flat.append(_flat_n_factor(ws, factor))
                lam = float(np.max(np.abs(factor)))
                if dt * lam > RK4_IMAG_STABILITY:
                    warnings.warn(
                        f"diffusion stiffness dt*|lambda| = {dt * lam:.2f} "
                        f"exceeds the RK4 stability bound ~{RK4_IMAG_STABILITY}",
                        RuntimeWarning,
                    )
            else:
                self._diff_flat.append(None)

    # -- right-hand side -----------------------------------------------------

    def _mode_rhs(self, coeffs: np.ndarray, p_grid: np.ndarray,
                  s: int) -> np.ndarray:
        """dF/dt for one mode; `p_grid` must be the synthesis of `coeffs`."""
        ws = self.ws
        dyn = self.model.continuous[s]
        out = np.empty_like(coeffs)

        conv1 = conv2 = None
        if dyn.kinematic_so3 or dyn.damping is not None:
            if self.omega_product == "convolution":
                conv1 = convolve_axis(ws, coeffs, self._conv_omega, 0)
                conv2 = convolve_axis(ws, coeffs, self._conv_omega, 1)
            else:
                conv1 = forward_real(ws, self._omega_grids[0] * p_grid)
                conv2 = forward_real(ws, self._omega_grids[1] * p_grid)

        if dyn.kinematic_so3:
            # - L_1(Omega_1 p) - L_2(Omega_2 p): right-derivative per block
            for l in range(ws.band.l0):
                b1 = ws.block(conv1, l)
                b2 = ws.block(conv2, l)
                acc = np.matmul(b1, ws.u_ops[l][0].T)
                acc += np.matmul(b2, ws.u_ops[l][1].T)
                np.negative(acc, out=ws.block(out, l))
        else:
            out[:] = 0.0

        scratch = np.empty_like(coeffs)
        force = self._force[s]
        if force is not None:
            # single-shot transforms: batched small-stack FFTs are slower
            # than two plain ones on this layout
            f1 = forward_real(ws, force[0, :, :, :, None, None] * p_grid)
            f2 = forward_real(ws, force[1, :, :, :, None, None] * p_grid)
            out -= np.multiply(self._v1_flat, f1, out=f1)
            out -= np.multiply(self._v2_flat, f2, out=f2)
        if dyn.damping is not None:
            np.multiply(dyn.damping[0] * self._v1_flat, conv1, out=scratch)
            out += scratch
            np.multiply(dyn.damping[1] * self._v2_flat, conv2, out=scratch)
            out += scratch
        if self._diff_flat[s] is not None:
            np.multiply(self._diff_flat[s], coeffs, out=scratch)
            out += scratch
        return out

    def rhs(self, p: GridDensity, t: float, s: int) -> np.ndarray:
        """Spectral time derivative of mode s evaluated from grid values."""
        coeffs = forward_real(self.ws, p.values[s])
        d = self._mode_rhs(coeffs, p.values[s], s)
        if not np.all(np.isfinite(d)):
            raise NumericalError(f"non-finite RHS at t={t}, mode {s}")
        return d

    # -- stepping -------------------------------------------------------------

    def step(self, p: GridDensity, t: float,
             coeffs: np.ndarray | None = None) -> GridDensity:
        """Advance the grid density by one dt over the continuous dynamics.

        `coeffs`, if given, must be forward_real(p.values); callers that
        already transformed the state (e.g. for diagnostics) pass it to skip
        the duplicate analysis.  The updated state is returned as real grid
        values only: synthesizing and re-analyzing per step projects out the
        non-Hermitian part, which keeps the recursion stable.
        """
        if self.dt == 0.0:
            return p.copy()
        ws = self.ws
        dt = self.dt
        out = np.empty_like(p.values)
        for s in range(self.model.n_modes):
            f0 = coeffs[s] if coeffs is not None else forward_real(ws, p.values[s])
            mass0 = _constant_coeff(ws, f0)
            if self.scheme == "euler":
                k1 = self._mode_rhs(f0, p.values[s], s)
                f1 = f0 + dt * k1
            else:
                k1 = self._mode_rhs(f0, p.values[s], s)
                fa = f0 + 0.5 * dt * k1
                k2 = self._mode_rhs(fa, inverse_real(ws, fa), s)
                fb = f0 + 0.5 * dt * k2
                k3 = self._mode_rhs(fb, inverse_real(ws, fb), s)
                fc = f0 + dt * k3
                k4 = self._mode_rhs(fc, inverse_real(ws, fc), s)
                f1 = f0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            mass1 = _constant_coeff(ws, f1)
            if abs(mass1 - mass0) > self.mass_tol * max(1.0, abs(mass0)):
                raise NumericalError(
                    f"probability drift {abs(mass1 - mass0):.2e} in one "
                    f"continuous step at t={t}, mode {s}"
                )
            out[s] = inverse_real(ws, f1)
            if not np.all(np.isfinite(out[s])):
                raise NumericalError(f"non-finite density after step at t={t}")
        return GridDensity(ws, out)


def _constant_coeff(ws: HarmonicWorkspace, coeffs: np.ndarray) -> float:
    n0 = ws.band.n0
    return float(ws.block(coeffs, 0)[n0, n0, 0, 0].real)


def _flat_n_factor(ws: HarmonicWorkspace, factor_2d: np.ndarray) -> np.ndarray:
    """Expand an (2n0, 2n0) per-frequency factor over the flat layout."""
    out = np.empty(ws.n_coeff, dtype=factor_2d.dtype)
    for l in range(ws.band.l0):
        ws.block(out, l)[...] = factor_2d[:, :, None, None]
    return out
