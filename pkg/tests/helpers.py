"""Shared test oracles, independent of the transform implementation paths
they check."""
from __future__ import annotations

import numpy as np

from liefp.rotations import euler_zyz
from liefp.wigner import wigner_d
from liefp.workspace import HarmonicWorkspace


def basis_on_grid(ws: HarmonicWorkspace, l: int, m1: int, m2: int,
                  n1: int, n2: int) -> np.ndarray:
    """U^l_{m1,m2}(R) V^n(Omega) evaluated on the product grid."""
    g = ws.so3
    d = ws.wigner[l][m1 + l, m2 + l, :]  # over beta
    so3 = (np.exp(-1j * m1 * g.alpha)[:, None, None]
           * d[None, :, None]
           * np.exp(-1j * m2 * g.gamma)[None, None, :])
    om = ws.torus.omega
    tor = (np.exp(1j * np.pi * n1 * om / ws.band.L)[:, None]
           * np.exp(1j * np.pi * n2 * om / ws.band.L)[None, :])
    return so3[..., None, None] * tor[None, None, None, :, :]


def naive_forward(ws: HarmonicWorkspace, values: np.ndarray) -> np.ndarray:
    """Direct five-fold quadrature sum per coefficient; usable at tiny band
    limits only, kept deliberately independent of the separable fast path."""
    out = np.zeros(ws.n_coeff, dtype=complex)
    for l in range(ws.band.l0):
        blk = ws.block(out, l)
        for m1 in range(-l, l + 1):
            for m2 in range(-l, l + 1):
                for i1, n1 in enumerate(ws.n_signed):
                    for i2, n2 in enumerate(ws.n_signed):
                        conj_basis = np.conj(basis_on_grid(ws, l, m1, m2, n1, n2))
                        w = (ws.so3.w_beta[None, :, None, None, None]
                             * ws.torus.w_haar)
                        blk[i1, i2, m1 + l, m2 + l] = np.sum(w * values * conj_basis)
    return out


def synthesize_at(ws: HarmonicWorkspace, coeffs: np.ndarray, rot: np.ndarray,
                  omega: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited function at arbitrary (R, Omega) points.

    rot: (P, 3, 3), omega: (P, 2); returns (P,) complex.  Independent
    pointwise synthesis used as the off-grid oracle.
    """
    alpha, beta, gamma = euler_zyz(rot)
    dmats = wigner_d(ws.band.l0 - 1, beta)  # list over l, (d, d, P)
    npts = rot.shape[0]
    vals = np.zeros(npts, dtype=complex)
    L = ws.band.L
    n = ws.n_signed
    tor = np.exp(1j * np.pi * np.outer(omega[:, 0], n) / L)[:, :, None] \
        * np.exp(1j * np.pi * np.outer(omega[:, 1], n) / L)[:, None, :]  # (P, n1, n2)
    for l in range(ws.band.l0):
        m = np.arange(-l, l + 1)
        ea = np.exp(-1j * np.outer(alpha, m))      # (P, d)
        eg = np.exp(-1j * np.outer(gamma, m))      # (P, d)
        u = ea[:, :, None] * np.moveaxis(dmats[l], -1, 0) * eg[:, None, :]  # (P,d,d)
        blk = ws.block(coeffs, l)                  # (n1, n2, d, d)
        vals += (2 * l + 1) * np.einsum("xyab,pab,pxy->p", blk, u, tor)
    return vals


def random_band_limited(ws: HarmonicWorkspace, rng: np.random.Generator,
                        scale: float = 1.0) -> np.ndarray:
    """Random complex coefficients, flat layout."""
    re = rng.standard_normal(ws.n_coeff)
    im = rng.standard_normal(ws.n_coeff)
    return scale * (re + 1j * im)
