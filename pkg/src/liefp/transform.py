"""Forward/inverse Fourier transforms on SO(3) x T^2 and coefficient-space
operators (derivatives, torus convolution).

Coefficients live in a ragged l-major layout: for each degree l a block of
shape (2n0, 2n0, 2l+1, 2l+1) indexed (n1, n2, m1, m2) with n and m stored in
signed ascending order, blocks concatenated into one flat complex vector per
discrete mode (offset table in the workspace).

The transforms are separable: standard FFTs over alpha, gamma, Omega_1,
Omega_2 and a dense Wigner-d contraction over beta.  Both directions accept
arbitrary leading batch axes and are exact on band-limited inputs (sampling
theorem), which the test suite pins down to 1e-10.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .workspace import HarmonicWorkspace

# scipy.fft batch threading; deterministic per transform shape.  Single
# worker by default: the per-call FFTs here are small enough that thread
# fan-out costs more than it gains on few-core hosts (CLI --threads raises it)
_WORKERS = 1


def forward(ws: HarmonicWorkspace, values: np.ndarray) -> np.ndarray:
    """Quadrature forward transform of grid values (..., 2l0,2l0,2l0,2n0,2n0).

    Returns flat coefficients (..., n_coeff) for l < l0, |m| <= l,
    -n0 <= n_j < n0.  Computed separably: FFTs over alpha, gamma, Omega_1,
    Omega_2 and a dense Wigner-d GEMM over beta; alternating-sign modulations
    replace the index shifts between signed and FFT frequency order.
    """
    l0, n0 = ws.band.l0, ws.band.n0
    if values.shape[-5:] != ws.grid_shape:
        raise ValueError(f"grid shape {values.shape[-5:]} != {ws.grid_shape}")
    lead = values.shape[:-5]

    g = sfft.fft2(values * ws._mod_grid, axes=(-2, -1), workers=_WORKERS)
    # torus sign + Haar weight, and the 2l0 factors of the two analysis iffts
    g *= ws._phase_n * ((2 * l0) ** 2 / (2 * n0) ** 2)
    g = sfft.ifft(g, axis=g.ndim - 5, workers=_WORKERS, overwrite_x=True)
    g = g[..., 1:, :, :, :, :]  # drop the aliased m1 = -l0 bin
    g = sfft.ifft(g, axis=g.ndim - 3, workers=_WORKERS, overwrite_x=True)
    g = g[..., 1:, :, :]

    # beta contraction: per (m1, m2) one GEMM over the stacked degrees,
    # then a single permutation into the l-major block layout
    nm = (2 * n0) ** 2
    g = g.reshape(lead + (2 * l0 - 1, 2 * l0, 2 * l0 - 1, nm))
    g = np.ascontiguousarray(np.swapaxes(g, -3, -2))  # (..., m1, m2, k, nm)

    scratch = np.empty(lead + (ws.n_coeff,), dtype=complex)
    pos = 0
    for xi, yi, _, _, nl, w_fwd, _ in ws._beta_pairs:
        res = np.matmul(w_fwd, g[..., xi, yi, :, :])   # (..., nl, nm)
        scratch[..., pos:pos + nl * nm] = res.reshape(lead + (nl * nm,))
        pos += nl * nm
    out = np.empty_like(scratch)
    out[..., ws._beta_dest] = scratch
    return out


def inverse(ws: HarmonicWorkspace, coeffs: np.ndarray) -> np.ndarray:
    """Band-limited synthesis on the grid; inverse of `forward` on the
    band-limited subspace (sampling theorem).

    Returns complex values (..., 2l0,2l0,2l0,2n0,2n0); take .real for
    densities of real functions.
    """
    l0, n0 = ws.band.l0, ws.band.n0
    if coeffs.shape[-1] != ws.n_coeff:
        raise ValueError(f"coefficient length {coeffs.shape[-1]} != {ws.n_coeff}")
    lead = coeffs.shape[:-1]
    nm = (2 * n0) ** 2

    # beta synthesis: H[m1, m2, k, nm] = sum_l (2l+1) d^l F^l, one GEMM per
    # (m1, m2) pair after gathering the pair's rows from the block layout;
    # written into the m-padded array (slot m = -l0 stays zero)
    scratch = np.asarray(coeffs, dtype=complex)[..., ws._beta_dest]
    scratch *= ws._phase_scratch
    h = np.zeros(lead + (2 * l0, 2 * l0, 2 * l0, nm), dtype=complex)
    pos = 0
    for xi, yi, _, _, nl, _, w_inv_t in ws._beta_pairs:
        rows = scratch[..., pos:pos + nl * nm].reshape(lead + (nl, nm))
        h[..., xi + 1, yi + 1, :, :] = np.matmul(w_inv_t, rows)
        pos += nl * nm

    h = np.ascontiguousarray(np.swapaxes(h, -3, -2))   # (..., m1, k, m2, nm)
    h = h.reshape(lead + (2 * l0, 2 * l0, 2 * l0, 2 * n0, 2 * n0))

    # synthesis FFTs; signed-order inputs need no pre-shift, the residual
    # output signs are fused into one final modulation
    h = sfft.fft(h, axis=h.ndim - 5, workers=_WORKERS, overwrite_x=True)
    h = sfft.fft(h, axis=h.ndim - 3, workers=_WORKERS, overwrite_x=True)
    h = sfft.ifft2(h, axes=(-2, -1), workers=_WORKERS, overwrite_x=True)
    h *= ws._mod_grid
    return h


def forward_real(ws: HarmonicWorkspace, values: np.ndarray) -> np.ndarray:
    """`forward` specialized to real grid values: computes the half torus
    spectrum with rfft in raw FFT bin order and fills the conjugate-symmetric
    rest, which is exact even at the quadrature level.  Output layout is
    identical to `forward`."""
    l0, n0 = ws.band.l0, ws.band.n0
    if values.shape[-5:] != ws.grid_shape:
        raise ValueError(f"grid shape {values.shape[-5:]} != {ws.grid_shape}")
    lead = values.shape[:-5]

    g = sfft.rfft2(values, axes=(-2, -1), workers=_WORKERS)
    # torus offset phases (-1)^n and Haar weight, plus the 2l0 analysis scales
    g *= ws._phase_half2d * ((2 * l0) ** 2 / (2 * n0) ** 2)
    g = sfft.ifft(g, axis=g.ndim - 5, workers=_WORKERS, overwrite_x=True)
    g = sfft.ifft(g, axis=g.ndim - 3, workers=_WORKERS, overwrite_x=True)

    nm_half = 2 * n0 * (n0 + 1)
    g = g.reshape(lead + (2 * l0, 2 * l0, 2 * l0, nm_half))  # (..., m1r, k, m2r, q)

    scratch = np.empty(lead + (ws._beta_dest_half.size,), dtype=complex)
    pos = 0
    for _, _, xr, yr, nl, w_fwd, _ in ws._beta_pairs:
        res = np.matmul(w_fwd, g[..., xr, :, yr, :])
        scratch[..., pos:pos + nl * nm_half] = res.reshape(lead + (nl * nm_half,))
        pos += nl * nm_half
    out = np.empty(lead + (ws.n_coeff,), dtype=complex)
    out[..., ws._beta_dest_half] = scratch

    # missing bins n2 in [-n0+1, -1]:
    # F^{l,n}_{m1,m2} = (-1)^(m1-m2) conj(F^{l,-n}_{-m1,-m2})
    flip = ws._flip_n1
    for l in range(l0):
        blk = ws.block(out, l)
        src = blk[..., flip, 2 * n0 - 1:n0:-1, ::-1, ::-1]
        blk[..., :, 1:n0, :, :] = ws._sign_mm[l] * np.conj(src)
    return out


def inverse_real(ws: HarmonicWorkspace, coeffs: np.ndarray) -> np.ndarray:
    """`inverse` for coefficients of a real function (conjugate-symmetric
    layout): reads only the half torus spectrum, synthesizes with irfft, and
    returns real grid values directly."""
    l0, n0 = ws.band.l0, ws.band.n0
    if coeffs.shape[-1] != ws.n_coeff:
        raise ValueError(f"coefficient length {coeffs.shape[-1]} != {ws.n_coeff}")
    lead = coeffs.shape[:-1]
    nm_half = 2 * n0 * (n0 + 1)

    scratch = np.asarray(coeffs, dtype=complex)[..., ws._beta_dest_half]
    scratch *= ws._phase_scratch_half
    # assembled directly in (m1, beta, m2, q) order; aliased |m| = l0 slots
    # stay empty
    h = np.empty(lead + (2 * l0, 2 * l0, 2 * l0, nm_half), dtype=complex)
    h[..., l0, :, :, :] = 0.0
    h[..., :, :, l0, :] = 0.0
    pos = 0
    for _, _, xr, yr, nl, _, w_inv_t in ws._beta_pairs:
        rows = scratch[..., pos:pos + nl * nm_half].reshape(lead + (nl, nm_half))
        np.matmul(w_inv_t, rows, out=h[..., xr, :, yr, :])
        pos += nl * nm_half

    h = h.reshape(lead + (2 * l0, 2 * l0, 2 * l0, 2 * n0, n0 + 1))

    h = sfft.fft(h, axis=h.ndim - 5, workers=_WORKERS, overwrite_x=True)
    h = sfft.fft(h, axis=h.ndim - 3, workers=_WORKERS, overwrite_x=True)
    h = sfft.ifft(h, axis=h.ndim - 2, workers=_WORKERS, overwrite_x=True)
    return sfft.irfft(h, n=2 * n0, axis=h.ndim - 1, workers=_WORKERS)


def spectral_derivative(ws: HarmonicWorkspace, coeffs: np.ndarray, axis: int) -> np.ndarray:
    """Coefficients of the left-trivialized derivative along axis j = 1..5.

    Since f(g exp(t e_j)) right-translates, the derivative acts on the second
    representation index: in this coefficient layout (projections onto the
    conjugate basis entries, as produced by `forward`) the degree-l block maps
    to F @ u^l(e_j)^T for j in {1,2,3}.  Torus axes j in {4,5} multiply by
    the scalar i*pi*n_{j-3}/L.
    """
    if axis not in (1, 2, 3, 4, 5):
        raise ValueError("derivative axis must be in 1..5")
    out = np.empty_like(np.asarray(coeffs, dtype=complex))
    for l in range(ws.band.l0):
        blk = ws.block(coeffs, l)
        if axis <= 3:
            res = np.matmul(blk, ws.u_ops[l][axis - 1].T)
        else:
            v = ws.v_factor
            res = blk * (v[:, None, None, None] if axis == 4 else v[None, :, None, None])
        ws.block(out, l)[...] = res
    return out


def torus_convolution(ws: HarmonicWorkspace, coeffs_f: np.ndarray,
                      g_hat: np.ndarray) -> np.ndarray:
    """Truncated convolution over the torus frequencies:
    out^{l,n} = sum_{n'} F^{l,n-n'} g_hat[n'], out-of-band terms dropped.

    g_hat is a (2n0, 2n0) coefficient array of a torus-only function, signed
    index order; zero entries are skipped.
    """
    n0 = ws.band.n0
    if g_hat.shape != (2 * n0, 2 * n0):
        raise ValueError("g_hat must have shape (2n0, 2n0)")
    out = np.zeros_like(np.asarray(coeffs_f, dtype=complex))
    nz = np.argwhere(g_hat != 0)
    for l in range(ws.band.l0):
        src = ws.block(coeffs_f, l)
        dst = ws.block(out, l)
        for j1, j2 in nz:
            s1, s2 = int(j1) - n0, int(j2) - n0
            d1 = slice(max(0, s1), 2 * n0 + min(0, s1))
            d2 = slice(max(0, s2), 2 * n0 + min(0, s2))
            f1 = slice(max(0, -s1), 2 * n0 - max(0, s1))
            f2 = slice(max(0, -s2), 2 * n0 - max(0, s2))
            dst[..., d1, d2, :, :] += g_hat[j1, j2] * src[..., f1, f2, :, :]
    return out


def convolution_matrix(kernel: np.ndarray) -> np.ndarray:
    """Banded matrix C with (C @ F)[i] = sum_j kernel[i-j] F[j] in signed
    index space; kernel is a (2n0,) signed coefficient array."""
    two_n0 = kernel.shape[0]
    n0 = two_n0 // 2
    i = np.arange(two_n0)
    shift = i[:, None] - i[None, :] + n0
    valid = (shift >= 0) & (shift < two_n0)
    c = np.zeros((two_n0, two_n0), dtype=kernel.dtype)
    c[valid] = kernel[shift[valid]]
    return c


def convolve_axis(ws: HarmonicWorkspace, coeffs: np.ndarray, conv_mat: np.ndarray,
                  torus_axis: int) -> np.ndarray:
    """Apply a precomputed 1-D convolution matrix along torus axis 0 or 1."""
    coeffs = np.asarray(coeffs, dtype=complex)
    out = np.empty_like(coeffs)
    two_n0 = 2 * ws.band.n0
    lead = coeffs.shape[:-1]
    for l in range(ws.band.l0):
        d2 = (2 * l + 1) ** 2
        blk = ws.block(coeffs, l)
        if torus_axis == 0:
            src = blk.reshape(lead + (two_n0, two_n0 * d2))
        else:
            src = blk.reshape(lead + (two_n0, two_n0, d2))
        ws.block(out, l)[...] = np.matmul(conv_mat, src).reshape(blk.shape)
    return out


def parseval_energy(ws: HarmonicWorkspace, coeffs: np.ndarray) -> np.ndarray:
    """sum_l sum_n d(l) ||F^{l,n}||_F^2, equal to the Haar quadrature of |f|^2."""
    total = np.zeros(coeffs.shape[:-1])
    for l in range(ws.band.l0):
        blk = ws.block(coeffs, l)
        total = total + (2 * l + 1) * np.sum(np.abs(blk) ** 2, axis=(-4, -3, -2, -1))
    return total


def band_energy_fraction(ws: HarmonicWorkspace, coeffs: np.ndarray,
                         frac: float = 0.8) -> float:
    """Aliasing proxy: share of Parseval energy at l >= frac*l0 or
    max|n_j| >= frac*n0."""
    l0, n0 = ws.band.l0, ws.band.n0
    l_cut, n_cut = int(frac * l0), int(frac * n0)
    n_abs = np.abs(ws.n_signed)
    top = 0.0
    total = 0.0
    for l in range(l0):
        e = (2 * l + 1) * np.abs(ws.block(coeffs, l)) ** 2
        e_n = e.sum(axis=(-2, -1))
        total += e_n.sum()
        mask = (n_abs[:, None] >= n_cut) | (n_abs[None, :] >= n_cut)
        if l >= l_cut:
            top += e_n.sum()
        else:
            top += e_n[..., mask].sum()
    return float(top / total) if total > 0 else 0.0


@dataclass
class SpectralDensity:
    """Fourier coefficients per discrete mode; the continuous-propagator state."""

    ws: HarmonicWorkspace
    data: np.ndarray  # (n_modes, n_coeff) complex

    @classmethod
    def zeros(cls, ws: HarmonicWorkspace, n_modes: int = 1) -> "SpectralDensity":
        return cls(ws, np.zeros((n_modes, ws.n_coeff), dtype=complex))

    @property
    def n_modes(self) -> int:
        return self.data.shape[0]

    def block(self, s: int, l: int) -> np.ndarray:
        return self.ws.block(self.data[s], l)

    def mass(self) -> float:
        """Total probability under the w_beta x w_leb quadrature, which for
        this layout is L^2 times the summed constant coefficient."""
        n0 = self.ws.band.n0
        f0 = sum(self.block(s, 0)[n0, n0, 0, 0].real for s in range(self.n_modes))
        return float(self.ws.band.L ** 2 * f0)

    def copy(self) -> "SpectralDensity":
        return SpectralDensity(self.ws, self.data.copy())


@dataclass
class GridDensity:
    """Real density values on the product grid per discrete mode, normalized
    against the w_beta x w_leb quadrature (units 1/(rad/s)^2)."""

    ws: HarmonicWorkspace
    values: np.ndarray  # (n_modes, 2l0,2l0,2l0,2n0,2n0) float

    @classmethod
    def zeros(cls, ws: HarmonicWorkspace, n_modes: int = 1) -> "GridDensity":
        return cls(ws, np.zeros((n_modes,) + ws.grid_shape))

    @property
    def n_modes(self) -> int:
        return self.values.shape[0]

    def total(self) -> float:
        w = self.ws.so3.w_beta[None, :, None, None, None] * self.ws.torus.w_leb
        return float(np.sum(self.values * w))

    def normalized(self) -> "GridDensity":
        return GridDensity(self.ws, self.values / self.total())

    def copy(self) -> "GridDensity":
        return GridDensity(self.ws, self.values.copy())

    def to_spectral(self) -> SpectralDensity:
        return SpectralDensity(self.ws, forward(self.ws, self.values))


def to_grid(f: SpectralDensity) -> GridDensity:
    return GridDensity(f.ws, inverse(f.ws, f.data).real)
