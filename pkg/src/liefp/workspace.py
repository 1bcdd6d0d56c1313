"""Sampling grids, quadrature rules, and precomputed tables on SO(3) x T^2.

The SO(3) grid uses 2*l0 points per Euler angle,

    alpha_v = pi*v/l0,  beta_v = pi*(2v+1)/(4*l0),  gamma_v = pi*v/l0,

with quadrature weights depending on beta only,

    w_v = 1/(4*l0^3) * sin(beta_v) * sum_{j<l0} sin((2j+1) beta_v)/(2j+1),

which integrate band-limited functions exactly against the normalized Haar
measure.  The torus grid places 2*n0 points per axis at Omega = mu*L/n0 for
mu = -n0..n0-1; its Haar weight is 1/(2n0)^2 per point and the Lebesgue-type
weight used by the jump quadrature is w' = L^2/(2n0)^2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .rotations import from_euler_zyz
from .wigner import lie_algebra_so3, wigner_d


@dataclass(frozen=True)
class BandLimit:
    """Truncation of the retained representation indices.

    l0: SO(3) degrees l = 0..l0-1; n0: torus frequencies n_j = -n0..n0-1;
    L: half-width of the angular-velocity window [-L, L) in rad/s.
    """

    l0: int
    n0: int
    L: float

    def __post_init__(self):
        if self.l0 < 1 or self.n0 < 1:
            raise ValueError("band limits l0, n0 must be >= 1")
        if not self.L > 0:
            raise ValueError("torus half-width L must be positive")


@dataclass(frozen=True)
class So3Grid:
    alpha: np.ndarray   # (2*l0,)
    beta: np.ndarray    # (2*l0,)
    gamma: np.ndarray   # (2*l0,)
    w_beta: np.ndarray  # (2*l0,) quadrature weight per beta index


@dataclass(frozen=True)
class TorusGrid:
    omega: np.ndarray   # (2*n0,) per-axis grid, ascending from -L
    w_haar: float       # 1/(2n0)^2, normalized Haar weight per 2-D point
    w_leb: float        # L^2/(2n0)^2, Lebesgue-type weight per 2-D point


def so3_grid(l0: int) -> So3Grid:
    v = np.arange(2 * l0)
    alpha = np.pi * v / l0
    beta = np.pi * (2 * v + 1) / (4 * l0)
    gamma = np.pi * v / l0
    j = np.arange(l0)
    w = (
        np.sin(beta)[:, None] / (2 * j + 1)[None, :]
        * np.sin((2 * j + 1)[None, :] * beta[:, None])
    ).sum(axis=1) / (4 * l0**3)
    return So3Grid(alpha=alpha, beta=beta, gamma=gamma, w_beta=w)


def torus_grid(n0: int, L: float) -> TorusGrid:
    mu = np.arange(-n0, n0)
    return TorusGrid(omega=mu * L / n0, w_haar=1.0 / (2 * n0) ** 2,
                     w_leb=L**2 / (2 * n0) ** 2)


class HarmonicWorkspace:
    """Precomputed tables for a fixed band limit; immutable after build.

    Holds the grids, the Wigner-d table at the beta nodes, complex-exponential
    tables, the Lie-algebra blocks u^l(e_j) and torus factors i*pi*n/L, and
    the offset table of the ragged l-major coefficient layout (per-l blocks of
    shape (2n0, 2n0, 2l+1, 2l+1), n stored in signed order -n0..n0-1).
    """

    def __init__(self, band: BandLimit):
        self.band = band
        l0, n0, L = band.l0, band.n0, band.L
        self.so3 = so3_grid(l0)
        self.torus = torus_grid(n0, L)

        self.wigner = wigner_d(l0 - 1, self.so3.beta)       # list, (d,d,2l0)
        self.u_ops = [lie_algebra_so3(l) for l in range(l0)]  # list, (3,d,d)

        m = np.arange(-(l0 - 1), l0)
        self.m_signed = m
        # e^{+i m alpha} etc.; forward transforms carry e^{+i m}, inverse e^{-i m}
        self.exp_alpha = np.exp(1j * np.outer(m, self.so3.alpha))
        self.exp_gamma = np.exp(1j * np.outer(m, self.so3.gamma))
        n = np.arange(-n0, n0)
        self.n_signed = n
        self.exp_omega = np.exp(1j * np.pi * np.outer(n, self.torus.omega) / L)
        self.v_factor = 1j * np.pi * n / L                   # v^n(e_j) along one axis

        sizes = [(2 * n0) ** 2 * (2 * l + 1) ** 2 for l in range(l0)]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.n_coeff = int(self.offsets[-1])

        # beta-contraction plan: one GEMM per (m1, m2) pair over the stacked
        # degrees l >= max(|m1|, |m2|), plus a permutation into block layout.
        # forward weights fold the quadrature rule, inverse ones the (2l+1)
        # factor and the (2n0)^2 torus synthesis scale.  xr/yr are the raw
        # FFT-order bins m mod 2l0 used by the half-spectrum fast path.
        nm = (2 * n0) ** 2
        pairs = []
        dest = np.empty(self.n_coeff, dtype=np.int64)
        pos = 0
        for xi, m1 in enumerate(m):
            for yi, m2 in enumerate(m):
                lmin = max(abs(m1), abs(m2))
                ls = np.arange(lmin, l0)
                w_fwd = np.empty((len(ls), 2 * l0), dtype=complex)
                w_inv = np.empty((len(ls), 2 * l0), dtype=complex)
                for r, l in enumerate(ls):
                    row = self.wigner[l][m1 + l, m2 + l, :]
                    w_fwd[r] = self.so3.w_beta * row
                    w_inv[r] = (2 * l + 1) * (2 * n0) ** 2 * row
                for r, l in enumerate(ls):
                    d = 2 * l + 1
                    base = self.offsets[l] + (m1 + l) * d + (m2 + l)
                    dest[pos:pos + nm] = base + d * d * np.arange(nm)
                    pos += nm
                pairs.append((xi, yi, m1 % (2 * l0), m2 % (2 * l0), len(ls),
                              w_fwd, np.ascontiguousarray(w_inv.T)))
        self._beta_pairs = pairs
        self._beta_dest = dest

        # fftshift-free transform stages: alternating-sign modulations move
        # the signed-index origin (shift theorem), fused into single multiplies
        s_so3 = (-1.0) ** np.arange(2 * l0)
        s_tor = (-1.0) ** np.arange(2 * n0)
        self._mod_grid = (s_so3[:, None, None, None, None]
                          * s_so3[None, None, :, None, None]
                          * s_tor[None, None, None, :, None]
                          * s_tor[None, None, None, None, :])
        self._phase_n = np.outer(s_tor, s_tor)  # (-1)^(i1+i2) on signed n axes
        # same phases laid out over the beta-scratch row ordering
        ph = np.empty(self.n_coeff)
        pos = 0
        nm_phase = self._phase_n.reshape(-1)
        for _, _, _, _, nl, _, _ in pairs:
            ph[pos:pos + nl * nm] = np.tile(nm_phase, nl)
            pos += nl * nm
        self._phase_scratch = ph

        # half-spectrum (rfft) plan for real grid functions, kept in raw FFT
        # bin order: torus n1 bins i1 with n1 = i1 or i1 - 2n0, n2 bins
        # k2 = 0..n0 (k2 = n0 is the Nyquist bin n2 = -n0); the dropped
        # n2 < 0 bins follow from conjugate symmetry.
        nm_half = 2 * n0 * (n0 + 1)
        k2 = np.arange(n0 + 1)
        i2_of_k2 = np.where(k2 < n0, n0 + k2, 0)     # signed storage column
        i1 = np.arange(2 * n0)
        i1_signed = (i1 + n0) % (2 * n0)
        cols_half = (i1_signed[:, None] * 2 * n0 + i2_of_k2[None, :]).reshape(-1)
        dest_half = np.empty(self.n_coeff // (2 * n0) * (n0 + 1), dtype=np.int64)
        pos = 0
        for m1 in m:
            for m2 in m:
                for l in range(max(abs(m1), abs(m2)), l0):
                    d = 2 * l + 1
                    base = self.offsets[l] + (m1 + l) * d + (m2 + l)
                    dest_half[pos:pos + nm_half] = base + d * d * cols_half
                    pos += nm_half
        self._beta_dest_half = dest_half
        phase_half = ((-1.0) ** (i1[:, None] + k2[None, :])).reshape(-1)
        self._phase_half2d = phase_half.reshape(2 * n0, n0 + 1)
        self._phase_scratch_half = np.tile(phase_half, dest_half.size // nm_half)
        # conjugate-symmetry reconstruction tables: (-1)^(m1-m2) signs and the
        # n1 index flip  n -> -n (mod 2n0) in signed storage order
        self._sign_mm = [
            np.outer((-1.0) ** np.arange(2 * l + 1), (-1.0) ** np.arange(2 * l + 1))
            for l in range(l0)
        ]
        self._flip_n1 = np.concatenate([[0], np.arange(2 * n0 - 1, 0, -1)])

    # -- layout helpers ----------------------------------------------------

    def block(self, coeffs: np.ndarray, l: int) -> np.ndarray:
        """View of the degree-l block, shape (..., 2n0, 2n0, 2l+1, 2l+1)."""
        n0 = self.band.n0
        d = 2 * l + 1
        lead = coeffs.shape[:-1]
        seg = coeffs[..., self.offsets[l]:self.offsets[l + 1]]
        return seg.reshape(lead + (2 * n0, 2 * n0, d, d))

    @cached_property
    def grid_shape(self) -> tuple[int, ...]:
        s = 2 * self.band.l0
        m = 2 * self.band.n0
        return (s, s, s, m, m)

    @cached_property
    def rotation_matrices(self) -> np.ndarray:
        """Rotation matrices at every attitude grid point, (2l0,2l0,2l0,3,3)."""
        a, b, g = np.meshgrid(self.so3.alpha, self.so3.beta, self.so3.gamma,
                              indexing="ij")
        out = from_euler_zyz(a, b, g)
        out.setflags(write=False)
        return out

    @cached_property
    def quad_weights(self) -> np.ndarray:
        """Probability quadrature w_beta * w_leb on the full grid, broadcastable."""
        w = self.so3.w_beta[None, :, None, None, None] * self.torus.w_leb
        return np.broadcast_to(w, self.grid_shape)

    def estimated_bytes(self) -> int:
        l0, n0 = self.band.l0, self.band.n0
        grid = (2 * l0) ** 3 * (2 * n0) ** 2
        tables = sum((2 * l + 1) ** 2 for l in range(l0)) * (2 * l0) * 8 * 3
        # transforms keep ~3 complex scratch arrays of grid size in flight
        return int(tables + 6 * grid * 16)


def build_workspace(band: BandLimit, mem_limit: int = 2 << 30) -> HarmonicWorkspace:
    """Build the workspace, refusing band limits whose working set would
    exceed mem_limit bytes (default 2 GiB)."""
    l0, n0 = band.l0, band.n0
    grid = (2 * l0) ** 3 * (2 * n0) ** 2
    est = int(sum((2 * l + 1) ** 2 for l in range(l0)) * (2 * l0) * 24 + 6 * grid * 16)
    if est > mem_limit:
        raise ValueError(
            f"band limit (l0={l0}, n0={n0}) needs ~{est / 2**30:.1f} GiB of "
            f"working memory, above the {mem_limit / 2**30:.1f} GiB ceiling"
        )
    return HarmonicWorkspace(band)
