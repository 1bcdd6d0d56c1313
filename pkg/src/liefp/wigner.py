"""Wigner-d matrices and irreducible-representation generators for SO(3) x T^2.

The degree-l representation of SO(3) in ZYZ Euler angles factors as
U^l_{m1,m2}(alpha, beta, gamma) = exp(-i m1 alpha) d^l_{m1,m2}(beta) exp(-i m2 gamma)
with the real Wigner-d middle factor.  The sign/phase convention is pinned by
requiring d^l(beta) = expm(beta * u^l(e2)), where u^l is the Lie-algebra
representation returned by `lie_algebra_so3`; rows and columns are ordered by
ascending m = -l..l.

d^l is computed by a three-term recursion in l (seeded on the |m| = l
boundary), which is well conditioned for the moderate bandwidths used here.
"""
from __future__ import annotations

from math import comb, sqrt

import numpy as np


def lie_algebra_so3(l: int) -> np.ndarray:
    """Generators u^l(e1), u^l(e2), u^l(e3) of the degree-l representation.

    Returns a complex array of shape (3, 2l+1, 2l+1), skew-Hermitian by
    construction, indexed by ascending m.  Entries follow

        u^l_{m1,m2}(e1) = -i/2 c^l_{m2} [m2 = m1-1] - i/2 c^l_{-m2} [m2 = m1+1]
        u^l_{m1,m2}(e2) = -1/2 c^l_{m2} [m2 = m1-1] + 1/2 c^l_{-m2} [m2 = m1+1]
        u^l_{m1,m2}(e3) = -i m1 [m2 = m1]

    with c^l_m = sqrt((l-m)(l+m+1)).
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    d = 2 * l + 1
    m = np.arange(-l, l + 1)
    u = np.zeros((3, d, d), dtype=complex)
    # subdiagonal (m2 = m1 - 1) and superdiagonal (m2 = m1 + 1) coefficients
    c_m = lambda mm: np.sqrt((l - mm) * (l + mm + 1.0))
    sub = c_m(m[:-1])        # c^l_{m2} with m2 = m1 - 1, rows m1 = -l+1..l
    sup = c_m(-m[1:])        # c^l_{-m2} with m2 = m1 + 1, rows m1 = -l..l-1
    rows = np.arange(1, d)
    u[0, rows, rows - 1] = -0.5j * sub
    u[1, rows, rows - 1] = -0.5 * sub
    rows = np.arange(0, d - 1)
    u[0, rows, rows + 1] = -0.5j * sup
    u[1, rows, rows + 1] = 0.5 * sup
    u[2, np.arange(d), np.arange(d)] = -1j * m
    return u


def lie_algebra_torus(n: tuple[int, int], big_l: float) -> tuple[complex, complex]:
    """Generators of the torus character V^n: v^n(e_j) = i pi n_j / L."""
    n1, n2 = n
    return 1j * np.pi * n1 / big_l, 1j * np.pi * n2 / big_l


def _boundary_d(l: int, c2: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """d^l rows/cols with |m1| = l or |m2| = l from the closed forms.

    c2, s2 are cos(beta/2), sin(beta/2); returns (2l+1, 2l+1, B) with only the
    boundary entries filled.
    """
    d = 2 * l + 1
    out = np.zeros((d, d, c2.shape[0]))
    m = np.arange(-l, l + 1)
    binsq = np.array([sqrt(comb(2 * l, l + mm)) for mm in m])
    # top row m1 = l, bottom row m1 = -l, right col m2 = l, left col m2 = -l
    out[-1, :, :] = binsq[:, None] * c2 ** (l + m[:, None]) * (-s2) ** (l - m[:, None])
    out[0, :, :] = binsq[:, None] * c2 ** (l - m[:, None]) * s2 ** (l + m[:, None])
    out[:, -1, :] = binsq[:, None] * c2 ** (l + m[:, None]) * s2 ** (l - m[:, None])
    out[:, 0, :] = binsq[:, None] * c2 ** (l - m[:, None]) * (-s2) ** (l + m[:, None])
    return out


def wigner_d(l_max: int, beta) -> list[np.ndarray]:
    """Wigner-d matrices d^l(beta) for l = 0..l_max.

    beta may be a scalar or a 1-D array in [0, pi].  Returns a list of real
    arrays, entry l of shape (2l+1, 2l+1) for scalar beta or
    (2l+1, 2l+1, len(beta)) otherwise, indexed by ascending m1, m2.
    """
    beta_arr = np.atleast_1d(np.asarray(beta, dtype=float))
    scalar = np.ndim(beta) == 0
    if np.any((beta_arr < -1e-12) | (beta_arr > np.pi + 1e-12)):
        raise ValueError("beta must lie in [0, pi]")
    nb = beta_arr.shape[0]
    cosb = np.cos(beta_arr)
    c2, s2 = np.cos(beta_arr / 2.0), np.sin(beta_arr / 2.0)

    tables: list[np.ndarray] = [np.ones((1, 1, nb))]
    for l in range(1, l_max + 1):
        d = np.zeros((2 * l + 1, 2 * l + 1, nb))
        d += _boundary_d(l, c2, s2)
        if l >= 1:
            m = np.arange(-(l - 1), l)  # interior |m1|, |m2| <= l-1
            m1 = m[:, None, None].astype(float)
            m2 = m[None, :, None].astype(float)
            denom = (l - 1) * np.sqrt((l * l - m1**2) * (l * l - m2**2))
            prev1 = tables[l - 1]  # (2l-1, 2l-1, nb)
            if l >= 2:
                prev2 = np.zeros_like(prev1)
                prev2[1:-1, 1:-1, :] = tables[l - 2]
            else:
                prev2 = np.zeros_like(prev1)
            lm1 = l - 1.0
            num1 = (2 * lm1 + 1) * (lm1 * (lm1 + 1) * cosb[None, None, :] - m1 * m2)
            num2 = (lm1 + 1) * np.sqrt(
                np.maximum((lm1 * lm1 - m1**2) * (lm1 * lm1 - m2**2), 0.0)
            )
            if l == 1:
                # single interior entry (m1 = m2 = 0): d^1_{00} = cos(beta)
                d[1, 1, :] = cosb
            else:
                interior = (num1 * prev1 - num2 * prev2) / denom
                d[1:-1, 1:-1, :] = interior
        tables.append(d)
    if scalar:
        return [t[..., 0] for t in tables]
    return tables
