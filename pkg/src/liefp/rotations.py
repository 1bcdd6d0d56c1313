"""Rotation-matrix utilities: hat map, exponential/log maps, ZYZ Euler angles.

Conventions: rotations act on column vectors, R maps body coordinates to
inertial coordinates, and the hat map is the standard one with
hat(e_3) @ e_1 = e_2.  Euler angles follow the 3-2-3 factorization
R(alpha, beta, gamma) = exp(alpha*hat(e3)) exp(beta*hat(e2)) exp(gamma*hat(e3))
with alpha, gamma in [0, 2pi) and beta in [0, pi].

All functions broadcast over leading axes.
"""
from __future__ import annotations

import numpy as np


def hat(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix of a 3-vector, hat(v) @ w == cross(v, w)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def exp_hat(v: np.ndarray) -> np.ndarray:
    """Rodrigues formula: matrix exponential of hat(v)."""
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v, axis=-1)
    small = angle < 1e-12
    denom = np.where(small, 1.0, angle)
    axis = v / denom[..., None]
    k = hat(axis)
    s = np.sin(angle)[..., None, None]
    c1 = (1.0 - np.cos(angle))[..., None, None]
    eye = np.broadcast_to(np.eye(3), k.shape)
    r = eye + s * k + c1 * (k @ k)
    # first-order fallback where the angle underflows the axis normalization
    r_small = eye + hat(v)
    return np.where(small[..., None, None], r_small, r)


def log_map(r: np.ndarray) -> np.ndarray:
    """Rotation vector of R (inverse of exp_hat), robust up to angle pi."""
    r = np.asarray(r, dtype=float)
    tr = np.clip((r[..., 0, 0] + r[..., 1, 1] + r[..., 2, 2] - 1.0) / 2.0, -1.0, 1.0)
    angle = np.arccos(tr)
    w = np.stack(
        [
            r[..., 2, 1] - r[..., 1, 2],
            r[..., 0, 2] - r[..., 2, 0],
            r[..., 1, 0] - r[..., 0, 1],
        ],
        axis=-1,
    )
    sin_a = np.sin(angle)
    generic = sin_a > 1e-7
    scale = np.where(generic, angle / np.where(generic, 2.0 * sin_a, 1.0), 0.5)
    out = w * scale[..., None]

    near_pi = angle > np.pi - 1e-5
    if np.any(near_pi):
        # axis from the dominant diagonal of (R + I)/2 = axis axis^T at angle pi
        b = (r + np.eye(3)) / 2.0
        diag = np.stack([b[..., 0, 0], b[..., 1, 1], b[..., 2, 2]], axis=-1)
        k = np.argmax(diag, axis=-1)
        axis = np.take_along_axis(b, k[..., None, None], axis=-1)[..., 0]
        norm = np.linalg.norm(axis, axis=-1, keepdims=True)
        axis = axis / np.where(norm > 0, norm, 1.0)
        # fix the sign using the skew part where it is nonzero
        sgn = np.where(np.sum(axis * w, axis=-1, keepdims=True) < 0, -1.0, 1.0)
        out_pi = axis * sgn * angle[..., None]
        out = np.where(near_pi[..., None], out_pi, out)
    return out


def rotation_angle(r: np.ndarray) -> np.ndarray:
    """Geodesic distance of R from the identity, in [0, pi]."""
    r = np.asarray(r, dtype=float)
    tr = np.clip((r[..., 0, 0] + r[..., 1, 1] + r[..., 2, 2] - 1.0) / 2.0, -1.0, 1.0)
    return np.arccos(tr)


def from_euler_zyz(alpha, beta, gamma) -> np.ndarray:
    """R = Rz(alpha) Ry(beta) Rz(gamma), broadcasting over the angle arrays."""
    alpha, beta, gamma = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float)
    )
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    r = np.empty(alpha.shape + (3, 3))
    r[..., 0, 0] = ca * cb * cg - sa * sg
    r[..., 0, 1] = -ca * cb * sg - sa * cg
    r[..., 0, 2] = ca * sb
    r[..., 1, 0] = sa * cb * cg + ca * sg
    r[..., 1, 1] = -sa * cb * sg + ca * cg
    r[..., 1, 2] = sa * sb
    r[..., 2, 0] = -sb * cg
    r[..., 2, 1] = sb * sg
    r[..., 2, 2] = cb
    return r


def euler_zyz(r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """ZYZ Euler angles of R; alpha, gamma in [0, 2pi), beta in [0, pi].

    At the gimbal-degenerate beta = 0 or pi the split between alpha and gamma
    is fixed by gamma = 0.
    """
    r = np.asarray(r, dtype=float)
    beta = np.arccos(np.clip(r[..., 2, 2], -1.0, 1.0))
    generic = np.sin(beta) > 1e-10
    # beta = 0: R = Rz(alpha+gamma); beta = pi: R00 = -cos(alpha-gamma)
    alpha_degen = np.where(
        r[..., 2, 2] > 0,
        np.arctan2(r[..., 1, 0], r[..., 0, 0]),
        np.arctan2(-r[..., 1, 0], -r[..., 0, 0]),
    )
    alpha = np.where(generic, np.arctan2(r[..., 1, 2], r[..., 0, 2]), alpha_degen)
    gamma = np.where(generic, np.arctan2(r[..., 2, 1], -r[..., 2, 0]), 0.0)
    return np.mod(alpha, 2 * np.pi), beta, np.mod(gamma, 2 * np.pi)


def project_so3(m: np.ndarray) -> np.ndarray:
    """Closest rotation to a 3x3 matrix: polar factor with det +1."""
    u, _, vt = np.linalg.svd(np.asarray(m, dtype=float))
    d = np.sign(np.linalg.det(u @ vt))
    u = u.copy()
    u[..., :, 2] *= d[..., None] if np.ndim(d) else d
    return u @ vt
