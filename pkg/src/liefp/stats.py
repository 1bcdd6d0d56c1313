"""Moments and marginals of densities and sample ensembles.

Both the density path and the Monte Carlo path use the same estimators so
comparisons are like-for-like: the mean attitude is the polar projection of
the first moment onto SO(3); attitude dispersion is the per-axis standard
deviation of the rotation-vector residual log(mean_R^T R), reported for the
first two axes; angular-velocity moments are ordinary weighted means/stds.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .rotations import log_map, project_so3, rotation_angle
from .transform import GridDensity
from .workspace import HarmonicWorkspace

log = logging.getLogger(__name__)

MEAN_CONDITION_FLOOR = 0.05  # smallest singular value of the first moment


@dataclass
class MomentSummary:
    t: float
    mean_R: np.ndarray          # (3, 3)
    mean_b3: np.ndarray         # (3,)
    att_dispersion: np.ndarray  # (2,) rad, about axes 1 and 2
    mean_omega: np.ndarray      # (2,) rad/s
    std_omega: np.ndarray       # (2,) rad/s
    ill_conditioned: bool = False


@dataclass
class Marginals:
    attitude: np.ndarray        # (2l0, 2l0, 2l0), sums to 1 under w_beta
    attitude_weights: np.ndarray
    b3: np.ndarray              # (2l0, 2l0) over (alpha, beta)
    b3_weights: np.ndarray
    omega: np.ndarray           # (2n0, 2n0), sums to 1 under w_leb
    omega_weights: np.ndarray


def _moments_from_weighted(rots: np.ndarray, weights: np.ndarray,
                           t: float) -> MomentSummary:
    """Shared attitude-estimator core over weighted rotation samples."""
    w = weights / weights.sum()
    m1 = np.einsum("n,nij->ij", w, rots)
    u, s, vt = np.linalg.svd(m1)
    ill = bool(s.min() < MEAN_CONDITION_FLOOR)
    if ill:
        log.warning("mean attitude ill-conditioned: sigma_min=%.3f", s.min())
    mean_r = project_so3(m1)

    b3 = np.einsum("n,ni->i", w, rots[:, :, 2])
    nb3 = np.linalg.norm(b3)
    mean_b3 = b3 / (nb3 if nb3 > 0 else 1.0)

    resid = log_map(np.swapaxes(mean_r, -1, -2)[None] @ rots)
    # negative weights can occur for mildly Gibbs-negative densities
    disp = np.sqrt(np.maximum(np.einsum("n,ni->i", w, resid**2), 0.0))[:2]
    return MomentSummary(t, mean_r, mean_b3, disp,
                         np.zeros(2), np.zeros(2), ill)


def density_moments(p: GridDensity, ws: HarmonicWorkspace,
                    t: float = 0.0) -> MomentSummary:
    """Weighted moments of a grid density (all discrete modes pooled)."""
    vals = p.values.sum(axis=0)
    w_att = (vals * ws.torus.w_leb).sum(axis=(3, 4)) \
        * ws.so3.w_beta[None, :, None]
    rots = ws.rotation_matrices.reshape(-1, 3, 3)
    summary = _moments_from_weighted(rots, w_att.reshape(-1), t)

    w_om = np.einsum("abcxy,b->xy", vals, ws.so3.w_beta) * ws.torus.w_leb
    w_om = w_om / w_om.sum()
    om = ws.torus.omega
    m1 = np.array([np.sum(w_om.sum(axis=1) * om), np.sum(w_om.sum(axis=0) * om)])
    m2 = np.array([np.sum(w_om.sum(axis=1) * om**2), np.sum(w_om.sum(axis=0) * om**2)])
    summary.mean_omega = m1
    summary.std_omega = np.sqrt(np.maximum(m2 - m1**2, 0.0))
    return summary


def ensemble_moments(rots: np.ndarray, omegas: np.ndarray,
                     t: float = 0.0) -> MomentSummary:
    """Sample moments of an ensemble (uniform weights)."""
    n = rots.shape[0]
    summary = _moments_from_weighted(rots, np.ones(n), t)
    summary.mean_omega = omegas.mean(axis=0)
    summary.std_omega = omegas.std(axis=0)
    return summary


def marginals(p: GridDensity, ws: HarmonicWorkspace) -> Marginals:
    """Marginal distributions by weighted summation over complementary axes;
    each marginal sums to 1 under its own weights."""
    vals = p.values.sum(axis=0)
    l0 = ws.band.l0

    att = (vals * ws.torus.w_leb).sum(axis=(3, 4))
    att_w = np.broadcast_to(ws.so3.w_beta[None, :, None], att.shape)

    b3 = att.sum(axis=2) / (2 * l0)         # gamma drops out of b3 = R e3
    b3_w = np.broadcast_to(2 * l0 * ws.so3.w_beta[None, :], b3.shape)

    om = np.einsum("abcxy,b->xy", vals, ws.so3.w_beta)
    om_w = np.full_like(om, ws.torus.w_leb)
    return Marginals(att, att_w, b3, b3_w, om, om_w)


@dataclass
class MomentDifference:
    t: float
    attitude_angle: float       # geodesic distance between mean attitudes, rad
    b3_angle: float             # angle between mean b3 directions, rad
    d_dispersion: np.ndarray    # (2,)
    d_mean_omega: np.ndarray    # (2,)
    d_std_omega: np.ndarray     # (2,)


def compare(a: list, b: list) -> list:
    """Per-time differences of two MomentSummary series (matching stamps)."""
    if len(a) != len(b):
        raise ValueError("series lengths differ")
    out = []
    for sa, sb in zip(a, b):
        if abs(sa.t - sb.t) > 1e-9:
            raise ValueError(f"timestamp mismatch: {sa.t} vs {sb.t}")
        ang = float(rotation_angle(sa.mean_R.T @ sb.mean_R))
        cosb = np.clip(np.dot(sa.mean_b3, sb.mean_b3), -1.0, 1.0)
        out.append(MomentDifference(
            t=sa.t,
            attitude_angle=ang,
            b3_angle=float(np.arccos(cosb)),
            d_dispersion=sb.att_dispersion - sa.att_dispersion,
            d_mean_omega=sb.mean_omega - sa.mean_omega,
            d_std_omega=sb.std_omega - sa.std_omega,
        ))
    return out
