"""Axially symmetric 3D pendulum with wall collisions on SO(3) x T^2.

State: attitude R (body-to-inertial) and body angular velocity
(Omega_1, Omega_2); the spin component Omega_3 stays zero under the axial
symmetry reduction.  Reduced continuous dynamics:

    R' = R hat(Omega_1, Omega_2, 0)
    dOmega = ( (m g rho_z / J1) [R_32, -R_31] - B Omega ) dt + Hc dW

A planar wall sits at x = d_wall; contact happens on the rim circle of the
cylinder, approximated by a Poisson jump whose rate ramps from 0 to
lambda_max over a band of width 2*theta_t around the contact angle theta_0,
gated on the rim moving toward the wall.  The reset reflects the normal
velocity component, scaled by the restitution coefficient, and adds Gaussian
noise with covariance Hd Hd^T; the attitude is unchanged by the jump.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .model import ContinuousDynamics, GshsModel, HybridState
from .rotations import exp_hat, project_so3
from .transform import GridDensity
from .workspace import HarmonicWorkspace

log = logging.getLogger(__name__)

_E1 = np.array([1.0, 0.0, 0.0])


def _default_fisher() -> np.ndarray:
    return exp_hat(np.array([0.0, -2 * np.pi / 3, 0.0])) * 15.0


@dataclass(frozen=True)
class PendulumParams:
    """Physical and numerical parameters; defaults are the reference set."""

    h: float = 0.2                   # cylinder height, m
    r: float = 0.025                 # cylinder radius, m
    rho_z: float = 0.1               # center-of-mass offset along b3, m
    d_wall: float = 0.12             # wall distance from pivot, m
    m_mass: float = 1.0642           # kg
    J1: float = 0.0144               # transverse moment of inertia, kg m^2
    g_acc: float = 9.8               # m/s^2
    B: tuple = (0.2, 0.2)            # damping, 1/s
    Hc: tuple = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0))  # noise, rad s^-3/2
    theta_t: float = np.deg2rad(5.0)  # rate ramp half-width, rad
    lambda_max: float = 100.0        # 1/s
    epsilon: float = 0.8             # restitution
    Hd: tuple = ((0.05, 0.0), (0.0, 0.05))  # reset noise, rad/s
    L: float = 14.5                  # angular-velocity half-width, rad/s
    fisher_F: np.ndarray = field(default_factory=_default_fisher)
    omega_std: float = 2.0           # initial angular-velocity std, rad/s

    def __post_init__(self):
        for name in ("h", "r", "rho_z", "d_wall", "m_mass", "J1", "g_acc", "L"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.d_wall < np.hypot(self.h, self.r):
            raise ValueError("wall out of reach: d_wall >= sqrt(h^2 + r^2)")
        if not 0 < self.epsilon <= 1:
            raise ValueError("restitution must be in (0, 1]")
        if np.asarray(self.Hc).shape != (2, 3):
            raise ValueError("Hc must be 2x3 (reduced dynamics)")
        if np.asarray(self.B).shape != (2,):
            raise ValueError("B must have two diagonal entries")

    @property
    def gravity_gain(self) -> float:
        """m g rho_z / J1, the angular acceleration scale in rad/s^2."""
        return self.m_mass * self.g_acc * self.rho_z / self.J1

    @property
    def theta0(self) -> float:
        """Contact angle: theta at which the rim circle touches the wall."""
        ell = np.hypot(self.h, self.r)
        return float(np.arcsin(self.d_wall / ell) - np.arcsin(self.r / ell))

    @property
    def sigma_d(self) -> np.ndarray:
        hd = np.asarray(self.Hd)
        return hd @ hd.T

    @property
    def diffusion(self) -> np.ndarray:
        hc = np.asarray(self.Hc)
        return 0.5 * hc @ hc.T


def theta(R: np.ndarray) -> np.ndarray:
    """Elevation of the symmetry axis toward the wall:
    arcsin(b3 . e1) = arcsin(R_13), clamped against rounding."""
    return np.arcsin(np.clip(np.asarray(R)[..., 0, 2], -1.0, 1.0))


def contact_vector(params: PendulumParams, R: np.ndarray) -> np.ndarray:
    """Inertial coordinates of the pivot-to-contact-point vector
    (h - r tan(theta)) b3 + r sec(theta) e1."""
    R = np.asarray(R)
    th = theta(R)
    cos_t = np.cos(th)
    b3 = R[..., :, 2]
    return ((params.h - params.r * np.tan(th))[..., None] * b3
            + (params.r / cos_t)[..., None] * _E1)


def tangent(params: PendulumParams, R: np.ndarray) -> np.ndarray:
    """Unit tangent t = (varrho x e1) / |varrho x e1| at the contact point."""
    rho = contact_vector(params, R)
    t = np.stack([np.zeros_like(rho[..., 0]), rho[..., 2], -rho[..., 1]], axis=-1)
    norm = np.linalg.norm(t, axis=-1, keepdims=True)
    return t / np.where(norm > 0, norm, 1.0), norm[..., 0]


def gravity_force(params: PendulumParams, R: np.ndarray) -> np.ndarray:
    """Attitude part of the angular-velocity drift: (m g rho_z/J1)[R_32, -R_31]."""
    R = np.asarray(R)
    c = params.gravity_gain
    return np.stack([c * R[..., 2, 1], -c * R[..., 2, 0]], axis=-1)


def drift(params: PendulumParams, R: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Full five-component drift: (Omega_1, Omega_2, 0) on the attitude axes,
    gravity minus damping on the angular-velocity axes."""
    omega = np.asarray(omega)
    torus = gravity_force(params, R) - np.asarray(params.B) * omega
    zeros = np.zeros_like(omega[..., :1])
    return np.concatenate([omega, zeros, torus], axis=-1)


def _approach_speed(R: np.ndarray, omega: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """(R Omega x varrho) . e1 with Omega embedded as (Omega_1, Omega_2, 0):
    positive when the contact point moves toward the wall."""
    R = np.asarray(R)
    omega = np.asarray(omega)
    w = R[..., :, 0] * omega[..., :1] + R[..., :, 1] * omega[..., 1:2]
    return w[..., 1] * rho[..., 2] - w[..., 2] * rho[..., 1]


def rate(params: PendulumParams, R: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Jump intensity: half-sine ramp across |theta - theta0| <= theta_t,
    saturated at lambda_max deeper in, zero when moving away from the wall."""
    th = theta(R)
    dth = th - params.theta0
    rho = contact_vector(params, R)
    toward = _approach_speed(R, omega, rho) > 0

    lam_max = params.lambda_max
    ramp = 0.5 * lam_max * (np.sin(0.5 * np.pi * dth / params.theta_t) + 1.0)
    lam = np.where(dth > params.theta_t, lam_max,
                   np.where(dth >= -params.theta_t, ramp, 0.0))
    return np.where(toward, lam, 0.0)


def reset_mean(params: PendulumParams, R: np.ndarray,
               omega: np.ndarray) -> np.ndarray:
    """Post-collision angular velocity before reset noise:
    Omega - (1+eps) (Omega . R^T t) R^T t, with t the contact tangent."""
    R = np.asarray(R)
    omega = np.asarray(omega)
    t_hat, t_norm = tangent(params, R)
    bt = np.einsum("...ji,...j->...i", R, t_hat)  # R^T t, third component ~ 0
    proj = omega[..., 0] * bt[..., 0] + omega[..., 1] * bt[..., 1]
    out = omega - (1 + params.epsilon) * proj[..., None] * bt[..., :2]
    degenerate = t_norm < 1e-12
    if np.any(degenerate):
        log.warning("degenerate contact tangent at %d states; reset skipped",
                    int(np.count_nonzero(degenerate)))
        out = np.where(degenerate[..., None], omega, out)
    return out


def kernel_density(params: PendulumParams, R: np.ndarray, omega_minus: np.ndarray,
                   omega_plus: np.ndarray) -> np.ndarray:
    """Reset-kernel density over the post-jump angular velocity: Gaussian
    centered at `reset_mean` with covariance Hd Hd^T (attitude preserved
    structurally, no numeric delta)."""
    mean = reset_mean(params, R, omega_minus)
    sig = params.sigma_d
    prec = np.linalg.inv(sig)
    diff = np.asarray(omega_plus) - mean
    q = (diff[..., 0] ** 2 * prec[0, 0]
         + 2 * diff[..., 0] * diff[..., 1] * prec[0, 1]
         + diff[..., 1] ** 2 * prec[1, 1])
    return np.exp(-0.5 * q) / (2 * np.pi * np.sqrt(np.linalg.det(sig)))


def initial_density(params: PendulumParams, ws: HarmonicWorkspace) -> GridDensity:
    """Matrix-Fisher attitude times isotropic Gaussian angular velocity,
    renormalized to total probability one on the grid."""
    rots = ws.rotation_matrices
    expo = np.einsum("ij,abcij->abc", params.fisher_F, rots)
    att = np.exp(expo - expo.max())
    om = ws.torus.omega
    om_sq = om[:, None] ** 2 + om[None, :] ** 2
    gauss = np.exp(-0.5 * om_sq / params.omega_std ** 2)
    values = att[None, :, :, :, None, None] * gauss[None, None, None, None, :, :]
    return GridDensity(ws, np.ascontiguousarray(values)).normalized()


def _sample_matrix_fisher(rng: np.random.Generator, F: np.ndarray,
                          n: int) -> np.ndarray:
    """Exact sampler for an isotropic matrix Fisher F = s * R0 by rejection
    on the rotation angle (the c < 0 tail, of relative mass ~ e^{-2s}, is
    neglected)."""
    R0 = project_so3(F)
    s = float(np.trace(R0.T @ F) / 3.0)
    out = np.empty((n, 3))
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 64)
        c = 1.0 - np.minimum(rng.exponential(size=m), 2 * s) / (2 * s)
        accept = rng.uniform(size=m) < np.sqrt((1 - c) / (1 + c))
        c = c[accept][: n - filled]
        axis = rng.standard_normal((c.size, 3))
        axis /= np.linalg.norm(axis, axis=1, keepdims=True)
        out[filled:filled + c.size] = np.arccos(c)[:, None] * axis
        filled += c.size
    return R0 @ exp_hat(out)


def make_model(params: PendulumParams, collisions: bool = True) -> GshsModel:
    """Package the pendulum as a one-mode hybrid-system model."""

    def attitude_force(ws: HarmonicWorkspace) -> np.ndarray:
        g = ws.so3
        sb = np.sin(g.beta)[None, :, None]
        r32 = sb * np.sin(g.gamma)[None, None, :]
        r31 = -sb * np.cos(g.gamma)[None, None, :]
        c = params.gravity_gain
        shape = (2 * ws.band.l0,) * 3
        return np.stack([np.broadcast_to(c * r32, shape),
                         np.broadcast_to(-c * r31, shape)])

    cont = ContinuousDynamics(
        kinematic_so3=True,
        attitude_force=attitude_force,
        damping=np.asarray(params.B, dtype=float),
        diffusion=params.diffusion,
    )

    def init(ws: HarmonicWorkspace) -> GridDensity:
        return initial_density(params, ws)

    def init_sample(rng: np.random.Generator, n: int) -> HybridState:
        rots = _sample_matrix_fisher(rng, params.fisher_F, n)
        om = params.omega_std * rng.standard_normal((n, 2))
        return HybridState(rots, om, np.zeros(n, dtype=int))

    def mc_drift(R, omega, s):
        return gravity_force(params, R) - np.asarray(params.B) * omega

    def mc_diffusion(s):
        return np.asarray(params.Hc, dtype=float)

    if not collisions:
        return GshsModel(
            n_modes=1, continuous=(cont,), init=init, init_sample=init_sample,
            mc_drift=mc_drift, mc_diffusion=mc_diffusion,
        )

    def model_rate(R, omega, s):
        return rate(params, R, omega)

    def kernel_columns(ws, s_minus, R, src):
        # Gaussian around each source's reset mean, evaluated at all targets
        om = ws.torus.omega
        om1, om2 = np.meshgrid(om, om, indexing="ij")
        om_grid = np.stack([om1.ravel(), om2.ravel()], axis=-1)
        mean = reset_mean(params, R, om_grid[src])          # (n_src, 2)
        sig = params.sigma_d
        prec = np.linalg.inv(sig)
        diff = om_grid[:, None, :] - mean[None, :, :]       # (MM, n_src, 2)
        q = (diff[..., 0] ** 2 * prec[0, 0]
             + 2 * diff[..., 0] * diff[..., 1] * prec[0, 1]
             + diff[..., 1] ** 2 * prec[1, 1])
        dens = np.exp(-0.5 * q) / (2 * np.pi * np.sqrt(np.linalg.det(sig)))
        return {int(s_minus): dens}

    def kernel_sample(rng, R, omega_minus, s_minus):
        mean = reset_mean(params, R, omega_minus)
        noise = rng.standard_normal(mean.shape) @ np.asarray(params.Hd).T
        return mean + noise, s_minus

    return GshsModel(
        n_modes=1, continuous=(cont,), init=init, init_sample=init_sample,
        mc_drift=mc_drift, mc_diffusion=mc_diffusion,
        rate=model_rate, kernel_columns=kernel_columns,
        kernel_sample=kernel_sample,
    )
