"""Model description of a stochastic hybrid system on SO(3) x T^2.

A model bundles, per discrete mode, the structured continuous dynamics the
spectral stepper understands (kinematic attitude drift, an attitude-dependent
angular-velocity force, linear damping, constant diffusion on the
angular-velocity axes) together with the jump machinery (state-dependent rate,
attitude-preserving reset kernel) and the initial density.  All callbacks must
be pure, deterministic, and vectorized over leading axes so both the grid
solver and the Monte Carlo sampler can use them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError
from .transform import GridDensity
from .workspace import HarmonicWorkspace


@dataclass
class HybridState:
    """Continuous state plus discrete mode; arrays broadcast over samples."""

    R: np.ndarray        # (..., 3, 3) rotation matrices
    omega: np.ndarray    # (..., 2) rad/s
    mode: np.ndarray     # (...,) integer in [0, n_modes)

    def copy(self) -> "HybridState":
        return HybridState(self.R.copy(), self.omega.copy(), self.mode.copy())


@dataclass(frozen=True)
class ContinuousDynamics:
    """One mode's drift/diffusion in the structured form the solver uses.

    kinematic_so3: attitude drift is (Omega_1, Omega_2, 0), the rigid-body
        kinematic coupling; False means no attitude drift at all.
    attitude_force: callback ws -> (2, 2l0, 2l0, 2l0) with the
        attitude-dependent part of the angular-velocity drift on the grid.
    damping: (2,) coefficients B_j; drift contribution -B_j * Omega_j.
    diffusion: (2, 2) constant matrix D = b b^T / 2 on the torus axes.
    """

    kinematic_so3: bool = False
    attitude_force: Optional[Callable[[HarmonicWorkspace], np.ndarray]] = None
    damping: Optional[np.ndarray] = None
    diffusion: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.diffusion is not None:
            d = np.asarray(self.diffusion)
            if d.shape != (2, 2) or not np.allclose(d, d.T):
                raise ConfigError("diffusion must be a symmetric 2x2 matrix")
            if np.min(np.linalg.eigvalsh(d)) < -1e-12:
                raise ConfigError("diffusion must be positive semidefinite")


@dataclass(frozen=True)
class GshsModel:
    """Hybrid-system description shared by the spectral and MC propagators.

    rate(R, omega, s) -> nonnegative jump intensity, vectorized.
    kernel_columns(ws, s_minus, R, src) -> {s_plus: (n_omega_grid, len(src))}
        raw reset-kernel densities kappa(omega_src -> omega_dst) at one
        attitude, for the source grid columns `src` (attitude preserved).
    kernel_sample(rng, R, omega_minus, s_minus) -> (omega_plus, s_plus)
        sampling counterpart used by the Monte Carlo path.
    mc_drift(R, omega, s) -> (..., 2) torus drift for the sampler.
    mc_diffusion(s) -> (2, n_w) noise coefficient matrix.
    init(ws) -> GridDensity; init_sample(rng, n) -> HybridState.
    """

    n_modes: int
    continuous: tuple
    init: Callable[[HarmonicWorkspace], GridDensity]
    rate: Optional[Callable] = None
    kernel_columns: Optional[Callable] = None
    kernel_sample: Optional[Callable] = None
    mc_drift: Optional[Callable] = None
    mc_diffusion: Optional[Callable] = None
    init_sample: Optional[Callable] = None
    attitude_preserving: bool = True

    def __post_init__(self):
        if self.n_modes < 1:
            raise ConfigError("n_modes must be >= 1")
        if len(self.continuous) != self.n_modes:
            raise ConfigError("one ContinuousDynamics entry per mode required")

    @property
    def has_jumps(self) -> bool:
        return self.rate is not None


@dataclass
class ValidationReport:
    no_jumps: bool
    max_rate: float
    kernel_defect_max: float
    kernel_defect_mean: float
    n_active_attitudes: int
    init_min: float
    init_max: float
    init_total: float

    def __str__(self) -> str:
        lines = [
            f"initial density: total={self.init_total:.9f} "
            f"min={self.init_min:.3e} max={self.init_max:.3e}",
        ]
        if self.no_jumps:
            lines.append("no jumps: rate identically zero, kernel checks skipped")
        else:
            lines.append(
                f"jump rate: max={self.max_rate:.4g} 1/s over "
                f"{self.n_active_attitudes} active attitude points"
            )
            lines.append(
                f"kernel normalization defect before renormalization: "
                f"max={self.kernel_defect_max:.3e} mean={self.kernel_defect_mean:.3e}"
            )
        return "\n".join(lines)


def validate(model: GshsModel, ws: HarmonicWorkspace) -> ValidationReport:
    """Diagnose a model against a workspace.

    Reports the raw (pre-renormalization) kernel mass defect per source grid
    point, the maximum jump rate, and the initial-density extrema; fails if
    the initial total probability is off by more than 1e-3.
    """
    p0 = model.init(ws)
    total = p0.total()
    if abs(total - 1.0) > 1e-3:
        raise ConfigError(
            f"initial density integrates to {total:.6f}, more than 1e-3 from 1"
        )

    if not model.has_jumps:
        return ValidationReport(True, 0.0, 0.0, 0.0, 0,
                                float(p0.values.min()), float(p0.values.max()),
                                total)

    rots = ws.rotation_matrices.reshape(-1, 3, 3)
    om1, om2 = np.meshgrid(ws.torus.omega, ws.torus.omega, indexing="ij")
    om_grid = np.stack([om1.ravel(), om2.ravel()], axis=-1)   # (MM, 2)
    w_leb = ws.torus.w_leb

    max_rate = 0.0
    defects = []
    n_active = 0
    for s in range(model.n_modes):
        lam = model.rate(rots[:, None, :, :], om_grid[None, :, :], s)
        max_rate = max(max_rate, float(lam.max()))
        active = np.flatnonzero(lam.max(axis=1) > 0)
        n_active += active.size
        for ia in active:
            src = np.flatnonzero(lam[ia] > 0)
            cols = model.kernel_columns(ws, s, rots[ia], src)
            mass = sum(w_leb * k.sum(axis=0) for k in cols.values())
            defects.append(np.abs(mass - 1.0))
    defect = np.concatenate(defects) if defects else np.zeros(1)
    return ValidationReport(False, max_rate, float(defect.max()),
                            float(defect.mean()), n_active,
                            float(p0.values.min()), float(p0.values.max()),
                            total)
