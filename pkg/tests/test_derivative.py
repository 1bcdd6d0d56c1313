import numpy as np
import pytest

from liefp.rotations import exp_hat
from liefp.transform import forward, inverse, spectral_derivative
from liefp.workspace import BandLimit, build_workspace

from helpers import random_band_limited, synthesize_at


@pytest.fixture(scope="module")
def ws():
    return build_workspace(BandLimit(4, 4, 2.0))


def fd_along_axis(ws, coeffs, rots, omegas, axis, h=1e-3):
    """Fourth-order central differences of f(g exp(t e_axis)) at t = 0."""
    def shifted(t):
        if axis <= 3:
            e = np.zeros(3)
            e[axis - 1] = 1.0
            r2 = rots @ exp_hat(t * e)
            return synthesize_at(ws, coeffs, r2, omegas)
        om2 = omegas.copy()
        om2[:, axis - 4] += t
        return synthesize_at(ws, coeffs, rots, om2)

    return (8 * (shifted(h) - shifted(-h)) - (shifted(2 * h) - shifted(-2 * h))) / (12 * h)


def test_derivative_of_constant_is_zero(ws):
    c = np.zeros(ws.n_coeff, dtype=complex)
    ws.block(c, 0)[ws.band.n0, ws.band.n0, 0, 0] = 1.0
    for axis in range(1, 6):
        np.testing.assert_allclose(spectral_derivative(ws, c, axis), 0, atol=1e-15)


def test_axis_out_of_range(ws):
    c = np.zeros(ws.n_coeff, dtype=complex)
    with pytest.raises(ValueError):
        spectral_derivative(ws, c, 0)
    with pytest.raises(ValueError):
        spectral_derivative(ws, c, 6)


def test_torus_derivative_of_cosine(ws):
    n0, L = ws.band.n0, ws.band.L
    c = np.zeros(ws.n_coeff, dtype=complex)
    ws.block(c, 0)[n0 + 1, n0, 0, 0] = 0.5
    ws.block(c, 0)[n0 - 1, n0, 0, 0] = 0.5
    dc = spectral_derivative(ws, c, 4)
    # d/dOmega cos(pi Omega/L) = -(pi/L) sin(pi Omega/L)
    ref = np.zeros(ws.n_coeff, dtype=complex)
    ws.block(ref, 0)[n0 + 1, n0, 0, 0] = 0.5j * np.pi / L
    ws.block(ref, 0)[n0 - 1, n0, 0, 0] = -0.5j * np.pi / L
    np.testing.assert_allclose(dc, ref, atol=1e-14)
    om = ws.torus.omega
    vals = inverse(ws, dc)[0, 0, 0, :, 0]
    np.testing.assert_allclose(vals.real, -(np.pi / L) * np.sin(np.pi * om / L),
                               atol=1e-12)


@pytest.mark.parametrize("axis", [1, 2, 3, 4, 5])
def test_matches_finite_differences(ws, axis):
    rng = np.random.default_rng(40 + axis)
    c = random_band_limited(ws, rng, scale=0.1)
    # sample a batch of grid points as probe locations
    ii = rng.integers(0, 2 * ws.band.l0, size=(24, 3))
    jj = rng.integers(0, 2 * ws.band.n0, size=(24, 2))
    rots = ws.rotation_matrices[ii[:, 0], ii[:, 1], ii[:, 2]]
    omegas = ws.torus.omega[jj]
    dc = spectral_derivative(ws, c, axis)
    spectral_vals = synthesize_at(ws, dc, rots, omegas)
    fd_vals = fd_along_axis(ws, c, rots, omegas, axis)
    assert np.max(np.abs(spectral_vals - fd_vals)) < 1e-6


def test_derivative_then_grid_matches_grid_derivative_pattern(ws):
    # L_3 of U^1 entries: exp(-i m1 alpha) factor differentiates along alpha
    # only through right translation; cross-check one explicit value.
    rng = np.random.default_rng(77)
    c = random_band_limited(ws, rng, scale=0.5)
    rots = ws.rotation_matrices[1, 2, 3][None]
    oms = ws.torus.omega[[2, 5]][None]
    d3 = synthesize_at(ws, spectral_derivative(ws, c, 3), rots, oms)
    fd = fd_along_axis(ws, c, rots, oms, 3)
    np.testing.assert_allclose(d3, fd, atol=1e-7)
