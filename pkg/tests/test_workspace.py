import numpy as np
import pytest

from liefp.workspace import BandLimit, build_workspace, so3_grid, torus_grid


def test_band_limit_validation():
    with pytest.raises(ValueError):
        BandLimit(0, 4, 1.0)
    with pytest.raises(ValueError):
        BandLimit(4, 0, 1.0)
    with pytest.raises(ValueError):
        BandLimit(4, 4, -1.0)


def test_so3_grid_l0_1():
    g = so3_grid(1)
    np.testing.assert_allclose(g.alpha, [0, np.pi])
    np.testing.assert_allclose(g.beta, [np.pi / 4, 3 * np.pi / 4])
    np.testing.assert_allclose(g.gamma, [0, np.pi])


@pytest.mark.parametrize("l0", [1, 2, 5, 11])
def test_quadrature_exact_on_constants(l0):
    g = so3_grid(l0)
    total = (2 * l0) ** 2 * np.sum(g.w_beta)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_torus_grid_example():
    t = torus_grid(2, 1.0)
    np.testing.assert_allclose(t.omega, [-1.0, -0.5, 0.0, 0.5])
    assert t.w_haar == pytest.approx(1 / 16)
    assert t.w_leb == pytest.approx(1 / 16)


def test_torus_grid_weights_scale_with_L():
    t = torus_grid(10, 14.5)
    assert t.w_haar == pytest.approx(1 / 400)
    assert t.w_leb == pytest.approx(14.5**2 / 400)
    assert t.omega[0] == -14.5
    np.testing.assert_allclose(np.diff(t.omega), 14.5 / 10)


def test_workspace_memory_ceiling():
    with pytest.raises(ValueError, match="ceiling"):
        build_workspace(BandLimit(30, 30, 14.5))
    # generous ceiling admits it
    ws = build_workspace(BandLimit(3, 3, 1.0), mem_limit=1 << 40)
    assert ws.n_coeff == sum(36 * (2 * l + 1) ** 2 for l in range(3))


def test_rotation_matrices_match_euler_convention():
    ws = build_workspace(BandLimit(2, 2, 1.0))
    rots = ws.rotation_matrices
    # R(0, beta, 0) maps e3 to (sin beta, 0, cos beta)
    b = ws.so3.beta[1]
    np.testing.assert_allclose(rots[0, 1, 0] @ np.array([0, 0, 1.0]),
                               [np.sin(b), 0, np.cos(b)], atol=1e-14)
    # orthogonality everywhere
    prod = rots @ np.swapaxes(rots, -1, -2)
    np.testing.assert_allclose(prod, np.broadcast_to(np.eye(3), prod.shape),
                               atol=1e-13)


def test_quad_weights_sum_to_L_squared():
    ws = build_workspace(BandLimit(3, 4, 2.5))
    assert np.sum(ws.quad_weights) == pytest.approx(2.5**2, rel=1e-12)
