import numpy as np
import pytest

from liefp.errors import ConfigError
from liefp.model import ContinuousDynamics, GshsModel, validate
from liefp.pendulum import PendulumParams, make_model
from liefp.transform import GridDensity
from liefp.workspace import BandLimit, build_workspace


@pytest.fixture(scope="module")
def ws():
    return build_workspace(BandLimit(4, 4, 14.5))


def test_continuous_dynamics_validation():
    with pytest.raises(ConfigError):
        ContinuousDynamics(diffusion=np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(ConfigError):
        ContinuousDynamics(diffusion=np.array([[1.0, 2.0], [2.0, 1.0]]))
    ContinuousDynamics(diffusion=np.array([[1.0, 0.2], [0.2, 1.0]]))


def test_model_shape_validation():
    with pytest.raises(ConfigError):
        GshsModel(n_modes=0, continuous=(), init=lambda ws: None)
    with pytest.raises(ConfigError):
        GshsModel(n_modes=2, continuous=(ContinuousDynamics(),),
                  init=lambda ws: None)


def test_validate_no_jumps(ws):
    params = PendulumParams()
    model = make_model(params, collisions=False)
    report = validate(model, ws)
    assert report.no_jumps
    assert report.init_total == pytest.approx(1.0, abs=1e-12)
    assert "no jumps" in str(report)


def test_validate_pendulum_max_rate(ws):
    params = PendulumParams()
    model = make_model(params)
    report = validate(model, ws)
    assert report.max_rate == pytest.approx(params.lambda_max)
    assert report.n_active_attitudes > 0
    assert "jump rate" in str(report)


def test_validate_rejects_unnormalized_init(ws):
    params = PendulumParams()
    model = make_model(params, collisions=False)

    def bad_init(ws_):
        p = model.init(ws_)
        return GridDensity(ws_, 1.01 * p.values)

    from dataclasses import replace

    broken = replace(model, init=bad_init)
    with pytest.raises(ConfigError, match="1e-3"):
        validate(broken, ws)


def test_validate_reports_constructed_kernel_defect(ws):
    # a kernel that deliberately integrates to 0.97: defect ~ 0.03 reported
    params = PendulumParams()
    base = make_model(params)
    mm = (2 * ws.band.n0) ** 2

    def lossy_kernel(ws_, s_minus, R, src):
        k = np.full((mm, src.size), 0.97 / (mm * ws_.torus.w_leb))
        return {0: k}

    from dataclasses import replace

    lossy = replace(base, kernel_columns=lossy_kernel)
    report = validate(lossy, ws)
    assert report.kernel_defect_max == pytest.approx(0.03, abs=1e-12)


def test_validate_pendulum_kernel_defect_is_large_at_desk_scale(ws):
    # the reset Gaussian is far sub-cell at these grids: raw column masses
    # range from ~0 (mean between nodes) to w' * peak >> 1 (mean on a node),
    # which is exactly why the jump operator renormalizes every column
    params = PendulumParams()
    model = make_model(params)
    report = validate(model, ws)
    assert report.kernel_defect_max > 1.0
    assert report.kernel_defect_mean > 0.5
