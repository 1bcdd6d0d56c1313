import csv
from pathlib import Path

import numpy as np
import pytest
import yaml

from liefp import io as lio
from liefp.cli import main
from liefp.pendulum import PendulumParams, make_model
from liefp.transform import GridDensity
from liefp.workspace import BandLimit, build_workspace


def small_config(tmp_path, **overrides):
    tree = {
        "band": {"l0": 4, "n0": 4, "L": 14.5},
        "time": {"dt": 0.005, "t_final": 0.05, "snapshot_stride": 5},
        "model": {"name": "pendulum", "collisions": True, "integrator": "rk4"},
        "mc": {"n_samples": 500, "seed": 7},
        "output": {"directory": str(tmp_path / "out")},
    }
    for key, val in overrides.items():
        tree.setdefault(key, {}).update(val)
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(tree))
    return path


def test_snapshot_roundtrip_bitexact(tmp_path):
    ws = build_workspace(BandLimit(3, 3, 2.5))
    rng = np.random.default_rng(0)
    p = GridDensity(ws, rng.standard_normal((2,) + ws.grid_shape))
    path = tmp_path / "snap.lfp1"
    lio.save_snapshot(path, p, 0.125)
    band, n_modes, t, values = lio.load_snapshot(path)
    assert band == ws.band
    assert n_modes == 2
    assert t == 0.125
    np.testing.assert_array_equal(values, p.values)


def test_snapshot_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.lfp1"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError, match="LFP1"):
        lio.load_snapshot(path)


def test_moments_csv_roundtrip(tmp_path):
    params = PendulumParams()
    ws = build_workspace(BandLimit(4, 4, params.L))
    model = make_model(params, collisions=False)
    from liefp.stats import density_moments

    m = [density_moments(model.init(ws), ws, t=0.5)]
    path = tmp_path / "m.csv"
    lio.write_moments(path, m)
    with open(path) as fh:
        header = fh.readline().strip()
    assert header == ("t,mR11,mR12,mR13,mR21,mR22,mR23,mR31,mR32,mR33,"
                      "b3x,b3y,b3z,dispR1,dispR2,mO1,mO2,sO1,sO2")
    back = lio.read_moments(path)[0]
    np.testing.assert_allclose(back.mean_R, m[0].mean_R, rtol=1e-11)
    np.testing.assert_allclose(back.std_omega, m[0].std_omega, rtol=1e-11)
    assert back.t == 0.5


def test_missing_config_exits_2(tmp_path, capsys):
    rc = main(["propagate", "--config", str(tmp_path / "nope.yaml")])
    assert rc == 2
    assert "nope.yaml" in capsys.readouterr().err


def test_propagate_writes_outputs(tmp_path):
    cfg = small_config(tmp_path)
    rc = main(["propagate", "--config", str(cfg)])
    assert rc == 0
    out = tmp_path / "out"
    snaps = sorted((out / "snapshots").glob("*.lfp1"))
    assert len(snaps) == 3  # t = 0, 0.025, 0.05
    with open(out / "diagnostics.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 10
    assert list(rows[0].keys()) == ["t", "ptotal", "pmin", "alias", "stepms"]
    for row in rows:
        assert abs(float(row["ptotal"]) - 1.0) < 1e-6
    moments = lio.read_moments(out / "moments.csv")
    assert [m.t for m in moments] == [0.0, pytest.approx(0.025), pytest.approx(0.05)]


def test_collisions_flag_matches_zero_rate_run(tmp_path):
    cfg_off = small_config(tmp_path, model={"collisions": False},
                           output={"directory": str(tmp_path / "off")})
    rc = main(["propagate", "--config", str(cfg_off)])
    assert rc == 0

    tree = yaml.safe_load(cfg_off.read_text())
    tree["model"]["collisions"] = True
    tree["pendulum"] = {"lambda_max": 0.0}
    tree["output"]["directory"] = str(tmp_path / "zero")
    cfg_zero = tmp_path / "zero.yaml"
    cfg_zero.write_text(yaml.safe_dump(tree))
    rc = main(["propagate", "--config", str(cfg_zero)])
    assert rc == 0

    for name in ["snap_00000.lfp1", "snap_00001.lfp1"]:
        a = (tmp_path / "off" / "snapshots" / name).read_bytes()
        b = (tmp_path / "zero" / "snapshots" / name).read_bytes()
        assert a == b


def test_montecarlo_same_schema_and_stamps(tmp_path):
    cfg = small_config(tmp_path)
    assert main(["propagate", "--config", str(cfg)]) == 0
    assert main(["montecarlo", "--config", str(cfg)]) == 0
    spec = lio.read_moments(tmp_path / "out" / "moments.csv")
    mc = lio.read_moments(tmp_path / "out" / "mc_moments.csv")
    assert [m.t for m in spec] == [m.t for m in mc]


def test_compare_and_export_marginals(tmp_path, capsys):
    cfg = small_config(tmp_path)
    assert main(["propagate", "--config", str(cfg)]) == 0
    assert main(["montecarlo", "--config", str(cfg)]) == 0
    out = tmp_path / "out"
    rc = main(["compare", str(out / "moments.csv"), str(out / "mc_moments.csv"),
               "--out", str(out)])
    assert rc == 0
    assert "mean-b3" in capsys.readouterr().out
    with open(out / "compare.csv") as fh:
        header = fh.readline().strip()
    assert header == "t,dR_angle,db3_angle,ddispR1,ddispR2,dmO1,dmO2,dsO1,dsO2"

    rc = main(["export-marginals", "--snapshots", str(out / "snapshots"),
               "--times", "0.0", "--out", str(out / "marg")])
    assert rc == 0
    alpha, beta, vals = lio.read_b3_marginal(out / "marg" / "b3_t0.000.csv")
    assert vals.shape == (8, 8)
    om, omvals = lio.read_omega_marginal(out / "marg" / "omega_t0.000.csv")
    assert omvals.shape == (8, 8)
    assert om[0] == -14.5

    rc = main(["export-marginals", "--snapshots", str(out / "snapshots"),
               "--times", "9.9", "--out", str(out / "marg2")])
    assert rc == 2


def test_seed_env_override(tmp_path, monkeypatch):
    cfg = small_config(tmp_path)
    monkeypatch.setenv("LIEFP_SEED", "1234")
    assert main(["montecarlo", "--config", str(cfg),
                 "--out", str(tmp_path / "env")]) == 0
    monkeypatch.delenv("LIEFP_SEED")
    assert main(["montecarlo", "--config", str(cfg), "--seed", "1234",
                 "--out", str(tmp_path / "flag")]) == 0
    a = (tmp_path / "env" / "mc_moments.csv").read_bytes()
    b = (tmp_path / "flag" / "mc_moments.csv").read_bytes()
    assert a == b
