"""Secondary acceptance: render all three figure families from a real
desk-scale run produced through the solver CLI, and check that the t = 0
b3 figure's maximum shade sits within 5 degrees of the initial mean axis."""
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from liefp_plots.b3 import main as b3_main, max_shade_direction
from liefp_plots.comparison import main as cmp_main
from liefp_plots.formats import read_b3_marginal
from liefp_plots.omega import main as omega_main

CONFIG = """\
band: {{l0: 8, n0: 8, L: 14.5}}
time: {{dt: 0.005, t_final: 0.05, snapshot_stride: 5}}
model: {{name: pendulum, collisions: true, integrator: rk4}}
mc: {{n_samples: 2000, seed: 11}}
output: {{directory: {out}}}
"""


@pytest.fixture(scope="module")
def desk_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("deskrun")
    out = root / "out"
    cfg = root / "run.yaml"
    cfg.write_text(CONFIG.format(out=out))
    for cmd in ("propagate", "montecarlo"):
        proc = subprocess.run(
            [sys.executable, "-m", "liefp.cli", cmd, "--config", str(cfg)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
    proc = subprocess.run(
        [sys.executable, "-m", "liefp.cli", "export-marginals",
         "--snapshots", str(out / "snapshots"), "--out", str(out / "marg")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return out


def test_all_three_figure_families_render(desk_run):
    figs = desk_run / "figures"
    assert b3_main(["--in", str(desk_run / "marg"), "--out", str(figs)]) == 0
    assert omega_main(["--in", str(desk_run / "marg"), "--out", str(figs)]) == 0
    assert cmp_main(["--in", str(desk_run / "moments.csv"),
                     str(desk_run / "mc_moments.csv"),
                     "--out", str(figs)]) == 0
    rendered = sorted(p.name for p in figs.glob("*.png"))
    assert "comparison.png" in rendered
    assert any(n.startswith("b3_t0.000") for n in rendered)
    assert any(n.startswith("omega_t0.000") for n in rendered)
    print(f"[PASS] plot scripts: rendered {len(rendered)} figures: {rendered}")


def test_initial_b3_max_shade_location(desk_run):
    alpha, beta, values = read_b3_marginal(desk_run / "marg" / "b3_t0.000.csv")
    direction = max_shade_direction(alpha, beta, values)
    target = np.array([-np.sqrt(3) / 2, 0.0, -0.5])  # 60 deg from vertical
    ang = np.degrees(np.arccos(np.clip(direction @ target, -1.0, 1.0)))
    print(f"[{'PASS' if ang < 5 else 'FAIL'}] t=0 b3 max shade "
          f"{ang:.2f} deg from the initial mean axis (< 5)")
    assert ang < 5.0
