"""Command-line entry points: propagate a density, run the Monte Carlo
cross-check, compare moment series, and export marginals.

Run configuration is a YAML tree (see README for the schema); values can be
overridden by LIEFP_-prefixed environment variables (LIEFP_CONFIG, LIEFP_OUT,
LIEFP_SEED, LIEFP_THREADS) and by the corresponding command-line flags, in
that order of precedence.  Exit codes: 0 success, 2 configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import io as lio
from . import transform
from .errors import ConfigError, NumericalError
from .model import validate
from .montecarlo import McConfig, run_ensemble
from .pendulum import PendulumParams, make_model
from .splitting import PropagationRun, run
from .stats import compare, density_moments, marginals
from .workspace import BandLimit, build_workspace


@dataclass
class RunConfig:
    band: BandLimit = field(default_factory=lambda: BandLimit(10, 10, 14.5))
    dt: float = 0.005
    t_final: float = 1.0
    snapshot_stride: int = 10
    collisions: bool = True
    integrator: str = "rk4"
    out_dir: str = "out"
    pendulum: PendulumParams = field(default_factory=PendulumParams)
    mc_samples: int = 100_000
    mc_seed: int = 0

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            with open(path) as fh:
                tree = yaml.safe_load(fh) or {}
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}")
        return cls.from_dict(tree)

    @classmethod
    def from_dict(cls, tree: dict) -> "RunConfig":
        cfg = cls()
        try:
            band = tree.get("band", {})
            L = float(band.get("L", 14.5))
            cfg.band = BandLimit(int(band.get("l0", 10)),
                                 int(band.get("n0", 10)), L)
            tm = tree.get("time", {})
            cfg.dt = float(tm.get("dt", cfg.dt))
            cfg.t_final = float(tm.get("t_final", cfg.t_final))
            cfg.snapshot_stride = int(tm.get("snapshot_stride",
                                             cfg.snapshot_stride))
            model = tree.get("model", {})
            name = model.get("name", "pendulum")
            if name != "pendulum":
                raise ConfigError(f"unknown model '{name}'")
            cfg.collisions = bool(model.get("collisions", True))
            cfg.integrator = str(model.get("integrator", "rk4"))
            if cfg.integrator not in ("rk4", "euler"):
                raise ConfigError(f"unknown integrator '{cfg.integrator}'")
            pend = dict(tree.get("pendulum", {}))
            if pend:
                for key in ("B", "Hc", "Hd"):
                    if key in pend:
                        pend[key] = tuple(map(tuple, pend[key])) \
                            if key != "B" else tuple(pend[key])
                if "fisher_F" in pend:
                    pend["fisher_F"] = np.asarray(pend["fisher_F"], dtype=float)
                pend.setdefault("L", L)
                cfg.pendulum = PendulumParams(**pend)
            else:
                cfg.pendulum = PendulumParams(L=L)
            if cfg.pendulum.L != L:
                raise ConfigError("band.L and pendulum.L must agree")
            mc = tree.get("mc", {})
            cfg.mc_samples = int(mc.get("n_samples", cfg.mc_samples))
            cfg.mc_seed = int(mc.get("seed", cfg.mc_seed))
            out = tree.get("output", {})
            cfg.out_dir = str(out.get("directory", cfg.out_dir))
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"invalid configuration: {exc}")
        return cfg


def _set_threads(n: int) -> None:
    transform._WORKERS = n
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(n)
    except ImportError:  # BLAS threading stays at its default
        pass


def _load_config(args) -> RunConfig:
    path = args.config or os.environ.get("LIEFP_CONFIG")
    if path is None:
        raise ConfigError("no configuration: pass --config or set LIEFP_CONFIG")
    cfg = RunConfig.from_file(path)
    if os.environ.get("LIEFP_OUT"):
        cfg.out_dir = os.environ["LIEFP_OUT"]
    if os.environ.get("LIEFP_SEED"):
        cfg.mc_seed = int(os.environ["LIEFP_SEED"])
    if args.out:
        cfg.out_dir = args.out
    if args.seed is not None:
        cfg.mc_seed = args.seed
    return cfg


def cmd_propagate(args) -> int:
    cfg = _load_config(args)
    ws = build_workspace(cfg.band)
    model = make_model(cfg.pendulum, collisions=cfg.collisions)
    report = validate(model, ws)
    print(report)

    out = Path(cfg.out_dir)
    (out / "snapshots").mkdir(parents=True, exist_ok=True)
    snap_idx = [0]
    summaries = []

    def sink(t: float, p):
        lio.save_snapshot(out / "snapshots" / f"snap_{snap_idx[0]:05d}.lfp1",
                          p, t)
        snap_idx[0] += 1
        summaries.append(density_moments(p, ws, t))

    run_cfg = PropagationRun(model, ws, cfg.dt, cfg.t_final,
                             cfg.snapshot_stride, scheme=cfg.integrator,
                             sink=sink)
    result = run(run_cfg, model.init(ws))
    lio.write_diagnostics(out / "diagnostics.csv", result.diagnostics)
    lio.write_moments(out / "moments.csv", summaries)
    drift = max(abs(d.total - 1.0) for d in result.diagnostics)
    print(f"propagated {len(result.diagnostics)} steps; "
          f"max |probability - 1| = {drift:.3e}")
    print(f"wrote {snap_idx[0]} snapshots to {out / 'snapshots'}")
    return 0


def cmd_montecarlo(args) -> int:
    cfg = _load_config(args)
    model = make_model(cfg.pendulum, collisions=cfg.collisions)
    mc_cfg = McConfig(cfg.mc_samples, cfg.dt, cfg.t_final, cfg.mc_seed,
                      cfg.snapshot_stride)
    result = run_ensemble(model, mc_cfg, window=cfg.pendulum.L)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lio.write_moments(out / "mc_moments.csv", result.summaries)
    print(f"simulated {cfg.mc_samples} samples over "
          f"{int(round(cfg.t_final / cfg.dt))} steps; "
          f"{result.jumps} jumps, "
          f"{result.window_violations} window violations")
    return 0


def cmd_compare(args) -> int:
    a = lio.read_moments(args.spectral)
    b = lio.read_moments(args.mc)
    diffs = compare(a, b)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    lio.write_compare(out / "compare.csv", diffs)
    deg = 180 / np.pi
    print(f"max mean-attitude difference: "
          f"{max(d.attitude_angle for d in diffs) * deg:.3f} deg")
    print(f"max mean-b3 difference:       "
          f"{max(d.b3_angle for d in diffs) * deg:.3f} deg")
    print(f"max |d dispersion|:           "
          f"{max(np.max(np.abs(d.d_dispersion)) for d in diffs):.4f} rad")
    print(f"max |d mean omega|:           "
          f"{max(np.max(np.abs(d.d_mean_omega)) for d in diffs):.4f} rad/s")
    print(f"max |d std omega|:            "
          f"{max(np.max(np.abs(d.d_std_omega)) for d in diffs):.4f} rad/s")
    return 0


def cmd_export_marginals(args) -> int:
    times = [float(x) for x in args.times.split(",")] if args.times else None
    paths = sorted(Path(args.snapshots).glob("*.lfp1")) \
        if Path(args.snapshots).is_dir() else [Path(args.snapshots)]
    if not paths:
        raise ConfigError(f"no snapshots under {args.snapshots}")
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)

    ws = None
    exported = 0
    for path in paths:
        band, _, t, values = lio.load_snapshot(path)
        if times is not None and not any(abs(t - x) < 1e-9 for x in times):
            continue
        if ws is None or ws.band != band:
            ws = build_workspace(band)
        from .transform import GridDensity

        marg = marginals(GridDensity(ws, values), ws)
        lio.write_b3_marginal(out / f"b3_t{t:.3f}.csv", ws, marg.b3)
        lio.write_omega_marginal(out / f"omega_t{t:.3f}.csv", ws, marg.omega)
        exported += 1
    if exported == 0:
        raise ConfigError(f"no snapshot matches times {args.times}")
    print(f"exported marginals for {exported} snapshot(s) to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liefp",
        description="Density propagation on SO(3) x T^2: spectral solver, "
                    "Monte Carlo cross-check, and exports.",
    )
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("LIEFP_THREADS", "0")) or None,
                        help="worker/BLAS thread cap (default: library choice)")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn in [("propagate", cmd_propagate), ("montecarlo", cmd_montecarlo)]:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--out", help="output directory override")
        p.add_argument("--seed", type=int, help="Monte Carlo seed override")
        p.set_defaults(fn=fn)

    p = sub.add_parser("compare")
    p.add_argument("spectral", help="moments.csv from `propagate`")
    p.add_argument("mc", help="mc_moments.csv from `montecarlo`")
    p.add_argument("--out", help="output directory for compare.csv")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("export-marginals")
    p.add_argument("--snapshots", required=True,
                   help="snapshot file or directory of .lfp1 files")
    p.add_argument("--times", help="comma-separated times to export")
    p.add_argument("--out", help="output directory")
    p.set_defaults(fn=cmd_export_marginals)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads:
        _set_threads(args.threads)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
