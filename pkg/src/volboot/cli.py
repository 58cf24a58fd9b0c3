"""Command-line front end.

Three commands drive the engine:

* ``size``   -- null-hypothesis fan-chart experiment (fanchart.csv/.svg)
* ``power``  -- local-alternative power experiment (power.csv/.svg)
* ``oracle`` -- discrete-vs-diffusion convergence check (oracle.csv)

plus ``rerun`` which replays a run from its manifest.json.  Every command
writes a manifest sufficient to reproduce its outputs bit-exactly.  Exit
codes: 0 success, 1 configuration error, 2 runtime numerical failure; partial
artifacts are removed on failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np
from scipy.stats import ks_2samp

from . import __version__
from .charts import render_fanchart, render_power
from .distributions import draw_innovations
from .limitoracle import DiffusionSpec, sample_limit_functionals
from .montecarlo import (
    Alternative,
    ExperimentConfig,
    run_power_experiment,
    run_size_experiment,
)
from .rng import SeedPath
from .statistics import STAT_PROBLEM
from .volatility import GarchSpec, JumpSpec, SvSpec, gen_garch_path, gen_jump_path, gen_sv_path

__all__ = ["main"]

_STAT_BY_FLAG = {
    "s": "S",
    "t": "T",
    "tnull": "Tnull",
    "cs": "CS",
    "ct": "CT",
    "r": "R",
    "w": "W",
}

_DGP_BY_FLAG = {"1": "gaussian", "2": "dgp2", "3": "dgp3"}

_DEFAULT_C_GRID = {
    "location": "0,1,2,3,4,5,6,7,8",
    "cusum": "0,2.5,5,7.5,10,12.5,15",
    "unitroot": "0,2.5,5,7.5,10,12.5,15,17.5,20",
}

_ALT_KIND = {"location": "location", "cusum": "cusum_break", "unitroot": "unitroot"}


class ConfigError(ValueError):
    pass


class _Artifacts:
    """Stages output files and publishes them atomically on success."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self._staged: list[tuple[Path, Path]] = []

    def stage(self, name: str) -> Path:
        tmp = self.out_dir / (name + ".tmp")
        self._staged.append((tmp, self.out_dir / name))
        return tmp

    def publish(self) -> list[Path]:
        finals = []
        for tmp, final in self._staged:
            tmp.replace(final)
            finals.append(final)
        return finals

    def discard(self) -> None:
        for tmp, _ in self._staged:
            tmp.unlink(missing_ok=True)


def _default_seed() -> int:
    env = os.environ.get("VOLBOOT_SEED")
    return int(env) if env else 20260824


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master seed (default: VOLBOOT_SEED or built-in)")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--threads", type=int, default=1, help="worker thread cap")


def _add_experiment(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dgp", choices=sorted(_DGP_BY_FLAG), default="1")
    parser.add_argument("--test", choices=sorted(_STAT_BY_FLAG), default="tnull")
    parser.add_argument("--n", type=int, default=500)
    parser.add_argument("--paths", type=int, default=100)
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--B", type=int, default=199)
    parser.add_argument("--law", choices=("gaussian", "rademacher", "mammen"), default="gaussian")
    parser.add_argument("--vol", choices=("garch", "sv", "jump"), default="garch")
    parser.add_argument("--kappa", type=float, default=5.0)
    parser.add_argument("--sigma-bar", type=float, default=1.0)
    parser.add_argument("--sigma-eta", type=float, default=math.sqrt(10.0))
    parser.add_argument("--omega0", type=float, default=0.0, help="jump volatility log-level")
    parser.add_argument("--omega1", type=float, default=1.0, help="jump size loading")
    parser.add_argument("--lam", type=float, default=2.0, help="jump intensity")
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--paper-scale", action="store_true",
                        help="full experiment budget: 50,000 size reps / 10,000 power reps")
    _add_common(parser)


def _vol_spec(args) -> GarchSpec | SvSpec | JumpSpec:
    if args.vol == "garch":
        return GarchSpec(kappa=args.kappa, sigma_bar=args.sigma_bar, sigma_eta=args.sigma_eta)
    if args.vol == "sv":
        return SvSpec(kappa=args.kappa, sigma_bar=args.sigma_bar, sigma_eta=args.sigma_eta)
    return JumpSpec(omega0=args.omega0, omega1=args.omega1, lam=args.lam)


def _vol_from_dict(payload: dict) -> GarchSpec | SvSpec | JumpSpec:
    kind = payload.pop("kind")
    cls = {"GarchSpec": GarchSpec, "SvSpec": SvSpec, "JumpSpec": JumpSpec}[kind]
    return cls(**payload)


def _experiment_config(args, command: str) -> ExperimentConfig:
    stat = _STAT_BY_FLAG[args.test]
    reps = args.reps
    if args.paper_scale:
        reps = 50_000 if command == "size" else 10_000
    alternative = None
    if command == "power":
        grid_text = args.c_grid or _DEFAULT_C_GRID[STAT_PROBLEM[stat]]
        c_grid = tuple(float(x) for x in grid_text.split(","))
        alternative = Alternative(kind=_ALT_KIND[STAT_PROBLEM[stat]], c_grid=c_grid)
    try:
        vol = _vol_spec(args)
        config = ExperimentConfig(
            dgp=_DGP_BY_FLAG[args.dgp],
            vol=vol,
            stat=stat,
            n=args.n,
            n_paths=args.paths,
            n_reps=reps,
            master_seed=args.seed if args.seed is not None else _default_seed(),
            B=args.B,
            law=args.law,
            alternative=alternative,
            alpha=args.alpha,
            threads=args.threads,
        )
        if isinstance(vol, GarchSpec):
            vol.coefficients(args.n)  # fail early on beta_n < 0
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config


def _write_manifest(tmp_path: Path, command: str, config_dict: dict, outputs: list[str],
                    started: float) -> None:
    manifest = {
        "command": command,
        "config": config_dict,
        "tool_version": __version__,
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "duration_seconds": round(time.monotonic() - started, 3),
        "outputs": outputs,
    }
    tmp_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _config_from_manifest(payload: dict) -> ExperimentConfig:
    cfg = dict(payload["config"])
    alt = cfg.pop("alternative", None)
    alternative = Alternative(kind=alt["kind"], c_grid=tuple(alt["c_grid"])) if alt else None
    return ExperimentConfig(
        dgp=cfg["dgp"],
        vol=_vol_from_dict(dict(cfg["vol"])),
        stat=cfg["stat"],
        n=cfg["n"],
        n_paths=cfg["n_paths"],
        n_reps=cfg["n_reps"],
        master_seed=cfg["master_seed"],
        B=cfg["B"],
        law=cfg["law"],
        alternative=alternative,
        alpha=cfg["alpha"],
        q_grid=tuple(cfg["q_grid"]),
        threads=cfg["threads"],
    )


def cmd_size(config: ExperimentConfig, out_dir: Path) -> int:
    started = time.monotonic()
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = _Artifacts(out_dir)
    try:
        table = run_size_experiment(config)
        table.to_csv(artifacts.stage("fanchart.csv"))
        render_fanchart(table, artifacts.stage("fanchart.svg"))
        _write_manifest(artifacts.stage("manifest.json"), "size", config.to_dict(),
                        ["fanchart.csv", "fanchart.svg"], started)
    except (ArithmeticError, FloatingPointError) as exc:
        artifacts.discard()
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 2
    except Exception:
        artifacts.discard()
        raise
    artifacts.publish()
    return 0


def cmd_power(config: ExperimentConfig, out_dir: Path) -> int:
    started = time.monotonic()
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = _Artifacts(out_dir)
    try:
        table = run_power_experiment(config)
        table.to_csv(artifacts.stage("power.csv"))
        render_power(table, artifacts.stage("power.svg"))
        _write_manifest(artifacts.stage("manifest.json"), "power", config.to_dict(),
                        ["power.csv", "power.svg"], started)
    except (ArithmeticError, FloatingPointError) as exc:
        artifacts.discard()
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 2
    except Exception:
        artifacts.discard()
        raise
    artifacts.publish()
    return 0


def _discrete_v1_samples(kind: str, n: int, reps: int, kappa: float, sigma_bar: float,
                         sigma_eta: float, seed: SeedPath) -> np.ndarray:
    v1 = np.empty(reps)
    for i in range(reps):
        path_seed = seed.child("discrete", i)
        if kind == "garch":
            spec = GarchSpec(kappa=kappa, sigma_bar=sigma_bar, sigma_eta=sigma_eta)
            z = draw_innovations("gaussian", n, path_seed.child("z"))
            path = gen_garch_path(spec, n, z)
        else:
            spec = SvSpec(kappa=kappa, sigma_bar=sigma_bar, sigma_eta=sigma_eta)
            path = gen_sv_path(spec, n, path_seed.child("vol"))
        v1[i] = float(np.mean(path.sigmas**2))
    return v1


def cmd_oracle(args) -> int:
    started = time.monotonic()
    if args.steps < 100:
        print("error: --steps must be at least 100", file=sys.stderr)
        return 1
    seed = SeedPath(args.seed if args.seed is not None else _default_seed())
    kind = {"garch": "garch_diffusion", "logou": "log_ou"}[args.kind]
    try:
        spec = DiffusionSpec(kind=kind, kappa=args.kappa, sigma_bar=args.sigma_bar,
                             sigma_eta=args.sigma_eta)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = _Artifacts(out_dir)
    try:
        v1_oracle, m1_oracle = sample_limit_functionals(
            spec, args.steps, args.reps, seed.child("oracle")
        )
        v1_discrete = _discrete_v1_samples(
            args.kind, args.n_discrete, args.reps, args.kappa, args.sigma_bar,
            args.sigma_eta, seed,
        )
        ks = float(ks_2samp(v1_oracle, v1_discrete).statistic)
        with open(artifacts.stage("oracle.csv"), "w", newline="") as fh:
            fh.write("kind,steps,reps,n_discrete,ks_statistic,v1_var_oracle,v1_var_discrete\n")
            fh.write(
                f"{args.kind},{args.steps},{args.reps},{args.n_discrete},"
                f"{ks!r},{float(np.var(v1_oracle))!r},{float(np.var(v1_discrete))!r}\n"
            )
        with open(artifacts.stage("oracle_samples.csv"), "w", newline="") as fh:
            fh.write("replicate,v1_oracle,m1_oracle,v1_discrete\n")
            for i in range(args.reps):
                fh.write(f"{i + 1},{v1_oracle[i]!r},{m1_oracle[i]!r},{v1_discrete[i]!r}\n")
        config_dict = {
            "kind": args.kind, "steps": args.steps, "reps": args.reps,
            "n_discrete": args.n_discrete, "kappa": args.kappa,
            "sigma_bar": args.sigma_bar, "sigma_eta": args.sigma_eta,
            "master_seed": seed.master_seed,
        }
        _write_manifest(artifacts.stage("manifest.json"), "oracle", config_dict,
                        ["oracle.csv", "oracle_samples.csv"], started)
    except (ArithmeticError, FloatingPointError) as exc:
        artifacts.discard()
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 2
    except Exception:
        artifacts.discard()
        raise
    artifacts.publish()
    print(f"oracle two-sample KS: {ks:.4f}")
    return 0


def cmd_rerun(args) -> int:
    payload = json.loads(Path(args.manifest).read_text())
    command = payload["command"]
    if command == "size":
        return cmd_size(_config_from_manifest(payload), args.out)
    if command == "power":
        return cmd_power(_config_from_manifest(payload), args.out)
    raise ConfigError(f"cannot rerun command {command!r} from a manifest")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volboot",
        description="Wild-bootstrap Monte Carlo experiments under non-stationary volatility",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_size = sub.add_parser("size", help="null-hypothesis fan-chart experiment")
    _add_experiment(p_size)

    p_power = sub.add_parser("power", help="local-alternative power experiment")
    _add_experiment(p_power)
    p_power.add_argument("--c-grid", type=str, default=None,
                         help="comma-separated noncentrality grid")

    p_oracle = sub.add_parser("oracle", help="discrete-vs-diffusion convergence check")
    p_oracle.add_argument("--kind", choices=("garch", "logou"), default="garch")
    p_oracle.add_argument("--steps", type=int, default=10_000)
    p_oracle.add_argument("--reps", type=int, default=2_000)
    p_oracle.add_argument("--n-discrete", type=int, default=20_000)
    p_oracle.add_argument("--kappa", type=float, default=5.0)
    p_oracle.add_argument("--sigma-bar", type=float, default=1.0)
    p_oracle.add_argument("--sigma-eta", type=float, default=math.sqrt(10.0))
    _add_common(p_oracle)

    p_rerun = sub.add_parser("rerun", help="replay a run from its manifest")
    p_rerun.add_argument("manifest", type=Path)
    p_rerun.add_argument("--out", type=Path, default=Path("."))

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "size":
            return cmd_size(_experiment_config(args, "size"), args.out)
        if args.command == "power":
            return cmd_power(_experiment_config(args, "power"), args.out)
        if args.command == "oracle":
            return cmd_oracle(args)
        return cmd_rerun(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
