"""Monte Carlo experiment harness.

Simulates volatility paths, draws innovation replicates conditionally on each
path, runs the wild-bootstrap test per replicate, and aggregates per-path
empirical cdfs of bootstrap p-values (fan charts) or rejection frequencies
under local alternatives (power curves).

Seed lineage: master -> ("path", p) for path generation, then
("rep", r) [-> ("c", i) under an alternative] for the innovation draw and the
bootstrap multipliers of each replicate.  Aggregation is keyed by index, so
results are bit-identical for any worker count.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import lfilter
from scipy.stats import norm

from .bootstrap import BootstrapConfig, run_bootstrap
from .distributions import (
    InnovationDraw,
    conditional_sign_redraw,
    draw_innovations,
)
from .rng import SeedPath
from .statistics import STAT_PROBLEM, Sample
from .volatility import (
    GarchSpec,
    JumpSpec,
    SvSpec,
    VolatilityPath,
    garch_recovered_moduli,
    gen_garch_path,
    gen_jump_path,
    gen_sv_path,
)

__all__ = [
    "Alternative",
    "ExperimentConfig",
    "FanChartTable",
    "PowerTable",
    "default_q_grid",
    "generate_experiment_path",
    "conditional_innovations",
    "run_size_experiment",
    "run_power_experiment",
    "ks_distance",
]


def default_q_grid() -> np.ndarray:
    """Fan-chart evaluation grid 0.01, 0.02, ..., 0.99."""
    return np.round(np.arange(1, 100) / 100.0, 2)


@dataclass(frozen=True)
class Alternative:
    """Local-alternative family and its noncentrality grid.

    kind "location": y_t = -c/sqrt(n) + eps_t, tested against theta_bar = 0;
    kind "cusum_break": mean shifts from 0 to c/sqrt(n) after t = floor(n/2);
    kind "unitroot": y_t = (1 - c/n) y_{t-1} + eps_t.
    """

    kind: str
    c_grid: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("location", "cusum_break", "unitroot"):
            raise ValueError(f"unknown alternative kind {self.kind!r}")
        grid = tuple(float(c) for c in self.c_grid)
        if len(grid) == 0:
            raise ValueError("c_grid must be nonempty")
        if any(c < 0 for c in grid) or list(grid) != sorted(grid):
            raise ValueError("c_grid must be nonnegative and sorted")
        object.__setattr__(self, "c_grid", grid)


@dataclass(frozen=True)
class ExperimentConfig:
    dgp: str  # innovation law: "gaussian" (DGP 1), "dgp2", "dgp3"
    vol: GarchSpec | SvSpec | JumpSpec
    stat: str
    n: int
    n_paths: int
    n_reps: int
    master_seed: int
    B: int = 199
    law: str = "gaussian"
    alternative: Alternative | None = None
    alpha: float = 0.05
    q_grid: tuple[float, ...] = field(default_factory=lambda: tuple(default_q_grid()))
    threads: int = 1

    def __post_init__(self) -> None:
        if self.n_paths < 1 or self.n_reps < 1:
            raise ValueError("n_paths and n_reps must be at least 1")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.stat not in STAT_PROBLEM:
            raise ValueError(f"unknown statistic {self.stat!r}")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")

    @property
    def problem(self) -> str:
        return STAT_PROBLEM[self.stat]

    def to_dict(self) -> dict:
        vol = {"kind": type(self.vol).__name__}
        vol.update({k: v for k, v in vars(self.vol).items()})
        out = {
            "dgp": self.dgp,
            "vol": vol,
            "stat": self.stat,
            "problem": self.problem,
            "n": self.n,
            "n_paths": self.n_paths,
            "n_reps": self.n_reps,
            "B": self.B,
            "law": self.law,
            "alpha": self.alpha,
            "master_seed": self.master_seed,
            "q_grid": list(self.q_grid),
            "threads": self.threads,
        }
        if self.alternative is not None:
            out["alternative"] = {
                "kind": self.alternative.kind,
                "c_grid": list(self.alternative.c_grid),
            }
        return out


def _float_cell(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class FanChartTable:
    """Per-path empirical cdfs of bootstrap p-values plus their average."""

    q_grid: np.ndarray
    per_path_cdf: np.ndarray  # (n_paths, len(q_grid))
    unconditional_cdf: np.ndarray
    metadata: dict

    def __post_init__(self) -> None:
        if self.per_path_cdf.ndim != 2 or self.per_path_cdf.shape[1] != self.q_grid.shape[0]:
            raise ValueError("per_path_cdf shape does not match q_grid")

    @property
    def n_paths(self) -> int:
        return self.per_path_cdf.shape[0]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["path_id", "q", "ecdf"])
            for p in range(self.n_paths):
                for q, v in zip(self.q_grid, self.per_path_cdf[p]):
                    writer.writerow([p + 1, _float_cell(q), _float_cell(v)])
            for q, v in zip(self.q_grid, self.unconditional_cdf):
                writer.writerow(["unconditional", _float_cell(q), _float_cell(v)])

    @classmethod
    def from_csv(cls, path: str | Path) -> "FanChartTable":
        per_path: dict[int, list[float]] = {}
        qs: list[float] = []
        uncond: list[float] = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                if row["path_id"] == "unconditional":
                    uncond.append(float(row["ecdf"]))
                    continue
                pid = int(row["path_id"])
                per_path.setdefault(pid, []).append(float(row["ecdf"]))
                if pid == 1:
                    qs.append(float(row["q"]))
        mat = np.array([per_path[p] for p in sorted(per_path)])
        return cls(
            q_grid=np.asarray(qs),
            per_path_cdf=mat,
            unconditional_cdf=np.asarray(uncond),
            metadata={},
        )


@dataclass(frozen=True)
class PowerTable:
    """Per-path rejection frequencies at level alpha along the c grid."""

    c_grid: np.ndarray
    per_path_rejection: np.ndarray  # (n_paths, len(c_grid))
    alpha: float
    metadata: dict

    @property
    def n_paths(self) -> int:
        return self.per_path_rejection.shape[0]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["path_id", "c", "rejection_rate"])
            for p in range(self.n_paths):
                for c, v in zip(self.c_grid, self.per_path_rejection[p]):
                    writer.writerow([p + 1, _float_cell(c), _float_cell(v)])


def generate_experiment_path(config: ExperimentConfig, p: int) -> VolatilityPath:
    """Volatility path number ``p`` (1-based) for this experiment.

    GARCH paths are driven by innovations from the experiment's DGP; SV and
    jump paths only consume their own seed stream.
    """
    seed = SeedPath(config.master_seed).child("path", p)
    vol = config.vol
    if isinstance(vol, GarchSpec):
        z = draw_innovations(config.dgp, config.n, seed.child("z"))
        return gen_garch_path(vol, config.n, z)
    if isinstance(vol, SvSpec):
        return gen_sv_path(vol, config.n, seed.child("vol"))
    return gen_jump_path(vol, config.n, seed.child("vol"))


def conditional_innovations(
    dgp: str,
    path: VolatilityPath,
    seed: SeedPath,
    moduli: np.ndarray | None = None,
) -> InnovationDraw:
    """Draw the innovations conditionally on a volatility path.

    For GARCH paths the moduli |z_t|, t <= n-1, are fixed by the path; signs
    are redrawn from their conditional law and z_n comes from the unconditional
    distribution.  For SV and jump paths z is independent of the path, so the
    conditional draw is just an unconditional one.
    """
    if not path.needs_z:
        return draw_innovations(dgp, path.n, seed.child("z"))
    if moduli is None:
        moduli = garch_recovered_moduli(path.spec, path)
    signs = conditional_sign_redraw(moduli, dgp, seed.child("signs"))
    z_last = draw_innovations(dgp, 1, seed.child("zn")).z
    z = np.concatenate((signs * moduli, z_last))
    return InnovationDraw.from_z(z, dgp)


def _null_sample(problem: str, eps: np.ndarray) -> Sample:
    if problem == "location":
        return Sample(y=eps, model="location", theta_bar=0.0)
    if problem == "cusum":
        return Sample(y=eps, model="cusum")
    return Sample(y=np.cumsum(eps), model="unitroot")


def _alternative_sample(kind: str, c: float, eps: np.ndarray) -> Sample:
    n = eps.shape[0]
    if kind == "location":
        return Sample(y=eps - c / np.sqrt(n), model="location", theta_bar=0.0)
    if kind == "cusum_break":
        shift = np.zeros(n)
        shift[n // 2 :] = c / np.sqrt(n)
        return Sample(y=eps + shift, model="cusum")
    # unitroot: y_t = (1 - c/n) y_{t-1} + eps_t
    y = lfilter([1.0], [1.0, -(1.0 - c / n)], eps)
    return Sample(y=y, model="unitroot")


def _path_seed(config: ExperimentConfig, p: int) -> SeedPath:
    return SeedPath(config.master_seed).child("path", p)


def _replicate_pvalue(
    config: ExperimentConfig, path, moduli, rep_seed: SeedPath, c: float | None
) -> float:
    z = conditional_innovations(config.dgp, path, rep_seed, moduli=moduli)
    eps = path.sigmas * z.z
    if c is None:
        sample = _null_sample(config.problem, eps)
    else:
        sample = _alternative_sample(config.alternative.kind, c, eps)
    boot = BootstrapConfig(seed=rep_seed.child("bootstrap"), B=config.B, law=config.law)
    return run_bootstrap(sample, config.stat, boot).p_value


def _size_path_row(config: ExperimentConfig, p: int) -> np.ndarray:
    path = generate_experiment_path(config, p)
    moduli = garch_recovered_moduli(path.spec, path) if path.needs_z else None
    seed = _path_seed(config, p)
    pvals = np.empty(config.n_reps)
    for r in range(1, config.n_reps + 1):
        pvals[r - 1] = _replicate_pvalue(config, path, moduli, seed.child("rep", r), None)
    q = np.asarray(config.q_grid)
    return np.mean(pvals[:, None] <= q[None, :], axis=0)


def _power_path_row(config: ExperimentConfig, p: int) -> np.ndarray:
    path = generate_experiment_path(config, p)
    moduli = garch_recovered_moduli(path.spec, path) if path.needs_z else None
    seed = _path_seed(config, p)
    c_grid = config.alternative.c_grid
    rej = np.empty(len(c_grid))
    for i, c in enumerate(c_grid):
        c_seed = seed.child("c", i)
        hits = 0
        for r in range(1, config.n_reps + 1):
            pv = _replicate_pvalue(config, path, moduli, c_seed.child("rep", r), c)
            hits += pv <= config.alpha
        rej[i] = hits / config.n_reps
    return rej


def _map_paths(config: ExperimentConfig, worker) -> np.ndarray:
    ids = range(1, config.n_paths + 1)
    if config.threads == 1:
        rows = [worker(config, p) for p in ids]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            rows = list(pool.map(lambda p: worker(config, p), ids))
    return np.vstack(rows)


def run_size_experiment(config: ExperimentConfig) -> FanChartTable:
    """Null-hypothesis experiment: fan chart of conditional p-value cdfs."""
    if config.alternative is not None:
        raise ValueError("size experiment must not carry an alternative")
    per_path = _map_paths(config, _size_path_row)
    return FanChartTable(
        q_grid=np.asarray(config.q_grid),
        per_path_cdf=per_path,
        unconditional_cdf=per_path.mean(axis=0),
        metadata=config.to_dict(),
    )


def run_power_experiment(config: ExperimentConfig) -> PowerTable:
    """Local-alternative experiment: per-path rejection frequencies against c."""
    if config.alternative is None:
        raise ValueError("power experiment requires an alternative")
    expected = {"location": "location", "cusum": "cusum_break", "unitroot": "unitroot"}
    if config.alternative.kind != expected[config.problem]:
        raise ValueError(
            f"alternative kind {config.alternative.kind!r} does not match "
            f"problem {config.problem!r}"
        )
    per_path = _map_paths(config, _power_path_row)
    return PowerTable(
        c_grid=np.asarray(config.alternative.c_grid),
        per_path_rejection=per_path,
        alpha=config.alpha,
        metadata=config.to_dict(),
    )


def ks_distance(ecdf: np.ndarray, grid: np.ndarray, reference="uniform01") -> float:
    """Sup-norm distance between cdf values on a grid and a reference cdf."""
    ecdf = np.asarray(ecdf, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if ecdf.shape != grid.shape or ecdf.size == 0:
        raise ValueError("ecdf and grid must be nonempty and congruent")
    if np.any(np.diff(ecdf) < 0) or np.any(ecdf < 0) or np.any(ecdf > 1):
        raise ValueError("ecdf values must be nondecreasing and within [0, 1]")
    if reference == "uniform01":
        ref = np.clip(grid, 0.0, 1.0)
    elif reference == "normalstd":
        ref = norm.cdf(grid)
    elif callable(reference):
        ref = np.asarray(reference(grid), dtype=float)
    else:
        raise ValueError(f"unknown reference {reference!r}")
    return float(np.max(np.abs(ecdf - ref)))


def write_metadata(path: str | Path, config: ExperimentConfig, extra: dict | None = None) -> None:
    payload = {"config": config.to_dict()}
    if extra:
        payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
