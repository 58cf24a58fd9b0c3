"""Wild bootstrap engine.

Builds the problem-specific residuals, multiplies them by i.i.d. mean-zero
unit-variance multipliers, recomputes the test statistic on each bootstrap
sample, and turns the replicates into a p-value.

Replicate ``b`` uses row ``b`` of a multiplier block derived from the config's
seed lineage, so any single replicate is reproducible in isolation and the
whole run is order-insensitive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .distributions import draw_multipliers
from .rng import SeedPath
from .statistics import (
    STAT_PROBLEM,
    STAT_TAIL,
    DegenerateSampleError,
    Sample,
    compute_statistic,
)

__all__ = [
    "BootstrapConfig",
    "BootstrapRun",
    "residuals_for",
    "wild_resample",
    "bootstrap_statistic",
    "bootstrap_statistics_batch",
    "p_value",
    "run_bootstrap",
]


@dataclass(frozen=True)
class BootstrapConfig:
    seed: SeedPath
    B: int = 199
    law: str = "gaussian"

    def __post_init__(self) -> None:
        if self.B < 1:
            raise ValueError("B must be at least 1")


@dataclass(frozen=True)
class BootstrapRun:
    """Original statistic, its B bootstrap replicates, and the p-value."""

    stat: str
    tail: str
    tau_n: float
    tau_star: np.ndarray
    p_value: float

    @property
    def B(self) -> int:
        return self.tau_star.shape[0]

    def to_json(self, include_replicates: bool = False) -> str:
        payload = {
            "stat": self.stat,
            "tail": self.tail,
            "tau_n": self.tau_n,
            "B": self.B,
            "p_value": self.p_value,
        }
        if include_replicates:
            payload["tau_star"] = [float(x) for x in self.tau_star]
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "BootstrapRun":
        payload = json.loads(text)
        tau_star = np.asarray(payload.get("tau_star", []), dtype=float)
        return cls(
            stat=payload["stat"],
            tail=payload["tail"],
            tau_n=payload["tau_n"],
            tau_star=tau_star,
            p_value=payload["p_value"],
        )


def residuals_for(problem: str, sample: Sample) -> np.ndarray:
    """Problem-specific residuals: null-imposed for location (y - theta_bar)
    and unit root (Delta y with y_0 = 0), demeaned for CUSUM."""
    if sample.model != problem:
        raise ValueError(f"sample model {sample.model!r} does not match problem {problem!r}")
    y = sample.y
    if problem == "location":
        return y - sample.theta_bar
    if problem == "cusum":
        return y - y.mean()
    if problem == "unitroot":
        return np.diff(y, prepend=0.0)
    raise ValueError(f"unknown problem {problem!r}")


def _multiplier_block(config: BootstrapConfig, n: int) -> np.ndarray:
    """The (B, n) multiplier matrix for this config; row b-1 backs replicate b."""
    flat = draw_multipliers(config.law, config.B * n, config.seed.child("multipliers"))
    return flat.reshape(config.B, n)


def wild_resample(residuals: np.ndarray, config: BootstrapConfig, b: int) -> np.ndarray:
    """Bootstrap shocks eps*_t = residual_t * w*_t for replicate b (1-based)."""
    residuals = np.asarray(residuals, dtype=float)
    if residuals.shape[0] == 0:
        raise ValueError("residuals must be nonempty")
    if not 1 <= b <= config.B:
        raise ValueError(f"replicate index must satisfy 1 <= b <= B, got {b}")
    return residuals * _multiplier_block(config, residuals.shape[0])[b - 1]


def bootstrap_statistics_batch(stat: str, eps_star: np.ndarray) -> np.ndarray:
    """Bootstrap statistics for a (B, n) matrix of bootstrap shocks, one per row.

    Location and CUSUM statistics are applied to the shocks directly; the unit
    root statistics rebuild y*_t by cumulative summation with y*_0 = 0.
    """
    eps_star = np.atleast_2d(np.asarray(eps_star, dtype=float))
    n = eps_star.shape[1]
    if n == 0:
        raise ValueError("bootstrap shocks must be nonempty")
    sqrt_n = np.sqrt(n)
    if stat == "S":
        return eps_star.sum(axis=1) / sqrt_n
    if stat == "Tnull":
        m1 = eps_star.sum(axis=1) / sqrt_n
        u1 = (eps_star**2).sum(axis=1) / n
        _check_positive(u1)
        return m1 / np.sqrt(u1)
    if stat == "T":
        mean = eps_star.mean(axis=1)
        s2 = ((eps_star - mean[:, None]) ** 2).mean(axis=1)
        _check_positive(s2)
        return sqrt_n * mean / np.sqrt(s2)
    if stat in ("CS", "CT"):
        m = np.cumsum(eps_star, axis=1) / sqrt_n
        m1 = m[:, -1]
        frac = np.arange(1, n + 1) / n
        excursion = np.max(np.abs(m - frac[None, :] * m1[:, None]), axis=1)
        if stat == "CS":
            return excursion
        u1 = (eps_star**2).sum(axis=1) / n
        s2 = u1 - m1**2 / n
        _check_positive(s2)
        return excursion / np.sqrt(s2)
    if stat in ("R", "W"):
        y = np.cumsum(eps_star, axis=1)
        y_lag = np.concatenate((np.zeros((y.shape[0], 1)), y[:, :-1]), axis=1)
        num = 0.5 * (y[:, -1] ** 2 - (eps_star**2).sum(axis=1))
        den = (y_lag**2).sum(axis=1)
        _check_positive(den)
        theta = num / den
        if stat == "R":
            return n * theta
        s2 = ((eps_star - theta[:, None] * y_lag) ** 2).mean(axis=1)
        _check_positive(s2)
        return theta * np.sqrt(den) / np.sqrt(s2)
    raise ValueError(f"unknown statistic {stat!r}")


def _check_positive(values: np.ndarray) -> None:
    if np.any(values <= 0.0):
        raise DegenerateSampleError("degenerate denominator in bootstrap statistic")


def bootstrap_statistic(stat: str, eps_star: np.ndarray) -> float:
    """The bootstrap statistic for a single bootstrap shock vector."""
    return float(bootstrap_statistics_batch(stat, np.asarray(eps_star)[None, :])[0])


def p_value(tau_n: float, tau_star: np.ndarray, tail: str) -> float:
    """Finite-B bootstrap p-value, (1 + #extreme) / (B + 1); ties count as extreme."""
    tau_star = np.asarray(tau_star, dtype=float)
    if tau_star.shape[0] == 0:
        raise ValueError("tau_star must be nonempty")
    if tail == "left":
        count = int(np.count_nonzero(tau_star <= tau_n))
    elif tail == "right":
        count = int(np.count_nonzero(tau_star >= tau_n))
    else:
        raise ValueError(f"unknown tail {tail!r}")
    return (1 + count) / (tau_star.shape[0] + 1)


def run_bootstrap(sample: Sample, stat: str, config: BootstrapConfig) -> BootstrapRun:
    """Compute the original statistic, B wild-bootstrap replicates and the p-value."""
    problem = STAT_PROBLEM.get(stat)
    if problem is None:
        raise ValueError(f"unknown statistic {stat!r}")
    tau_n = compute_statistic(sample, stat).value
    residuals = residuals_for(problem, sample)
    eps_star = residuals[None, :] * _multiplier_block(config, residuals.shape[0])
    tau_star = bootstrap_statistics_batch(stat, eps_star)
    tail = STAT_TAIL[stat]
    return BootstrapRun(
        stat=stat,
        tail=tail,
        tau_n=tau_n,
        tau_star=tau_star,
        p_value=p_value(tau_n, tau_star, tail),
    )
