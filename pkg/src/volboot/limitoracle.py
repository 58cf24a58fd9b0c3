"""Continuous-time limit oracle.

Simulates the diffusion limits of the discrete volatility generators (an
Ornstein-Uhlenbeck process in log variance, and a variance diffusion with
proportional volatility-of-volatility) by Euler-Maruyama on a fine grid, and
returns the limit functionals used for convergence checks: the integrated
variance v1 = int_0^1 sigma^2(u) du and the stochastic integral
m1 = int_0^1 sigma(u) dB_z(u).

The drift is mean-reverting, -kappa (x - xbar); ``drift_sign=+1`` flips it for
sensitivity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .rng import SeedPath

__all__ = [
    "DiffusionSpec",
    "LimitFunctionals",
    "VariancePositivityError",
    "simulate_limit",
    "sample_limit_functionals",
    "local_power_formula",
]


class VariancePositivityError(ArithmeticError):
    """Euler step drove the variance nonpositive; retry with finer steps."""


@dataclass(frozen=True)
class DiffusionSpec:
    kind: str  # "log_ou" | "garch_diffusion"
    kappa: float
    sigma_bar: float
    sigma_eta: float
    correlation: float = 0.0
    drift_sign: int = -1

    def __post_init__(self) -> None:
        if self.kind not in ("log_ou", "garch_diffusion"):
            raise ValueError(f"unknown diffusion kind {self.kind!r}")
        if self.kappa < 0.0:
            raise ValueError("kappa must be nonnegative")
        if self.sigma_bar <= 0.0:
            raise ValueError("sigma_bar must be positive")
        if self.sigma_eta < 0.0:
            raise ValueError("sigma_eta must be nonnegative")
        if not -1.0 <= self.correlation <= 1.0:
            raise ValueError("correlation must lie in [-1, 1]")
        if self.drift_sign not in (-1, 1):
            raise ValueError("drift_sign must be -1 or +1")


@dataclass(frozen=True)
class LimitFunctionals:
    v1: float
    m1: float
    path_grid: np.ndarray  # sigma^2 on the step grid

    def __post_init__(self) -> None:
        if self.v1 <= 0.0:
            raise ValueError("integrated variance must be positive")


def _correlated_increments(
    rng: np.random.Generator, steps: int, rho: float, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    db_z = rng.standard_normal(steps) * math.sqrt(dt)
    db_w = rng.standard_normal(steps) * math.sqrt(dt)
    db_eta = rho * db_z + math.sqrt(1.0 - rho**2) * db_w
    return db_eta, db_z


def simulate_limit(
    spec: DiffusionSpec, steps: int, seed: SeedPath, exact_ou: bool = False
) -> LimitFunctionals:
    """One replicate of the limit diffusion and its functionals.

    ``exact_ou`` replaces the Euler step for the log-variance OU process with
    exact Gaussian transition sampling, removing discretization error.
    """
    if steps < 100:
        raise ValueError("steps must be at least 100")
    if exact_ou and spec.kind != "log_ou":
        raise ValueError("exact transition sampling applies to the log-OU diffusion only")
    dt = 1.0 / steps
    rng = seed.generator()
    db_eta, db_z = _correlated_increments(rng, steps, spec.correlation, dt)
    var = np.empty(steps + 1)
    if spec.kind == "log_ou":
        xbar = math.log(spec.sigma_bar**2)
        x = xbar
        var[0] = math.exp(x)
        if exact_ou:
            # exact OU transition: kappa > 0 uses the stationary-style conditional
            # law; kappa = 0 degenerates to Brownian increments
            phi = math.exp(-spec.kappa * dt)
            if spec.kappa > 0.0:
                step_sd = spec.sigma_eta * math.sqrt((1.0 - phi**2) / (2.0 * spec.kappa))
            else:
                step_sd = spec.sigma_eta * math.sqrt(dt)
            shocks = step_sd * rng.standard_normal(steps)
            for k in range(steps):
                x = xbar + phi * (x - xbar) + shocks[k]
                var[k + 1] = math.exp(x)
        else:
            for k in range(steps):
                x = x + spec.drift_sign * spec.kappa * (x - xbar) * dt + spec.sigma_eta * db_eta[k]
                var[k + 1] = math.exp(x)
    else:
        vbar = spec.sigma_bar**2
        v = vbar
        var[0] = v
        for k in range(steps):
            v = v + spec.drift_sign * spec.kappa * (v - vbar) * dt + spec.sigma_eta * v * db_eta[k]
            if v <= 0.0:
                raise VariancePositivityError(
                    f"variance hit {v:.3e} at step {k + 1}/{steps}"
                )
            var[k + 1] = v
    v1 = float(np.sum(var[:-1]) * dt)  # left Riemann sum
    m1 = float(np.sum(np.sqrt(var[:-1]) * db_z))  # Ito-forward sum
    return LimitFunctionals(v1=v1, m1=m1, path_grid=var)


def sample_limit_functionals(
    spec: DiffusionSpec,
    steps: int,
    reps: int,
    seed: SeedPath,
    exact_ou: bool = False,
    max_refinements: int = 6,
) -> tuple[np.ndarray, np.ndarray]:
    """(v1, m1) samples over ``reps`` independent replicates.

    A replicate whose Euler variance path turns nonpositive is rerun on its own
    seed lineage with doubled steps until it succeeds.
    """
    v1 = np.empty(reps)
    m1 = np.empty(reps)
    for i in range(reps):
        n_steps = steps
        for attempt in range(max_refinements + 1):
            try:
                res = simulate_limit(spec, n_steps, seed.child("rep", i), exact_ou=exact_ou)
                break
            except VariancePositivityError:
                if attempt == max_refinements:
                    raise
                n_steps *= 2
        v1[i] = res.v1
        m1[i] = res.m1
    return v1, m1


def local_power_formula(alpha: float, c: float, v1: float) -> float:
    """Conditional local power of the left-tailed mean test,
    Phi(Phi^{-1}(alpha) - c * v1^{-1/2}), for a noncentrality c (the scaled
    location shift) and integrated variance v1."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if v1 <= 0.0:
        raise ValueError("v1 must be positive")
    return float(norm.cdf(norm.ppf(alpha) - c / math.sqrt(v1)))
