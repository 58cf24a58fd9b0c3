"""Volatility path generators.

Three generators produce the per-period volatility sequences used by the
simulation engine: a near-integrated log stochastic-volatility autoregression,
a near-integrated GARCH(1,1) recursion, and a compound-Poisson jump process in
log volatility.  Paths carry their generating spec so that downstream code can
condition on a path (for GARCH this means recovering the innovation moduli by
inverting the recursion).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .distributions import InnovationDraw
from .rng import SeedPath

__all__ = [
    "VolatilityPath",
    "SvSpec",
    "GarchSpec",
    "JumpSpec",
    "gen_sv_path",
    "gen_garch_path",
    "gen_jump_path",
    "garch_inverted_modulus",
    "garch_recovered_moduli",
]


class PathInversionError(ValueError):
    """Raised when a volatility path is inconsistent with its GARCH spec."""


@dataclass(frozen=True)
class VolatilityPath:
    """A strictly positive volatility sequence sigma_1..sigma_n.

    ``needs_z`` flags generators that consumed the innovation sequence
    (GARCH), in which case conditioning on the path constrains the innovation
    moduli.
    """

    sigmas: np.ndarray
    n: int
    spec: object
    needs_z: bool

    def __post_init__(self) -> None:
        sig = np.asarray(self.sigmas, dtype=float)
        if sig.shape != (self.n,):
            raise ValueError("sigmas must have length n")
        if np.any(sig <= 0.0) or not np.all(np.isfinite(sig)):
            raise ValueError("all volatilities must be finite and strictly positive")
        object.__setattr__(self, "sigmas", sig)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "sigma"])
            for t, s in enumerate(self.sigmas, start=1):
                writer.writerow([t, repr(float(s))])


@dataclass(frozen=True)
class SvSpec:
    """Near-integrated log-SV autoregression parameters."""

    kappa: float
    sigma_bar: float
    sigma_eta: float
    initial_log_var: float | None = None

    def __post_init__(self) -> None:
        if self.kappa < 0.0:
            raise ValueError("kappa must be nonnegative")
        if self.sigma_bar <= 0.0:
            raise ValueError("sigma_bar must be positive")
        if self.sigma_eta <= 0.0:
            raise ValueError("sigma_eta must be positive")

    @property
    def log_var0(self) -> float:
        if self.initial_log_var is None:
            return math.log(self.sigma_bar**2)
        return self.initial_log_var


@dataclass(frozen=True)
class GarchSpec:
    """Near-integrated GARCH(1,1) parameters.

    The per-sample coefficients are omega_n = sigma_bar^2 * kappa / n,
    alpha_n = sigma_eta / sqrt(2 n), beta_n = 1 - kappa/n - alpha_n; the spec
    is only valid at sample sizes where beta_n >= 0.
    """

    kappa: float
    sigma_bar: float
    sigma_eta: float
    initial_var: float | None = None

    def __post_init__(self) -> None:
        if self.kappa < 0.0:
            raise ValueError("kappa must be nonnegative")
        if self.sigma_bar <= 0.0:
            raise ValueError("sigma_bar must be positive")
        if self.sigma_eta <= 0.0:
            raise ValueError("sigma_eta must be positive")
        if self.initial_var is not None and self.initial_var <= 0.0:
            raise ValueError("initial_var must be positive")

    def coefficients(self, n: int) -> tuple[float, float, float]:
        """(omega_n, alpha_n, beta_n) at sample size ``n``; beta_n < 0 is an error."""
        omega = self.sigma_bar**2 * self.kappa / n
        alpha = self.sigma_eta / math.sqrt(2.0 * n)
        beta = 1.0 - self.kappa / n - alpha
        if beta < 0.0:
            raise ValueError(
                f"GARCH coefficients invalid at n={n}: beta_n={beta:.4f} < 0 "
                f"(sigma_eta={self.sigma_eta}, kappa={self.kappa})"
            )
        return omega, alpha, beta

    @property
    def var1(self) -> float:
        if self.initial_var is None:
            return self.sigma_bar**2
        return self.initial_var


@dataclass(frozen=True)
class JumpSpec:
    """Compound-Poisson jump volatility: sigma_t = exp(omega0 + omega1 * J_t)."""

    omega0: float
    omega1: float
    lam: float
    jump_law: str = "gaussian"

    def __post_init__(self) -> None:
        if self.lam <= 0.0:
            raise ValueError("jump intensity lambda must be positive")
        if self.jump_law != "gaussian":
            raise ValueError("only gaussian jump sizes are supported")


def gen_sv_path(spec: SvSpec, n: int, seed: SeedPath) -> VolatilityPath:
    """Iterate log sigma_t^2 = phi log sigma_{t-1}^2 + (1-phi) log sigma_bar^2
    + n^{-1/2} eta_{t-1}, with phi = exp(-kappa/n).

    The shock entering sigma_t^2 is eta_{t-1}, so the first step consumes a
    pre-sample draw eta_0; eta are i.i.d. N(0, sigma_eta^2).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    phi = math.exp(-spec.kappa / n)
    log_sbar2 = math.log(spec.sigma_bar**2)
    eta = spec.sigma_eta * seed.generator().standard_normal(n)  # eta_0 .. eta_{n-1}
    scale = 1.0 / math.sqrt(n)
    log_var = np.empty(n)
    x = spec.log_var0
    for t in range(n):
        x = phi * x + (1.0 - phi) * log_sbar2 + scale * eta[t]
        log_var[t] = x
    return VolatilityPath(sigmas=np.exp(0.5 * log_var), n=n, spec=spec, needs_z=False)


def gen_garch_path(spec: GarchSpec, n: int, z: InnovationDraw) -> VolatilityPath:
    """Iterate sigma_t^2 = omega_n + alpha_n sigma_{t-1}^2 z_{t-1}^2
    + beta_n sigma_{t-1}^2 from sigma_1^2 = initial_var, consuming z_1..z_{n-1}.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if len(z) < n:
        raise ValueError("innovation draw shorter than n")
    omega, alpha, beta = spec.coefficients(n)
    z2 = z.z[: n - 1] ** 2
    var = np.empty(n)
    v = spec.var1
    var[0] = v
    for t in range(1, n):
        v = omega + (alpha * z2[t - 1] + beta) * v
        var[t] = v
    return VolatilityPath(sigmas=np.sqrt(var), n=n, spec=spec, needs_z=True)


def gen_jump_path(spec: JumpSpec, n: int, seed: SeedPath) -> VolatilityPath:
    """Bernoulli(lambda/n) jump times, i.i.d. jump sizes, exponentiated cumsum."""
    if n < 1:
        raise ValueError("n must be at least 1")
    p = spec.lam / n
    if p > 1.0:
        raise ValueError(f"jump probability lambda/n = {p} exceeds 1")
    rng = seed.generator()
    indicators = rng.random(n) < p
    sizes = rng.standard_normal(n)
    j = np.cumsum(np.where(indicators, sizes, 0.0))
    return VolatilityPath(
        sigmas=np.exp(spec.omega0 + spec.omega1 * j), n=n, spec=spec, needs_z=False
    )


def garch_recovered_moduli(spec: GarchSpec, path: VolatilityPath) -> np.ndarray:
    """Recover |z_t| for t = 1..n-1 by inverting the GARCH recursion.

    z_t^2 = (sigma_{t+1}^2 - omega_n - beta_n sigma_t^2) / (alpha_n sigma_t^2).
    """
    omega, alpha, beta = spec.coefficients(path.n)
    var = path.sigmas**2
    z2 = (var[1:] - omega - beta * var[:-1]) / (alpha * var[:-1])
    # tolerate tiny negative round-off from the forward recursion
    z2 = np.where((z2 < 0.0) & (z2 > -1e-12), 0.0, z2)
    if np.any(z2 < 0.0):
        raise PathInversionError("negative squared innovation: path not generated by this spec")
    return np.sqrt(z2)


def garch_inverted_modulus(spec: GarchSpec, path: VolatilityPath, t: int) -> float:
    """|z_t| recovered from consecutive variances, 1 <= t <= n-1."""
    if not 1 <= t <= path.n - 1:
        raise IndexError(f"t must satisfy 1 <= t <= n-1, got t={t}, n={path.n}")
    return float(garch_recovered_moduli(spec, path)[t - 1])
