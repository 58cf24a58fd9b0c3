"""Innovation and multiplier distributions.

Provides the three standardized error laws used throughout the experiments
(standard normal plus two mean-zero unit-variance normal mixtures, one
asymmetric with zero skewness and one negatively skewed), the wild-bootstrap
multiplier laws, and the conditional sign redraw used when conditioning an
innovation sequence on its modulus sequence.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .rng import SeedPath

__all__ = [
    "MixtureSpec",
    "InnovationDraw",
    "DISTRIBUTION_TAGS",
    "MULTIPLIER_LAWS",
    "mixture_pdf",
    "mixture_moments",
    "innovation_pdf",
    "draw_innovations",
    "sign_probability_positive",
    "conditional_sign_redraw",
    "draw_multipliers",
    "multiplier_law_moments",
]

logger = logging.getLogger(__name__)

DISTRIBUTION_TAGS = ("gaussian", "dgp2", "dgp3")
MULTIPLIER_LAWS = ("gaussian", "rademacher", "mammen")

# Two-point multiplier law with mean 0 and variance 1: support
# {-(sqrt5-1)/2, (sqrt5+1)/2} with P(second) = (sqrt5-1)/(2 sqrt5).
_MAMMEN_LO = -(math.sqrt(5.0) - 1.0) / 2.0
_MAMMEN_HI = (math.sqrt(5.0) + 1.0) / 2.0
_MAMMEN_P_HI = (math.sqrt(5.0) - 1.0) / (2.0 * math.sqrt(5.0))


@dataclass(frozen=True)
class MixtureSpec:
    """Two-component normal mixture w1*N(mu1, s1^2) + w2*N(mu2, s2^2)."""

    weights: tuple[float, float]
    means: tuple[float, float]
    sds: tuple[float, float]

    def __post_init__(self) -> None:
        w1, w2 = self.weights
        if abs(w1 + w2 - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")
        if not (0.0 < w1 < 1.0 and 0.0 < w2 < 1.0):
            raise ValueError("mixture weights must lie in (0, 1)")
        if min(self.sds) <= 0.0:
            raise ValueError("mixture component sds must be positive")

    @classmethod
    def asymmetric_zero_skew(cls) -> "MixtureSpec":
        """Mixture with mean 0, variance 1 and zero skewness (DGP 2)."""
        a = math.sqrt(3.0 / 11.0)
        spec = cls(weights=(1.0 / 3.0, 2.0 / 3.0), means=(-2.0 * a, a), sds=(a, a * math.sqrt(2.0)))
        spec._check_standardized()
        return spec

    @classmethod
    def negative_skew(cls) -> "MixtureSpec":
        """Mixture with mean 0, variance 1 and negative skewness (DGP 3)."""
        b = math.sqrt(3.0 / 10.0)
        spec = cls(weights=(1.0 / 3.0, 2.0 / 3.0), means=(-2.0 * b, b), sds=(b * math.sqrt(2.0), b))
        spec._check_standardized()
        return spec

    def _check_standardized(self) -> None:
        mean, var, _ = mixture_moments(self)
        if abs(mean) > 1e-12 or abs(var - 1.0) > 1e-12:
            raise ValueError("preset mixture must have mean 0 and unit variance")


_PRESETS: dict[str, MixtureSpec] = {}


def _preset(tag: str) -> MixtureSpec:
    if tag not in _PRESETS:
        if tag == "dgp2":
            _PRESETS[tag] = MixtureSpec.asymmetric_zero_skew()
        elif tag == "dgp3":
            _PRESETS[tag] = MixtureSpec.negative_skew()
        else:
            raise ValueError(f"unknown mixture preset {tag!r}")
    return _PRESETS[tag]


def mixture_pdf(spec: MixtureSpec, z):
    """Density of the mixture at ``z`` (scalar or array)."""
    w1, w2 = spec.weights
    m1, m2 = spec.means
    s1, s2 = spec.sds
    return w1 * norm.pdf(z, loc=m1, scale=s1) + w2 * norm.pdf(z, loc=m2, scale=s2)


def mixture_moments(spec: MixtureSpec) -> tuple[float, float, float]:
    """Closed-form (mean, variance, third central moment) of the mixture."""
    w = np.asarray(spec.weights)
    mu = np.asarray(spec.means)
    s = np.asarray(spec.sds)
    m1 = float(np.sum(w * mu))
    m2 = float(np.sum(w * (s**2 + mu**2)))
    m3 = float(np.sum(w * (mu**3 + 3.0 * mu * s**2)))
    var = m2 - m1**2
    third = m3 - 3.0 * m1 * m2 + 2.0 * m1**3
    return m1, var, third


def innovation_pdf(distribution: str, z):
    """Density of the standardized-error law ``distribution`` at ``z``."""
    if distribution == "gaussian":
        return norm.pdf(z)
    return mixture_pdf(_preset(distribution), z)


@dataclass(frozen=True)
class InnovationDraw:
    """Standardized errors plus their modulus/sign decomposition."""

    z: np.ndarray
    moduli: np.ndarray
    signs: np.ndarray
    distribution: str

    @classmethod
    def from_z(cls, z: np.ndarray, distribution: str) -> "InnovationDraw":
        z = np.asarray(z, dtype=float)
        n_zero = int(np.count_nonzero(z == 0.0))
        if n_zero:
            # sgn(0) is undefined; map floating-point zeros to +1 rather than abort
            logger.warning("mapping %d exact-zero innovations to sign +1", n_zero)
        signs = np.where(z >= 0.0, 1.0, -1.0)
        return cls(z=z, moduli=np.abs(z), signs=signs, distribution=distribution)

    def __len__(self) -> int:
        return self.z.shape[0]


def _draw_mixture(spec: MixtureSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    # component indicator, then a normal draw: exact and fast
    comp2 = rng.random(n) < spec.weights[1]
    z = rng.standard_normal(n)
    mu = np.where(comp2, spec.means[1], spec.means[0])
    s = np.where(comp2, spec.sds[1], spec.sds[0])
    return mu + s * z


def draw_innovations(distribution: str, n: int, seed: SeedPath) -> InnovationDraw:
    """Draw ``n`` i.i.d. standardized errors from the given law."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if distribution not in DISTRIBUTION_TAGS:
        raise ValueError(f"unknown distribution {distribution!r}")
    rng = seed.generator()
    if distribution == "gaussian":
        z = rng.standard_normal(n)
    else:
        z = _draw_mixture(_preset(distribution), n, rng)
    return InnovationDraw.from_z(z, distribution)


def sign_probability_positive(distribution: str, moduli: np.ndarray) -> np.ndarray:
    """P(sign = +1 | modulus) = f(m) / (f(m) + f(-m)) for the law's density f."""
    moduli = np.asarray(moduli, dtype=float)
    if distribution == "gaussian":
        return np.full(moduli.shape, 0.5)
    f_pos = innovation_pdf(distribution, moduli)
    f_neg = innovation_pdf(distribution, -moduli)
    return f_pos / (f_pos + f_neg)


def conditional_sign_redraw(moduli: np.ndarray, distribution: str, seed: SeedPath) -> np.ndarray:
    """Redraw signs conditional on the moduli, independently per element."""
    moduli = np.asarray(moduli, dtype=float)
    if np.any(moduli <= 0.0):
        raise ValueError("all moduli must be strictly positive")
    p_pos = sign_probability_positive(distribution, moduli)
    u = seed.generator().random(moduli.shape[0])
    return np.where(u < p_pos, 1.0, -1.0)


def draw_multipliers(law: str, n: int, seed: SeedPath) -> np.ndarray:
    """Draw ``n`` i.i.d. mean-zero unit-variance bootstrap multipliers."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if law not in MULTIPLIER_LAWS:
        raise ValueError(f"unknown multiplier law {law!r}")
    rng = seed.generator()
    if law == "gaussian":
        return rng.standard_normal(n)
    if law == "rademacher":
        return np.where(rng.random(n) < 0.5, 1.0, -1.0)
    return np.where(rng.random(n) < _MAMMEN_P_HI, _MAMMEN_HI, _MAMMEN_LO)


def multiplier_law_moments(law: str) -> tuple[float, float]:
    """Closed-form (mean, variance) of a multiplier law."""
    if law in ("gaussian", "rademacher"):
        return 0.0, 1.0
    if law == "mammen":
        mean = _MAMMEN_P_HI * _MAMMEN_HI + (1.0 - _MAMMEN_P_HI) * _MAMMEN_LO
        second = _MAMMEN_P_HI * _MAMMEN_HI**2 + (1.0 - _MAMMEN_P_HI) * _MAMMEN_LO**2
        return mean, second - mean**2
    raise ValueError(f"unknown multiplier law {law!r}")
