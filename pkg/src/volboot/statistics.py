"""Partial-sum processes and test statistics.

Everything here is exact finite-sample arithmetic: scaled partial sums of the
innovations and squared innovations on the grid t/n, and the location, CUSUM
and Dickey-Fuller statistics (raw and studentized) computed from a sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .volatility import VolatilityPath

__all__ = [
    "PartialSumPair",
    "Sample",
    "StatValue",
    "STAT_TAGS",
    "STAT_TAIL",
    "STAT_PROBLEM",
    "partial_sums",
    "stat_location",
    "stat_cusum",
    "stat_unitroot",
    "compute_statistic",
]

STAT_TAGS = ("S", "T", "Tnull", "CS", "CT", "R", "W")

# Left-tailed tests reject for small values; the CUSUM statistics are
# right-tailed (reject for large excursions).
STAT_TAIL = {
    "S": "left",
    "T": "left",
    "Tnull": "left",
    "R": "left",
    "W": "left",
    "CS": "right",
    "CT": "right",
}

STAT_PROBLEM = {
    "S": "location",
    "T": "location",
    "Tnull": "location",
    "CS": "cusum",
    "CT": "cusum",
    "R": "unitroot",
    "W": "unitroot",
}


class DegenerateSampleError(ZeroDivisionError):
    """Raised when a studentizing denominator or regressor sum is zero."""


@dataclass(frozen=True)
class PartialSumPair:
    """Step functions u -> (M_n(u), U_n(u)) on the grid {t/n}, t = 0..n.

    ``m_grid[t] = n^{-1/2} sum_{i<=t} eps_i`` and
    ``u_grid[t] = n^{-1} sum_{i<=t} eps_i^2``; ``v_grid`` additionally holds
    ``n^{-1} sum_{i<=t} sigma_i^2`` when the volatilities are known.
    """

    n: int
    m_grid: np.ndarray
    u_grid: np.ndarray
    v_grid: np.ndarray | None = None


@dataclass(frozen=True)
class Sample:
    """Observed series plus the testing problem it belongs to."""

    y: np.ndarray
    model: str  # "location" | "cusum" | "unitroot"
    theta_bar: float = 0.0

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=float)
        if y.ndim != 1 or y.shape[0] < 2:
            raise ValueError("sample must be a 1-d series of length >= 2")
        if self.model not in ("location", "cusum", "unitroot"):
            raise ValueError(f"unknown model {self.model!r}")
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.shape[0]


@dataclass(frozen=True)
class StatValue:
    stat: str
    value: float
    tail: str


def partial_sums(eps: np.ndarray, sigma: VolatilityPath | None = None) -> PartialSumPair:
    """Compute (M_n, U_n) on the grid, and V_n when sigma is supplied."""
    eps = np.asarray(eps, dtype=float)
    if eps.ndim != 1 or eps.shape[0] == 0:
        raise ValueError("eps must be a nonempty 1-d array")
    n = eps.shape[0]
    m = np.concatenate(([0.0], np.cumsum(eps))) / np.sqrt(n)
    u = np.concatenate(([0.0], np.cumsum(eps**2))) / n
    v = None
    if sigma is not None:
        if sigma.n != n:
            raise ValueError("volatility path length does not match eps")
        v = np.concatenate(([0.0], np.cumsum(sigma.sigmas**2))) / n
    return PartialSumPair(n=n, m_grid=m, u_grid=u, v_grid=v)


def stat_location(sample: Sample, stat: str = "S") -> StatValue:
    """S = sqrt(n)(ybar - theta_bar); T studentizes by the centered sample sd,
    Tnull by the null-imposed second moment."""
    if sample.model != "location":
        raise ValueError("sample model must be 'location'")
    if stat not in ("S", "T", "Tnull"):
        raise ValueError(f"not a location statistic: {stat!r}")
    y = sample.y
    n = sample.n
    s_stat = np.sqrt(n) * (y.mean() - sample.theta_bar)
    if stat == "S":
        return StatValue("S", float(s_stat), "left")
    if stat == "T":
        s2 = np.mean((y - y.mean()) ** 2)
    else:
        s2 = np.mean((y - sample.theta_bar) ** 2)
    if s2 <= 0.0:
        raise DegenerateSampleError("zero studentizing variance")
    return StatValue(stat, float(s_stat / np.sqrt(s2)), "left")


def stat_cusum(sample: Sample, studentize: bool = False) -> StatValue:
    """CS = n^{-1/2} max_t |sum_{i<=t}(y_i - ybar)|; CT divides by the sample sd."""
    if sample.model != "cusum":
        raise ValueError("sample model must be 'cusum'")
    y = sample.y
    n = sample.n
    excursion = np.max(np.abs(np.cumsum(y - y.mean())))
    cs = excursion / np.sqrt(n)
    if not studentize:
        return StatValue("CS", float(cs), "right")
    s2 = np.mean((y - y.mean()) ** 2)
    if s2 <= 0.0:
        raise DegenerateSampleError("zero studentizing variance")
    return StatValue("CT", float(cs / np.sqrt(s2)), "right")


def stat_unitroot(sample: Sample, studentize: bool = False) -> StatValue:
    """Dickey-Fuller coefficient statistic R = n * thetahat, or ratio statistic W.

    thetahat regresses Delta y_t on y_{t-1} with y_0 = 0; W studentizes with
    s^2 = n^{-1} sum (Delta y_t - thetahat y_{t-1})^2.
    """
    if sample.model != "unitroot":
        raise ValueError("sample model must be 'unitroot'")
    y = sample.y
    n = sample.n
    y_lag = np.concatenate(([0.0], y[:-1]))
    dy = y - y_lag
    den = np.sum(y_lag**2)
    if den <= 0.0:
        raise DegenerateSampleError("zero regressor sum of squares")
    theta_hat = np.sum(y_lag * dy) / den
    if not studentize:
        return StatValue("R", float(n * theta_hat), "left")
    s2 = np.mean((dy - theta_hat * y_lag) ** 2)
    if s2 <= 0.0:
        raise DegenerateSampleError("zero residual variance")
    w = theta_hat * np.sqrt(den) / np.sqrt(s2)
    return StatValue("W", float(w), "left")


def compute_statistic(sample: Sample, stat: str) -> StatValue:
    """Dispatch to the statistic named by ``stat``."""
    problem = STAT_PROBLEM.get(stat)
    if problem is None:
        raise ValueError(f"unknown statistic {stat!r}")
    if problem == "location":
        return stat_location(sample, stat)
    if problem == "cusum":
        return stat_cusum(sample, studentize=(stat == "CT"))
    return stat_unitroot(sample, studentize=(stat == "W"))
