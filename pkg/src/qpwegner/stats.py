"""Binomial estimates and log-log slope fits."""
from dataclasses import dataclass, asdict
from statistics import NormalDist
import math

import numpy as np

__all__ = ["ConcentrationEstimate", "SlopeFit", "wilson_interval", "estimate",
           "estimates_from_distances", "fit_epsilon_slope"]


def wilson_interval(successes, trials, level=0.95):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("Wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in 0..trials")
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials))
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


@dataclass(frozen=True)
class ConcentrationEstimate:
    epsilon: float
    p_hat: float
    ci_low: float
    ci_high: float
    n_samples: int
    successes: int = 0

    def asdict(self):
        return asdict(self)


def estimate(successes, trials, epsilon):
    low, high = wilson_interval(successes, trials)
    return ConcentrationEstimate(float(epsilon), successes / trials, low, high, int(trials),
                                 int(successes))


def estimates_from_distances(distances, epsilon_grid):
    """Threshold one array of per-sample distances at every grid value.

    Reusing the same samples for all ``epsilon`` makes ``p_hat`` exactly
    nondecreasing in ``epsilon``.
    """
    dist = np.sort(np.asarray(distances, dtype=float))
    counts = np.searchsorted(dist, np.asarray(epsilon_grid, dtype=float), side="right")
    return [estimate(int(c), dist.size, e) for c, e in zip(counts, epsilon_grid)]


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    slope_stderr: float
    intercept_stderr: float
    n_points: int


def fit_epsilon_slope(estimates):
    """Weighted least squares of ``log p_hat`` against ``log epsilon``.

    Only points with ``0 < p_hat < 1`` enter.  Weights are inverse squared
    widths of the Wilson intervals in log scale.
    """
    pts = [e for e in estimates if 0.0 < e.p_hat < 1.0]
    if len(pts) < 3:
        raise ValueError(f"slope fit needs at least 3 points with 0 < p_hat < 1, got {len(pts)}")
    x = np.log([e.epsilon for e in pts])
    y = np.log([e.p_hat for e in pts])
    z = NormalDist().inv_cdf(0.975)
    sig = np.array([(math.log(e.ci_high) - math.log(e.ci_low)) / (2.0 * z)
                    if e.ci_low > 0.0 else np.inf for e in pts])
    w = np.where(np.isfinite(sig) & (sig > 0), 1.0 / np.square(sig), 0.0)
    if not np.any(w):
        w = np.ones_like(x)
    X = np.column_stack([x, np.ones_like(x)])
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    resid = (y - X @ coef) * sw
    dof = max(len(pts) - 2, 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv((X * w[:, None]).T @ X)
    return SlopeFit(float(coef[0]), float(coef[1]), float(math.sqrt(max(cov[0, 0], 0.0))),
                    float(math.sqrt(max(cov[1, 1], 0.0))), len(pts))
