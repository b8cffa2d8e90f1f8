"""Randelette grand-ensemble potential on the torus and on the lattice.

The potential is the hierarchical series

    v(w; theta) = sum_n a_n * theta[n, k(n, w)]

where ``k(n, w)`` is the level-``n`` dyadic cube containing ``w`` (exactly one
indicator fires per level).  ``theta`` is a point of the infinite product
space of uniform [0, 1] variables; it is realized lazily by a keyed
counter-based generator so that a seed *is* a parameter point.

Theta objects share one small protocol: ``values(n, idx)`` returns the
parameters of level ``n`` for zero-based cube coordinates ``idx`` (uint64,
shape ``(..., nu)``).
"""
from dataclasses import dataclass
import math

import numpy as np

from . import rng
from .torus import (DyadicCubeIndex, TorusPoint, dyadic_indices, MAX_LEVEL,
                    as_sites)

__all__ = [
    "CoefficientSchedule", "ThetaSample", "ConstantTheta", "OverrideTheta",
    "SplicedTheta", "RandeletteField", "coefficient", "theta_value",
    "evaluate_v", "tail_bound", "potential", "potential_values", "decompose",
    "theta_keys", "conditional_density_bound", "default_truncation",
    "DEFAULT_TRUNCATION_CAP",
]

# levels past ~50 resolve the orbit below double precision spacing; see
# default_truncation
DEFAULT_TRUNCATION_CAP = 48


@dataclass(frozen=True)
class CoefficientSchedule:
    """Decay schedule ``c_lower * n**-M <= |a_n| <= c_upper * n**-kappa``.

    The concrete coefficients are ``a_n = c_upper * n**-kappa``.  With
    ``alternating=True`` their signs alternate, which breaks the monotonicity
    of ``v`` in ``theta``.
    """

    c_upper: float = 1.0
    c_lower: float = 1.0
    kappa: float = 2.0
    M: float = 2.0
    alternating: bool = False

    def __post_init__(self):
        if not self.kappa > 1.0:
            raise ValueError(f"coefficient decay needs 1 < kappa, got kappa={self.kappa}")
        if not self.M >= self.kappa:
            raise ValueError(f"coefficient decay needs kappa <= M, got M={self.M}")
        if not 0.0 < self.c_lower <= self.c_upper:
            raise ValueError("coefficient constants need 0 < c_lower <= c_upper")

    def coefficients(self, N):
        """``a_1 .. a_N`` as an array."""
        n = np.arange(1, N + 1, dtype=float)
        a = self.c_upper * n ** -self.kappa
        if self.alternating:
            a[1::2] *= -1.0
        return a


def coefficient(schedule, n):
    if n < 1:
        raise ValueError("level must be >= 1")
    a = schedule.c_upper * float(n) ** -schedule.kappa
    if schedule.alternating and n % 2 == 0:
        a = -a
    return a


def tail_bound(schedule, N):
    """Certified bound ``c_upper * N**(1-kappa) / (kappa-1)`` on ``sum_{n>N} |a_n|``."""
    if N < 1:
        raise ValueError("truncation level must be >= 1")
    return schedule.c_upper * float(N) ** (1.0 - schedule.kappa) / (schedule.kappa - 1.0)


def conditional_density_bound(schedule, n0):
    """Sup-norm bound ``1/|a_n0|`` on the density of ``v`` given levels below ``n0``."""
    if n0 < 1:
        raise ValueError("level must be >= 1")
    return 1.0 / abs(coefficient(schedule, n0))


def default_truncation(schedule, n0_required=1, tol=1e-8, cap=DEFAULT_TRUNCATION_CAP):
    """Smallest level count with ``tail_bound <= tol``, capped, and at least ``n0_required + 4``."""
    # solve c N^(1-k)/(k-1) <= tol for N
    need = (schedule.c_upper / (tol * (schedule.kappa - 1.0))) ** (1.0 / (schedule.kappa - 1.0))
    N = min(max(1, math.ceil(need)), cap)
    N = max(N, n0_required + 4)
    if N > MAX_LEVEL:
        raise ValueError(f"separation level {n0_required} too deep for {MAX_LEVEL} dyadic levels")
    return N


class ThetaSample:
    """A reproducible point of the parameter space, identified by a 64-bit seed."""

    def __init__(self, seed):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF

    def __repr__(self):
        return f"ThetaSample(seed={self.seed})"

    def __eq__(self, other):
        return isinstance(other, ThetaSample) and other.seed == self.seed

    def __hash__(self):
        return hash(("ThetaSample", self.seed))

    def values(self, n, idx):
        idx = np.asarray(idx, dtype=np.uint64)
        counters = [idx[..., j] for j in range(idx.shape[-1])]
        return rng.keyed_uniform(self.seed, rng.STREAM_THETA, n, *counters)


class ConstantTheta:
    """Every parameter equal to ``value`` (for tests and limiting cases)."""

    def __init__(self, value=0.0):
        self.value = float(value)

    def values(self, n, idx):
        return np.full(np.shape(idx)[:-1], self.value)


class OverrideTheta:
    """``base`` with selected parameters replaced.

    ``overrides`` maps ``(n, k)`` with the 1-based flat cube index ``k`` to a
    value in [0, 1].
    """

    def __init__(self, base, overrides, nu=1):
        self.base = base
        self.nu = nu
        self._by_level = {}
        for (n, k), val in overrides.items():
            mi = DyadicCubeIndex.from_flat(n, k, nu).multi_index
            self._by_level.setdefault(n, []).append((np.array(mi, dtype=np.uint64) - np.uint64(1),
                                                     float(val)))

    @classmethod
    def from_levels(cls, levels, base=None, nu=1):
        """Build from ``{n: [theta_{n,1}, ..., theta_{n,K_n}]}``."""
        over = {(n, k + 1): v for n, vals in levels.items() for k, v in enumerate(vals)}
        return cls(ConstantTheta(0.0) if base is None else base, over, nu=nu)

    def values(self, n, idx):
        out = np.array(self.base.values(n, idx), dtype=float)
        idx = np.asarray(idx, dtype=np.uint64)
        for mi, val in self._by_level.get(n, ()):
            out[np.all(idx == mi, axis=-1)] = val
        return out


class SplicedTheta:
    """Levels ``< n0`` from ``low``, levels ``>= n0`` from ``high``.

    Resampling ``high`` at fixed ``low`` realizes conditioning on the
    low-level parameters.
    """

    def __init__(self, low, high, n0):
        self.low, self.high, self.n0 = low, high, n0

    def values(self, n, idx):
        return (self.low if n < self.n0 else self.high).values(n, idx)


@dataclass(frozen=True, eq=False)
class RandeletteField:
    """Truncated randelette series: levels ``1..truncation_N`` are summed."""

    schedule: CoefficientSchedule
    theta: object
    nu: int = 1
    truncation_N: int = DEFAULT_TRUNCATION_CAP

    def __post_init__(self):
        if not 1 <= self.truncation_N <= MAX_LEVEL:
            raise ValueError(f"truncation_N must lie in 1..{MAX_LEVEL}")

    def level_terms(self, points, levels):
        """Terms ``a_n * theta[n, k(n, w)]`` for each level, shape ``(len(levels), ...)``."""
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.nu:
            raise ValueError(f"torus points must have {self.nu} coordinates")
        out = np.empty((len(levels),) + points.shape[:-1])
        for i, n in enumerate(levels):
            out[i] = coefficient(self.schedule, n) * self.theta.values(n, dyadic_indices(n, points))
        return out

    def partial_sum(self, points, first, last):
        """Sum of levels ``first..last`` accumulated in increasing level order."""
        points = np.asarray(points, dtype=float)
        total = np.zeros(points.shape[:-1])
        for n in range(first, last + 1):
            total = total + coefficient(self.schedule, n) * self.theta.values(
                n, dyadic_indices(n, points))
        return total

    def evaluate(self, points):
        """Vectorized ``v`` on an array of torus points of shape ``(..., nu)``."""
        return self.partial_sum(points, 1, self.truncation_N)

    def upper_bound(self):
        """``sup |v|`` over the torus, truncation tail included."""
        a = np.abs(self.schedule.coefficients(self.truncation_N))
        return float(a.sum() + tail_bound(self.schedule, self.truncation_N))


def theta_value(theta, n, k, nu=1):
    """``theta_{n,k}`` for the 1-based flat cube index ``k``."""
    mi = DyadicCubeIndex.from_flat(n, k, nu).multi_index
    idx = np.array(mi, dtype=np.uint64) - np.uint64(1)
    return float(theta.values(n, idx[None, :])[0])


def _coords(omega):
    return omega.asarray() if isinstance(omega, TorusPoint) else np.atleast_1d(
        np.asarray(omega, dtype=float))


def evaluate_v(field, omega):
    w = _coords(omega)
    if w.shape != (field.nu,):
        raise ValueError(f"field lives on T^{field.nu}, got a point with {w.size} coordinates")
    return float(field.evaluate(w[None, :])[0])


def potential(field, action, omega, x):
    """``V(x; omega, theta) = v(T^x omega; theta)``."""
    x = np.atleast_1d(np.asarray(x))
    return float(potential_values(field, action, _coords(omega), x[None, :])[0])


def potential_values(field, action, omega, sites):
    """Potential on many sites and/or many torus points.

    ``omega`` has shape ``(..., nu)`` and ``sites`` ``(m, d)``; the result has
    shape ``(..., m)``.
    """
    if action.nu != field.nu:
        raise ValueError("action and field live on tori of different dimension")
    pts = action.shift_array(omega, as_sites(sites, action.d))
    return field.evaluate(pts)


def decompose(field, action, omega, x, n0):
    """Split ``V(x)`` into the levels below ``n0`` (``xi``) and the rest (``eta``)."""
    if not 1 <= n0 <= field.truncation_N:
        raise ValueError(f"n0 must lie in 1..{field.truncation_N}, got {n0}")
    x = np.atleast_1d(np.asarray(x))
    pt = action.shift_array(_coords(omega), x[None, :])
    xi = field.partial_sum(pt, 1, n0 - 1)[0] if n0 > 1 else 0.0
    eta = field.partial_sum(pt, n0, field.truncation_N)[0]
    return float(xi), float(eta)


def theta_keys(field, action, omega, x, first, last=None):
    """The ``(n, multi_index)`` parameter keys read by levels ``first..last`` at ``T^x omega``."""
    last = field.truncation_N if last is None else last
    x = np.atleast_1d(np.asarray(x))
    pt = action.shift_array(_coords(omega), x[None, :])[0]
    return {(n, tuple(int(i) + 1 for i in dyadic_indices(n, pt)))
            for n in range(first, last + 1)}
