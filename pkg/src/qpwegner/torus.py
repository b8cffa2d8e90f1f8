"""Torus T^nu with the max-norm metric, the Z^d shift action and dyadic partitions.

Conventions
-----------
* Points of the torus are stored as float arrays with coordinates in [0, 1).
* The action is the affine translation ``T^x w = frac(w + A @ x)`` with a
  ``nu x d`` frequency matrix ``A``.
* The dyadic cube ``C_{n,k}`` is the product of half-open intervals
  ``[(i_j - 1)/2^n, i_j/2^n)``.  Multi-indices are 1-based and the flat index
  uses mixed radix ``2^n`` with the first coordinate least significant::

      k = 1 + sum_j (i_j - 1) * 2^(n*(j-1))
"""
from dataclasses import dataclass
from itertools import product
import math
import warnings

import numpy as np

__all__ = [
    "GOLDEN", "TorusPoint", "ShiftAction", "DyadicCubeIndex", "LatticeCube",
    "DegenerateOrbitError", "frac", "apply_shift", "torus_distance",
    "circular_distance", "trajectory", "min_spacing", "separation_level",
    "partition_index", "dyadic_indices", "fit_diophantine",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# deepest dyadic level whose cube index fits in a uint64 per coordinate
MAX_LEVEL = 63


class DegenerateOrbitError(ValueError):
    """Two distinct lattice sites land on the same torus point."""


def frac(x):
    """Fractional part in [0, 1), with -0.0 clamped to 0.0."""
    y = np.mod(np.asarray(x, dtype=float), 1.0)
    # np.mod can return exactly 1.0 for tiny negative inputs
    y = np.where(y >= 1.0, 0.0, y)
    return y + 0.0


def circular_distance(a, b):
    """Per-coordinate distance on R/Z."""
    diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(diff, 1.0 - diff)


@dataclass(frozen=True)
class TorusPoint:
    """A point of T^nu; coordinates are normalized on construction."""

    coords: tuple

    def __init__(self, coords):
        c = np.atleast_1d(np.asarray(coords, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("a torus point needs a non-empty 1-d coordinate vector")
        object.__setattr__(self, "coords", tuple(float(v) for v in frac(c)))

    @property
    def nu(self):
        return len(self.coords)

    def asarray(self):
        return np.array(self.coords, dtype=float)


@dataclass(frozen=True, eq=False)
class ShiftAction:
    """Z^d action on T^nu by ``w -> frac(w + A @ x)``.

    ``diophantine_B`` and ``diophantine_C`` are metadata only; use
    :func:`fit_diophantine` to estimate them from spacings.
    """

    frequency: np.ndarray
    diophantine_B: float = None
    diophantine_C: float = None

    def __init__(self, frequency=None, diophantine_B=None, diophantine_C=None,
                 *, warn=True):
        if frequency is None:
            A = np.array([[GOLDEN]])
            if diophantine_B is None:
                diophantine_B = 1.0
        else:
            A = np.atleast_2d(np.asarray(frequency, dtype=float))
            if warn and not (A.shape == (1, 1) and A[0, 0] == GOLDEN):
                warnings.warn("Diophantine property of a user-supplied frequency "
                              "matrix is not checked", stacklevel=2)
        A.setflags(write=False)
        object.__setattr__(self, "frequency", A)
        object.__setattr__(self, "diophantine_B", diophantine_B)
        object.__setattr__(self, "diophantine_C", diophantine_C)

    @property
    def nu(self):
        return self.frequency.shape[0]

    @property
    def d(self):
        return self.frequency.shape[1]

    def shift_array(self, omega, sites):
        """Vectorized action: ``omega`` (..., nu) and ``sites`` (m, d) -> (..., m, nu)."""
        omega = np.asarray(omega, dtype=float)
        sites = as_sites(sites, self.d)
        if sites.shape[-1] != self.d:
            raise ValueError(f"lattice vectors must have {self.d} components, "
                             f"got {sites.shape[-1]}")
        if omega.shape[-1] != self.nu:
            raise ValueError(f"torus points must have {self.nu} coordinates, "
                             f"got {omega.shape[-1]}")
        # split A = hi + lo with hi on a 2^-26 grid: hi @ x is exact for
        # |A x| < 2^27, so reducing it mod 1 loses nothing, and the lo part is
        # small enough that its rounding error sits far below 1e-15
        x = sites.astype(float)
        hi = np.ldexp(np.round(np.ldexp(self.frequency, 26)), -26)
        lo = self.frequency - hi
        shifts = frac(x @ hi.T) + x @ lo.T
        return frac(omega[..., None, :] + shifts)


@dataclass(frozen=True)
class DyadicCubeIndex:
    level: int
    multi_index: tuple

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("dyadic level must be >= 1")
        top = 2 ** self.level
        if any(not 1 <= i <= top for i in self.multi_index):
            raise ValueError(f"multi-index entries must lie in 1..{top}")

    @property
    def flat_index(self):
        base = 2 ** self.level
        return 1 + sum((i - 1) * base ** j for j, i in enumerate(self.multi_index))

    @classmethod
    def from_flat(cls, level, k, nu):
        base = 2 ** level
        if not 1 <= k <= base ** nu:
            raise ValueError(f"flat index {k} out of range 1..{base ** nu} at level {level}")
        k -= 1
        mi = []
        for _ in range(nu):
            k, rem = divmod(k, base)
            mi.append(rem + 1)
        return cls(level, tuple(mi))


@dataclass(frozen=True)
class LatticeCube:
    """The cube Lambda_L(u) of side 2L+1 in Z^d."""

    center: tuple
    L: int

    def __init__(self, center, L):
        center = tuple(int(c) for c in np.atleast_1d(center))
        if L < 0:
            raise ValueError("cube radius must be nonnegative")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "L", int(L))

    @property
    def d(self):
        return len(self.center)

    def __len__(self):
        return (2 * self.L + 1) ** self.d

    def sites(self):
        """All sites in lexicographic order, shape ``(len(self), d)``."""
        ranges = [range(c - self.L, c + self.L + 1) for c in self.center]
        return np.array(list(product(*ranges)), dtype=np.int64).reshape(-1, self.d)


def as_sites(sites, d):
    """Coerce to an ``(m, d)`` integer array; a flat list is a list of sites when d == 1."""
    sites = np.asarray(sites)
    if sites.ndim == 0:
        sites = sites.reshape(1, 1)
    elif sites.ndim == 1:
        sites = sites.reshape(-1, 1) if d == 1 else sites[None, :]
    return sites


def apply_shift(action, omega, x):
    """``T^x omega`` as a new :class:`TorusPoint`."""
    x = np.atleast_1d(np.asarray(x))
    if x.shape != (action.d,):
        raise ValueError(f"lattice vector must have {action.d} components")
    w = omega.asarray() if isinstance(omega, TorusPoint) else np.atleast_1d(omega)
    return TorusPoint(action.shift_array(w, x[None, :])[0])


def torus_distance(a, b):
    """Max-norm distance on T^nu, in [0, 1/2]."""
    a = a.asarray() if isinstance(a, TorusPoint) else np.atleast_1d(np.asarray(a, float))
    b = b.asarray() if isinstance(b, TorusPoint) else np.atleast_1d(np.asarray(b, float))
    if a.shape[-1] != b.shape[-1]:
        raise ValueError("torus points of different dimension")
    return float(np.max(circular_distance(a, b)))


def trajectory(action, omega, sites):
    """``[T^x omega for x in sites]`` in the order given (cube sites are lexicographic)."""
    sites = as_sites(sites, action.d)
    if sites.size == 0:
        raise ValueError("trajectory needs at least one site")
    w = omega.asarray() if isinstance(omega, TorusPoint) else np.atleast_1d(omega)
    pts = action.shift_array(w, sites)
    return [TorusPoint(p) for p in pts]


def min_spacing(action, omega, cube, *, block=512):
    """Smallest pairwise torus distance along the orbit of ``omega`` over ``cube``.

    Brute force over all pairs.  Raises :class:`DegenerateOrbitError` when two
    distinct sites map to the same point up to rounding.
    """
    sites = cube.sites() if isinstance(cube, LatticeCube) else as_sites(cube, action.d)
    m = len(sites)
    if m < 2:
        raise ValueError("spacing needs at least two sites")
    w = omega.asarray() if isinstance(omega, TorusPoint) else np.atleast_1d(omega)
    pts = action.shift_array(w, sites)
    best = np.inf
    for start in range(0, m, block):
        chunk = pts[start:start + block]
        dist = circular_distance(chunk[:, None, :], pts[None, :, :]).max(axis=-1)
        rows = np.arange(start, start + len(chunk))
        dist[rows - start, rows] = np.inf
        best = min(best, float(dist.min()))
    # float resolution of the largest shift
    scale = float(np.abs(sites).max() * np.abs(action.frequency).sum(axis=1).max()) + 1.0
    if best <= 64 * np.finfo(float).eps * scale:
        raise DegenerateOrbitError("orbit points coincide: the frequency looks rational "
                                   "on this cube")
    return best


def separation_level(delta):
    """Smallest ``n >= 1`` with ``2**-n < delta``.

    Points at max-distance ``>= delta`` then lie in different cubes of every
    partition ``C_n`` with ``n`` at or above this level.
    """
    if not 0.0 < delta <= 0.5:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")
    n = max(1, math.floor(math.log2(1.0 / delta)) + 1)
    # guard the log2 rounding at exact powers of two
    while 2.0 ** -n >= delta:
        n += 1
    while n > 1 and 2.0 ** -(n - 1) < delta:
        n -= 1
    return n


def dyadic_indices(n, omega):
    """Zero-based cube coordinates ``floor(omega * 2**n)`` as uint64, shape of ``omega``.

    Exact for every double in [0, 1) since scaling by a power of two is exact.
    """
    if not 1 <= n <= MAX_LEVEL:
        raise ValueError(f"dyadic level must lie in 1..{MAX_LEVEL}")
    w = np.asarray(omega, dtype=float)
    return np.floor(np.ldexp(w, n)).astype(np.uint64)


def partition_index(n, omega):
    """The cube ``C_{n,k}`` of the level-``n`` partition containing ``omega``."""
    w = omega.asarray() if isinstance(omega, TorusPoint) else frac(np.atleast_1d(omega))
    idx = dyadic_indices(n, w)
    return DyadicCubeIndex(n, tuple(int(i) + 1 for i in idx))


def fit_diophantine(Ls, deltas):
    """Fit ``delta_L ~ C * L**-B`` by least squares in log-log coordinates.

    Returns ``(B, C, min_L_delta)`` where the last entry is ``min(delta_L * L)``.
    """
    Ls = np.asarray(Ls, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    slope, intercept = np.polyfit(np.log(Ls), np.log(deltas), 1)
    return -float(slope), float(np.exp(intercept)), float(np.min(deltas * Ls))
