"""Diagonal monotonicity checks and an empirical harness for Stollmann's lemma.

A function ``phi`` on R^J is diagonally monotone (DM) when it is
nondecreasing in every coordinate and ``phi(q + t e) - phi(q) >= t`` along
the diagonal ``e = (1, ..., 1)``.  For DM functions and IID coordinates with
law ``mu``::

    mu^J{ phi in I } <= |J| * s(mu, |I|)

with ``s(mu, eps) = sup_a mu([a, a + eps])``.

Functionals here take a batch ``q`` of shape ``(S, m)`` and return ``(S,)``.
"""
from dataclasses import dataclass

import numpy as np

from . import rng
from .hamiltonian import InteractionSpec, TwoParticleStructure, adjacency
from .spectral import eigvalsh_batch
from .stats import ConcentrationEstimate, estimate

__all__ = ["ParameterVector", "DMCheck", "check_dm", "concentration_uniform",
           "concentration_uniform_clipped", "StollmannResult", "stollmann_empirical",
           "stollmann_from_values", "sample_functional", "sample_uniform_params",
           "two_particle_eigenvalue", "one_particle_eigenvalue", "mean_functional",
           "min_functional"]


@dataclass(frozen=True, eq=False)
class ParameterVector:
    """Values ``q_j`` over a finite index set ``J``."""

    index: tuple
    values: np.ndarray

    def __init__(self, index, values):
        index = tuple(index)
        values = np.asarray(values, dtype=float).reshape(-1)
        if len(set(index)) != len(index):
            raise ValueError("index set has repeated entries")
        if len(index) != values.size:
            raise ValueError("one value per index is required")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.index)


def _arr(q):
    return q.values if isinstance(q, ParameterVector) else np.asarray(q, dtype=float)


def mean_functional(q):
    return np.asarray(q, dtype=float).mean(axis=-1)


def min_functional(q):
    return np.asarray(q, dtype=float).min(axis=-1)


def two_particle_eigenvalue(structure, k, H0=None):
    """``q -> k``-th sorted eigenvalue of the two-particle Hamiltonian with shadow potentials ``q``."""
    def phi(q):
        H = structure.matrices(q)
        if H0 is not None:
            H = H + H0
        return eigvalsh_batch(H)[..., k]
    return phi


def one_particle_eigenvalue(cube, k, H0=None):
    """``q -> k``-th sorted eigenvalue of ``Delta + diag(q)`` on a one-particle cube."""
    A = adjacency(cube) if H0 is None else adjacency(cube) + H0
    idx = np.diag_indices(A.shape[0])

    def phi(q):
        q = np.asarray(q, dtype=float)
        H = np.broadcast_to(A, q.shape[:-1] + A.shape).copy()
        H[..., idx[0], idx[1]] += q
        return eigvalsh_batch(H)[..., k]
    return phi


@dataclass(frozen=True)
class DMCheck:
    passed: bool
    monotone_margin: float      # phi(q + r) - phi(q)
    diagonal_margin: float      # phi(q + t e) - phi(q) - t
    q: tuple
    r: tuple
    t: float


def check_dm(phi, q, r, t, slack=1e-12):
    """Evaluate both DM conditions at one point and report their margins."""
    q = _arr(q)
    r = _arr(r)
    if np.any(r < 0):
        raise ValueError("r must lie in the positive orthant")
    if not t > 0:
        raise ValueError("t must be positive")
    batch = np.stack([q, q + r, q + t])
    f0, fr, ft = (float(v) for v in np.asarray(phi(batch)).reshape(-1))
    mono = fr - f0
    diag = ft - f0 - t
    return DMCheck(bool(mono >= -slack and diag >= -slack), mono, diag,
                   tuple(q.tolist()), tuple(r.tolist()), float(t))


def concentration_uniform(epsilon):
    """``s(mu, eps)`` for the uniform law on [0, 1]."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    return float(epsilon)


def concentration_uniform_clipped(epsilon):
    """``s(mu, eps)`` for any ``eps >= 0`` (saturates at 1)."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    return min(float(epsilon), 1.0)


@dataclass(frozen=True)
class StollmannResult:
    estimate: ConcentrationEstimate
    bound: float
    interval: tuple
    J_size: int

    @property
    def passed(self):
        return self.estimate.ci_low <= self.bound


def sample_uniform_params(seed, samples, m, start=0):
    """IID uniform [0, 1] parameters keyed by ``(seed, sample index, coordinate)``."""
    i = np.arange(start, start + samples, dtype=np.uint64)[:, None]
    j = np.arange(m, dtype=np.uint64)[None, :]
    return rng.keyed_uniform(seed, rng.STREAM_IID, i, j)


def sample_functional(phi, J_size, samples, seed=0, *, batch=8192):
    """``phi`` evaluated on ``samples`` IID uniform parameter vectors, in sample order."""
    if samples <= 0:
        raise ValueError("need at least one sample")
    parts = [np.asarray(phi(sample_uniform_params(seed, min(batch, samples - s), J_size, s)))
             for s in range(0, samples, batch)]
    return np.concatenate(parts)


def stollmann_from_values(values, J_size, interval):
    """Stollmann check on precomputed functional values; ``interval`` is ``(a, eps)``."""
    a, eps = interval
    values = np.asarray(values)
    hits = int(np.count_nonzero((values >= a) & (values <= a + eps)))
    bound = J_size * concentration_uniform_clipped(eps)
    return StollmannResult(estimate(hits, values.size, eps), bound, (float(a), float(eps)),
                           J_size)


def stollmann_empirical(phi, J_size, interval, samples, seed=0, *, batch=8192):
    """Monte Carlo estimate of ``mu^J{phi(q) in [a, a + eps]}`` for uniform ``mu``.

    ``interval`` is ``(a, eps)``.  Returns the estimate with its 95% Wilson
    interval and the bound ``|J| * eps``.
    """
    values = sample_functional(phi, J_size, samples, seed, batch=batch)
    return stollmann_from_values(values, J_size, interval)


def structure_functional(cube, k, interaction=None):
    """Eigenvalue functional of a two-particle cube, with its shadow size."""
    st = TwoParticleStructure(cube, InteractionSpec() if interaction is None else interaction)
    return two_particle_eigenvalue(st, k), len(st.shadow_sites)
