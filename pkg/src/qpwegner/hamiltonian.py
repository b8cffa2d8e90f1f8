"""Finite-volume one- and two-particle tight-binding Hamiltonians.

Hopping is the pure nearest-neighbour adjacency ``(Delta f)(x) = sum_e f(x+e)``
with no diagonal part; Dirichlet restriction drops every hop leaving the box.
Two-particle basis states ``(x1, x2)`` are ordered lexicographically, ``x1``
first, each ``d``-vector itself lexicographic.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .torus import LatticeCube, as_sites

__all__ = [
    "TwoParticleCube", "InteractionSpec", "HamiltonianMatrix", "TwoParticleStructure",
    "as_pair", "shadow", "exchange", "separation_ok", "cube_distance",
    "adjacency", "assemble_one_particle", "assemble_two_particle",
]


def as_pair(u):
    """Normalize a two-particle center to ``((u1...), (u2...))``."""
    arr = np.asarray(u, dtype=np.int64)
    if arr.ndim == 1:
        if arr.size % 2:
            raise ValueError("a two-particle center needs an even number of coordinates")
        arr = arr.reshape(2, -1)
    if arr.shape[0] != 2:
        raise ValueError("a two-particle center is a pair of lattice vectors")
    return tuple(int(c) for c in arr[0]), tuple(int(c) for c in arr[1])


@dataclass(frozen=True)
class TwoParticleCube:
    """``Lambda_L(u1) x Lambda_L(u2)`` in Z^{2d}."""

    center: tuple
    L: int

    def __init__(self, center, L):
        if L < 0:
            raise ValueError("cube radius must be nonnegative")
        object.__setattr__(self, "center", as_pair(center))
        object.__setattr__(self, "L", int(L))

    @property
    def d(self):
        return len(self.center[0])

    @property
    def first(self):
        return LatticeCube(self.center[0], self.L)

    @property
    def second(self):
        return LatticeCube(self.center[1], self.L)

    def __len__(self):
        return (2 * self.L + 1) ** (2 * self.d)


@dataclass(frozen=True)
class InteractionSpec:
    """``U(x1, x2) = strength`` when ``|x1 - x2|_inf <= range_``, else 0."""

    strength: float = 1.0
    range_: int = 1

    def __post_init__(self):
        if self.range_ < 0:
            raise ValueError("interaction range must be nonnegative")

    def __call__(self, x1, x2):
        x1 = np.asarray(x1)
        x2 = np.asarray(x2)
        dist = np.abs(x1 - x2).max(axis=-1)
        return np.where(dist <= self.range_, self.strength, 0.0)


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    entries: np.ndarray
    site_order: np.ndarray

    @property
    def dimension(self):
        return self.entries.shape[0]


def shadow(cube):
    """Union of the two one-particle cubes, lexicographically sorted, shape ``(m, d)``."""
    both = np.concatenate([cube.first.sites(), cube.second.sites()])
    return np.unique(both, axis=0)


def exchange(u):
    """Particle exchange ``(u1, u2) -> (u2, u1)``."""
    u1, u2 = as_pair(u)
    return u2, u1


def cube_distance(uA, uB, norm="max"):
    a = np.concatenate(as_pair(uA)).astype(float)
    b = np.concatenate(as_pair(uB)).astype(float)
    if norm == "max":
        return float(np.abs(a - b).max())
    if norm == "euclidean":
        return float(np.linalg.norm(a - b))
    raise ValueError(f"unknown norm {norm!r}")


def separation_ok(uA, uB, L, norm="max"):
    """``min(|uA - uB|, |uA - S(uB)|) > 8L``, the two-volume separation condition."""
    return min(cube_distance(uA, uB, norm), cube_distance(uA, exchange(uB), norm)) > 8 * L


def adjacency(cube):
    """Dirichlet nearest-neighbour adjacency of a one-particle cube."""
    sites = cube.sites()
    side = 2 * cube.L + 1
    n = len(sites)
    A = np.zeros((n, n))
    # lexicographic order: the last coordinate varies fastest
    strides = side ** np.arange(cube.d - 1, -1, -1)
    local = sites - (np.array(cube.center) - cube.L)
    for axis in range(cube.d):
        inner = np.nonzero(local[:, axis] < side - 1)[0]
        A[inner, inner + strides[axis]] = 1.0
        A[inner + strides[axis], inner] = 1.0
    return A


def assemble_one_particle(cube, potential_values):
    """``Delta + V`` on ``cube``.

    ``potential_values`` is either a mapping ``site tuple -> value`` or an
    array aligned with ``cube.sites()``.
    """
    sites = cube.sites()
    if hasattr(potential_values, "keys"):
        diag = np.array([_lookup(potential_values, s) for s in sites.tolist()], dtype=float)
    else:
        diag = np.asarray(potential_values, dtype=float).reshape(-1)
        if diag.size != len(sites):
            raise ValueError(f"expected {len(sites)} potential values, got {diag.size}")
    H = adjacency(cube)
    H[np.diag_indices_from(H)] = diag
    return HamiltonianMatrix(H, sites)


def _lookup(mapping, site):
    # d = 1 sites may be keyed by plain ints or 1-tuples
    for key in (tuple(site), site[0] if len(site) == 1 else None):
        if key is not None and key in mapping:
            return mapping[key]
    raise ValueError(f"missing potential value for site {tuple(site)}")


class TwoParticleStructure:
    """Potential-independent part of a two-particle Hamiltonian on one cube.

    Holds the hopping matrix, the interaction diagonal, the shadow sites, and
    the maps from each particle coordinate to its shadow site, so that batches
    of Hamiltonians can be built from shadow-site potentials alone.
    """

    def __init__(self, cube, interaction=InteractionSpec(), shadow_sites=None):
        self.cube = cube
        self.interaction = interaction
        s1 = cube.first.sites()
        s2 = cube.second.sites()
        self.shadow_sites = shadow(cube) if shadow_sites is None else as_sites(shadow_sites, cube.d)
        lookup = {tuple(s): i for i, s in enumerate(self.shadow_sites.tolist())}
        try:
            self.index1 = np.array([lookup[tuple(s)] for s in s1.tolist()])
            self.index2 = np.array([lookup[tuple(s)] for s in s2.tolist()])
        except KeyError as exc:
            raise ValueError(f"site {exc.args[0]} is not among the given shadow sites") from None
        n1 = len(s1)
        self.site_order = np.concatenate([np.repeat(s1, n1, axis=0), np.tile(s2, (n1, 1))],
                                         axis=1)
        self.u_diag = interaction(np.repeat(s1, n1, axis=0), np.tile(s2, (n1, 1))).astype(float)
        A1 = adjacency(cube.first)
        eye = np.eye(n1)
        self.hopping = np.kron(A1, eye) + np.kron(eye, A1)

    @property
    def dimension(self):
        return self.hopping.shape[0]

    @cached_property
    def _diag_idx(self):
        return np.diag_indices(self.dimension)

    def diagonal(self, shadow_values):
        """``V(x1) + V(x2) + U(x1, x2)`` for shadow potentials of shape ``(..., m)``."""
        v = np.asarray(shadow_values, dtype=float)
        d1 = v[..., self.index1]
        d2 = v[..., self.index2]
        diag = (d1[..., :, None] + d2[..., None, :]).reshape(v.shape[:-1] + (-1,))
        return diag + self.u_diag

    def matrices(self, shadow_values):
        """Dense Hamiltonians, shape ``(..., dim, dim)``."""
        diag = self.diagonal(shadow_values)
        H = np.broadcast_to(self.hopping, diag.shape[:-1] + self.hopping.shape).copy()
        H[..., self._diag_idx[0], self._diag_idx[1]] = diag
        return H

    def matrix(self, shadow_values):
        return HamiltonianMatrix(self.matrices(shadow_values), self.site_order)


def assemble_two_particle(cube, field, action, omega, interaction=InteractionSpec()):
    """``sum_j (Delta_j + V(x_j)) + U`` on ``cube`` with Dirichlet conditions.

    The potential is evaluated once per shadow site.
    """
    from .randelette import potential_values

    structure = TwoParticleStructure(cube, interaction)
    w = omega.asarray() if hasattr(omega, "asarray") else np.atleast_1d(omega)
    v = potential_values(field, action, w, structure.shadow_sites)
    return structure.matrix(v)
