"""Dense symmetric eigensolver and spectrum queries.

Two routes compute the same spectra:

* ``method="householder"``: Householder reduction to tridiagonal form
  followed by implicit-shift QL iteration, written here in numpy.
* ``method="lapack"``: ``numpy.linalg.eigvalsh``, used for the batched
  Monte Carlo loops where thousands of small matrices are diagonalized.
"""
from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "Spectrum", "EigenConvergenceError", "EigenVerificationError",
    "householder_tridiagonal", "tridiagonal_ql", "eigenvalues_symmetric",
    "eigvalsh_batch", "dist_to_energy", "dist_between_spectra", "batch_dist_to_energy",
    "batch_dist_between", "count_below", "ids_estimate",
]


class EigenConvergenceError(RuntimeError):
    """QL iteration hit its iteration cap."""


class EigenVerificationError(RuntimeError):
    """Residual or trace check failed in verification mode."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Sorted eigenvalues counted with multiplicity."""

    eigenvalues: np.ndarray

    def __init__(self, eigenvalues):
        ev = np.sort(np.asarray(eigenvalues, dtype=float).reshape(-1))
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def dimension(self):
        return self.eigenvalues.size

    def __len__(self):
        return self.eigenvalues.size

    def __iter__(self):
        return iter(self.eigenvalues.tolist())


def _as_matrix(m):
    a = m.entries if hasattr(m, "entries") else m
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    scale = np.abs(a).max() if a.size else 0.0
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(scale, 1.0)):
        raise ValueError("matrix is not symmetric")
    return a


def householder_tridiagonal(a, *, vectors=False):
    """Orthogonal reduction ``Q.T @ a @ Q = T`` with ``T`` tridiagonal.

    Returns ``(diag, offdiag, Q)``; ``Q`` is ``None`` unless ``vectors``.
    """
    A = np.array(a, dtype=float)
    n = A.shape[0]
    Q = np.eye(n) if vectors else None
    for k in range(n - 2):
        x = A[k + 1:, k]
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            continue
        norm = math.hypot(x[0], tail)
        alpha = -math.copysign(norm, x[0])
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        # two-sided reflection H A H restricted to the trailing block
        A[k + 1:, k:] -= 2.0 * np.outer(v, v @ A[k + 1:, k:])
        A[k:, k + 1:] -= 2.0 * np.outer(A[k:, k + 1:] @ v, v)
        if vectors:
            Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v)
    return np.diag(A).copy(), np.diag(A, 1).copy(), Q


def tridiagonal_ql(diag, offdiag, Z=None, *, max_iter=60):
    """Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL.

    ``offdiag[i]`` couples rows ``i`` and ``i+1``.  If ``Z`` is given its
    columns are rotated along (pass the Householder ``Q`` to get the
    eigenvectors of the original matrix).  Eigenvalues come back unsorted.
    """
    d = np.array(diag, dtype=float)
    n = d.size
    e = np.zeros(n)
    e[:n - 1] = offdiag
    eps = np.finfo(float).eps
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                raise EigenConvergenceError(f"QL iteration did not converge for eigenvalue {l}")
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            deflated = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if Z is not None:
                    zi1 = Z[:, i + 1].copy()
                    Z[:, i + 1] = s * Z[:, i] + c * zi1
                    Z[:, i] = c * Z[:, i] - s * zi1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, Z


def eigenvalues_symmetric(m, *, method="householder", verify=False):
    """Full spectrum of a real symmetric matrix.

    With ``verify=True`` eigenvectors are computed as well and every pair is
    checked: ``|M v - lam v|_2 <= 1e-10 (1 + |M|_inf)`` and the eigenvalue sum
    must match the trace to ``1e-9 * dim``.
    """
    a = _as_matrix(m)
    n = a.shape[0]
    if n == 0:
        raise ValueError("empty matrix")
    if method == "householder":
        d, e, Q = householder_tridiagonal(a, vectors=verify)
        lam, Z = tridiagonal_ql(d, e, Q)
    elif method == "lapack":
        if verify:
            lam, Z = np.linalg.eigh(a)
        else:
            lam, Z = np.linalg.eigvalsh(a), None
    else:
        raise ValueError(f"unknown eigensolver method {method!r}")
    if verify:
        _verify(a, lam, Z)
    return Spectrum(lam)


def _verify(a, lam, Z):
    n = a.shape[0]
    scale = 1.0 + np.abs(a).sum(axis=1).max()
    res = np.linalg.norm(a @ Z - Z * lam, axis=0)
    if np.any(res > 1e-10 * scale):
        raise EigenVerificationError(f"eigenpair residual {res.max():.3e} exceeds "
                                     f"{1e-10 * scale:.3e}")
    if abs(lam.sum() - np.trace(a)) > 1e-9 * n:
        raise EigenVerificationError("eigenvalue sum does not match the trace")


def eigvalsh_batch(H):
    """Sorted eigenvalues of a stack of symmetric matrices ``(..., n, n)``."""
    return np.linalg.eigvalsh(H)


def _values(s):
    v = s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s, dtype=float).reshape(-1)
    if v.size == 0:
        raise ValueError("empty spectrum")
    return v


def dist_to_energy(s, E):
    return float(np.min(np.abs(_values(s) - E)))


def dist_between_spectra(a, b):
    """``min |lam_i - mu_j|`` via one merge of the sorted lists."""
    va, vb = np.sort(_values(a)), np.sort(_values(b))
    return float(batch_dist_between(va[None, :], vb[None, :])[0])


def batch_dist_to_energy(eigs, E):
    return np.min(np.abs(np.asarray(eigs) - E), axis=-1)


def batch_dist_between(A, B):
    """Row-wise spectral distance between stacks ``(S, n)`` and ``(S, m)``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[-1] == 0 or B.shape[-1] == 0:
        raise ValueError("empty spectrum")
    vals = np.concatenate([A, B], axis=-1)
    labels = np.concatenate([np.zeros(A.shape[-1], bool), np.ones(B.shape[-1], bool)])
    order = np.argsort(vals, axis=-1, kind="stable")
    merged = np.take_along_axis(vals, order, axis=-1)
    lab = labels[order]
    gaps = np.diff(merged, axis=-1)
    gaps[lab[..., 1:] == lab[..., :-1]] = np.inf
    return gaps.min(axis=-1)


def count_below(s, E):
    """Number of eigenvalues ``<= E`` (right-continuous in ``E``)."""
    v = s.eigenvalues if isinstance(s, Spectrum) else np.sort(np.asarray(s, dtype=float))
    return int(np.searchsorted(v, E, side="right"))


def ids_estimate(s, E):
    """Finite-volume integrated density of states ``count_below / dimension``."""
    v = s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s, dtype=float)
    return count_below(s, E) / v.size
