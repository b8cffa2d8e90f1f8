import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpwegner.spectral import (EigenConvergenceError, EigenVerificationError, Spectrum,
                               batch_dist_between, batch_dist_to_energy, count_below,
                               dist_between_spectra, dist_to_energy, eigenvalues_symmetric,
                               householder_tridiagonal, ids_estimate, tridiagonal_ql)
from qpwegner.spectral import _verify


def path_matrix(m):
    return np.eye(m, k=1) + np.eye(m, k=-1)


def random_symmetric(rng, n):
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


def test_examples():
    assert eigenvalues_symmetric(np.diag([3.0, 1.0, 2.0])).eigenvalues.tolist() == [1, 2, 3]
    lam = eigenvalues_symmetric(path_matrix(3)).eigenvalues
    assert lam == pytest.approx([-1.4142136, 0, 1.4142136], abs=1e-7)
    assert eigenvalues_symmetric(np.array([[2.5]])).eigenvalues.tolist() == [2.5]


@pytest.mark.parametrize("m", [2, 5, 17, 50])
def test_path_spectra(m):
    exact = np.sort(2 * np.cos(np.arange(1, m + 1) * np.pi / (m + 1)))
    lam = eigenvalues_symmetric(path_matrix(m), verify=True).eigenvalues
    assert np.max(np.abs(lam - exact)) <= 1e-10


@pytest.mark.parametrize("n", [1, 2, 3, 8, 30, 81])
def test_matches_lapack(n, rng):
    a = random_symmetric(rng, n)
    ours = eigenvalues_symmetric(a, verify=True).eigenvalues
    ref = eigenvalues_symmetric(a, method="lapack", verify=True).eigenvalues
    assert np.max(np.abs(ours - ref)) <= 1e-10 * (1 + np.abs(a).sum(axis=1).max())


def test_tridiagonal_reduction(rng):
    a = random_symmetric(rng, 12)
    d, e, Q = householder_tridiagonal(a, vectors=True)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert np.allclose(Q.T @ a @ Q, T, atol=1e-12)
    assert np.allclose(Q.T @ Q, np.eye(12), atol=1e-13)


def test_repeated_eigenvalues():
    lam = eigenvalues_symmetric(np.eye(6) * 2.0).eigenvalues
    assert lam.tolist() == [2.0] * 6
    a = np.kron(path_matrix(3), np.eye(3)) + np.kron(np.eye(3), path_matrix(3))
    lam = eigenvalues_symmetric(a, verify=True).eigenvalues
    assert np.sum(np.abs(lam) < 1e-12) == 3


def test_permutation_similarity(rng):
    for n in (5, 25, 60):
        a = random_symmetric(rng, n)
        P = np.eye(n)[rng.permutation(n)]
        x = eigenvalues_symmetric(a).eigenvalues
        y = eigenvalues_symmetric(P @ a @ P.T).eigenvalues
        assert np.max(np.abs(x - y)) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 20), c=st.floats(-50, 50))
def test_shift_covariance(seed, n, c):
    a = random_symmetric(np.random.default_rng(seed), n)
    x = eigenvalues_symmetric(a).eigenvalues
    y = eigenvalues_symmetric(a + c * np.eye(n)).eigenvalues
    assert np.max(np.abs(y - x - c)) <= 1e-10 * (1 + abs(c))


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        eigenvalues_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        eigenvalues_symmetric(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        eigenvalues_symmetric(np.eye(2), method="jacobi")


def test_convergence_failure_is_surfaced():
    d = np.array([1.0, 2.0, 3.0, 4.0])
    e = np.array([1.0, 1.0, 1.0])
    with pytest.raises(EigenConvergenceError):
        tridiagonal_ql(d, e, max_iter=0)


def test_verification_catches_bad_pairs():
    a = np.diag([1.0, 2.0])
    with pytest.raises(EigenVerificationError):
        _verify(a, np.array([1.0, 2.5]), np.eye(2))
    _verify(a, np.array([1.0, 2.0]), np.eye(2))


def test_spectrum_type():
    s = Spectrum([3, 1, 2])
    assert list(s) == [1, 2, 3] and s.dimension == 3 == len(s)
    with pytest.raises(ValueError):
        s.eigenvalues[0] = 9


def test_dist_to_energy_examples():
    assert dist_to_energy(Spectrum([1, 3]), 2) == 1
    assert dist_to_energy(Spectrum([1, 3]), 3) == 0
    assert dist_to_energy(Spectrum([-1, 0, 1]), 10) == 9
    with pytest.raises(ValueError):
        dist_to_energy([], 0.0)


def test_dist_between_examples():
    assert dist_between_spectra(Spectrum([0, 2]), Spectrum([5, 9])) == 3
    assert dist_between_spectra(Spectrum([1, 4]), Spectrum([1, 4])) == 0
    assert dist_between_spectra(Spectrum([0]), Spectrum([-0.25, 0.75])) == 0.25
    with pytest.raises(ValueError):
        dist_between_spectra([], [1.0])


def test_dist_between_matches_brute_force(rng):
    A = rng.standard_normal((200, 7))
    B = rng.standard_normal((200, 11))
    brute = np.abs(A[:, :, None] - B[:, None, :]).min(axis=(1, 2))
    fast = batch_dist_between(A, B)
    assert np.array_equal(fast, brute)
    assert np.array_equal(batch_dist_between(B, A), fast)
    assert np.array_equal(batch_dist_to_energy(A, 0.3), np.abs(A - 0.3).min(axis=1))


def test_count_below_examples():
    s = Spectrum([-1, 0, 1])
    assert count_below(s, 0) == 2 and ids_estimate(s, 0) == pytest.approx(2 / 3)
    assert count_below(s, -5) == 0
    assert count_below(s, 5) == 3
    assert ids_estimate(s, np.inf) == 1.0
    assert count_below(s, -1e-300) == 1


def test_ids_nondecreasing(rng):
    s = Spectrum(rng.standard_normal(40))
    E = np.linspace(-4, 4, 500)
    ids = [ids_estimate(s, e) for e in E]
    assert all(x <= y for x, y in zip(ids, ids[1:]))
