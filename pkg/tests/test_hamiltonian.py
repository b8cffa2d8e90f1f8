import itertools

import numpy as np
import pytest

from qpwegner.hamiltonian import (InteractionSpec, TwoParticleCube, TwoParticleStructure,
                                  adjacency, as_pair, assemble_one_particle,
                                  assemble_two_particle, cube_distance, exchange,
                                  separation_ok, shadow)
from qpwegner.randelette import CoefficientSchedule, RandeletteField, ThetaSample, potential
from qpwegner.spectral import eigenvalues_symmetric
from qpwegner.torus import LatticeCube, TorusPoint

FREE_9 = [-2.8284271, -1.4142136, -1.4142136, 0, 0, 0, 1.4142136, 1.4142136, 2.8284271]


def path_spectrum(m):
    return 2 * np.cos(np.arange(1, m + 1) * np.pi / (m + 1))


def test_as_pair():
    assert as_pair((0, 5)) == ((0,), (5,))
    assert as_pair([[1, 2], [3, 4]]) == ((1, 2), (3, 4))
    with pytest.raises(ValueError):
        as_pair((1, 2, 3))


def test_cube_size():
    assert len(TwoParticleCube((0, 0), 2)) == 25
    assert len(TwoParticleCube(((0, 0), (1, 1)), 1)) == 81
    with pytest.raises(ValueError):
        TwoParticleCube((0, 0), -1)


def test_shadow_examples():
    assert shadow(TwoParticleCube((0, 0), 1)).ravel().tolist() == [-1, 0, 1]
    assert shadow(TwoParticleCube((0, 10), 1)).ravel().tolist() == [-1, 0, 1, 9, 10, 11]
    for u in [(0, 3), (4, -7), ((1, 2), (2, 0))]:
        a = shadow(TwoParticleCube(u, 2))
        b = shadow(TwoParticleCube(exchange(u), 2))
        assert np.array_equal(a, b)
        assert len(a) <= 2 * len(LatticeCube(as_pair(u)[0], 2))


def test_exchange_examples():
    assert exchange((0, 5)) == ((5,), (0,))
    u = ((1, 2), (3, 4))
    assert exchange(exchange(u)) == u
    assert exchange((3, 3)) == as_pair((3, 3))


def test_separation_examples():
    assert separation_ok((0, 0), (100, 100), 1)
    assert not separation_ok((0, 0), (0, 0), 1)
    assert not separation_ok((0, 50), (50, 0), 10)
    assert separation_ok((0, 3), (20, 23), 2)
    assert not separation_ok((0, 3), (20, 23), 3)
    assert cube_distance((0, 0), (3, 4), "euclidean") == 5.0
    assert separation_ok((0, 0), (6, 6), 1, norm="euclidean") is True
    assert separation_ok((0, 0), (6, 6), 1) is False
    with pytest.raises(ValueError):
        cube_distance((0, 0), (1, 1), "taxicab")


def test_interaction_symmetric():
    U = InteractionSpec(2.5, 2)
    xs = np.array(list(itertools.product(range(-3, 4), repeat=2)))
    assert np.array_equal(U(xs[:, None], xs[None, :]), U(xs[None, :], xs[:, None]))
    assert U([0], [2]) == 2.5 and U([0], [3]) == 0.0
    with pytest.raises(ValueError):
        InteractionSpec(1.0, -1)


def test_adjacency_structure():
    for d, L in [(1, 3), (2, 2), (3, 1)]:
        A = adjacency(LatticeCube((0,) * d, L))
        assert np.array_equal(A, A.T)
        assert set(np.unique(A)) <= {0.0, 1.0}
        assert np.all(np.diag(A) == 0)
        assert A.sum(axis=1).max() <= 2 * d
        # count of edges in a grid graph
        side = 2 * L + 1
        assert A.sum() / 2 == d * side ** (d - 1) * (side - 1)


def test_one_particle_examples():
    cube = LatticeCube((0,), 1)
    H = assemble_one_particle(cube, {-1: 0.0, 0: 0.0, 1: 0.0})
    assert eigenvalues_symmetric(H).eigenvalues == pytest.approx([-1.4142136, 0, 1.4142136], abs=1e-7)
    H1 = assemble_one_particle(LatticeCube((4,), 0), {(4,): 0.7})
    assert H1.entries.tolist() == [[0.7]]
    v = np.random.default_rng(0).random(7)
    base = eigenvalues_symmetric(assemble_one_particle(LatticeCube((0,), 3), v)).eigenvalues
    shifted = eigenvalues_symmetric(assemble_one_particle(LatticeCube((0,), 3), v + 1.3)).eigenvalues
    assert np.max(np.abs(shifted - base - 1.3)) <= 1e-12
    with pytest.raises(ValueError):
        assemble_one_particle(cube, {-1: 0.0, 0: 0.0})
    with pytest.raises(ValueError):
        assemble_one_particle(cube, [0.0, 1.0])


def test_two_particle_L0(field, golden):
    cube = TwoParticleCube((2, 2), 0)
    om = TorusPoint([0.41])
    H = assemble_two_particle(cube, field, golden, om)
    V = potential(field, golden, om, [2])
    assert H.entries.shape == (1, 1)
    assert H.entries[0, 0] == V + V + 1.0
    H = assemble_two_particle(TwoParticleCube((2, 5), 0), field, golden, om)
    assert H.entries[0, 0] == V + potential(field, golden, om, [5])


def test_free_two_particle_spectrum():
    st = TwoParticleStructure(TwoParticleCube((0, 0), 1), InteractionSpec(0.0, 0))
    lam = eigenvalues_symmetric(st.matrix(np.zeros(3))).eigenvalues
    assert lam == pytest.approx(FREE_9, abs=1e-7)
    # tensor-sum oracle at a bigger size
    for L in (2, 3):
        st = TwoParticleStructure(TwoParticleCube((0, 40), L), InteractionSpec(0.0, 0))
        p = path_spectrum(2 * L + 1)
        oracle = np.sort((p[:, None] + p[None, :]).ravel())
        lam = eigenvalues_symmetric(st.matrix(np.zeros(len(st.shadow_sites)))).eigenvalues
        assert np.max(np.abs(lam - oracle)) <= 1e-9


def test_two_particle_entries(field, golden):
    cube = TwoParticleCube((0, 1), 1)
    om = TorusPoint([0.2])
    U = InteractionSpec(0.5, 1)
    H = assemble_two_particle(cube, field, golden, om, U)
    M = H.entries
    order = H.site_order.tolist()
    assert order[0] == [-1, 0] and order[1] == [-1, 1]
    for i, (x1, x2) in enumerate(order):
        want = potential(field, golden, om, [x1]) + potential(field, golden, om, [x2])
        want += 0.5 if abs(x1 - x2) <= 1 else 0.0
        assert M[i, i] == pytest.approx(want, abs=1e-15)
        for j, (y1, y2) in enumerate(order):
            if i != j:
                hop = abs(x1 - y1) + abs(x2 - y2) == 1
                assert M[i, j] == (1.0 if hop else 0.0)


def test_constant_shift_gives_2c(rng):
    st = TwoParticleStructure(TwoParticleCube((0, 2), 2), InteractionSpec())
    v = rng.random(len(st.shadow_sites))
    c = 0.37
    diff = st.matrices(v + c) - st.matrices(v)
    assert np.allclose(diff, 2 * c * np.eye(st.dimension), atol=1e-15, rtol=0)


def test_matrix_symmetric_bitwise(rng):
    for u, d in [((0, 3), 1), (((0, 0), (1, 4)), 2)]:
        st = TwoParticleStructure(TwoParticleCube(u, 1), InteractionSpec())
        H = st.matrices(rng.random((5, len(st.shadow_sites))))
        assert np.array_equal(H, np.swapaxes(H, -1, -2))
        off = H - np.eye(st.dimension) * np.diagonal(H, axis1=-2, axis2=-1)[..., None, :]
        assert set(np.unique(off)) <= {0.0, 1.0}
        assert off.sum(axis=-1).max() <= 4 * d


def test_gershgorin(rng):
    st = TwoParticleStructure(TwoParticleCube((0, 1), 2), InteractionSpec(0.8, 1))
    for _ in range(20):
        H = st.matrix(rng.random(len(st.shadow_sites)) * 3)
        lam = eigenvalues_symmetric(H).eigenvalues
        diag = np.diag(H.entries)
        assert lam.min() >= diag.min() - 4 - 1e-12
        assert lam.max() <= diag.max() + 4 + 1e-12


def test_weyl_single_site(rng):
    st = TwoParticleStructure(TwoParticleCube((0, 2), 1), InteractionSpec())
    m = len(st.shadow_sites)
    for _ in range(20):
        q = rng.random(m)
        base = np.linalg.eigvalsh(st.matrices(q))
        j = rng.integers(m)
        q2 = q.copy()
        q2[j] += rng.random() * 2
        assert np.all(np.linalg.eigvalsh(st.matrices(q2)) - base >= -1e-12)


def test_exchange_symmetry_of_spectra(golden):
    rng = np.random.default_rng(5)
    for i in range(50):
        L = int(rng.integers(0, 4))
        u = tuple(int(c) for c in rng.integers(-20, 20, 2))
        f = RandeletteField(CoefficientSchedule(), ThetaSample(int(rng.integers(1 << 32))),
                            truncation_N=30)
        om = TorusPoint([rng.random()])
        a = eigenvalues_symmetric(assemble_two_particle(TwoParticleCube(u, L), f, golden, om),
                                  method="lapack").eigenvalues
        b = eigenvalues_symmetric(assemble_two_particle(TwoParticleCube(exchange(u), L), f,
                                                        golden, om), method="lapack").eigenvalues
        assert np.max(np.abs(a - b)) <= 1e-9


def test_structure_rejects_foreign_shadow():
    with pytest.raises(ValueError):
        TwoParticleStructure(TwoParticleCube((0, 5), 1), InteractionSpec(), shadow_sites=[0, 1])


def test_structure_general_d(rng):
    cube = TwoParticleCube(((0, 0), (0, 1)), 1)
    st = TwoParticleStructure(cube, InteractionSpec(0, 0))
    p = path_spectrum(3)
    one = np.sort((p[:, None] + p[None, :]).ravel())
    oracle = np.sort((one[:, None] + one[None, :]).ravel())
    lam = np.linalg.eigvalsh(st.matrices(np.zeros(len(st.shadow_sites))))
    assert np.max(np.abs(lam - oracle)) <= 1e-9
