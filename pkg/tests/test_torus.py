import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpwegner.torus import (GOLDEN, DegenerateOrbitError, DyadicCubeIndex, LatticeCube,
                            ShiftAction, TorusPoint, apply_shift, circular_distance,
                            fit_diophantine, min_spacing, partition_index, separation_level,
                            torus_distance, trajectory)

unit = st.floats(0.0, 1.0, exclude_max=True, allow_nan=False)
lattice = st.integers(-1000, 1000)


def circ(a, b):
    return float(np.max(circular_distance(a, b)))


# ------------------------------------------------------------ examples

def test_torus_point_normalizes():
    assert TorusPoint([1.25, -0.25]).coords == (0.25, 0.75)
    assert math.copysign(1.0, TorusPoint([-0.0]).coords[0]) == 1.0
    assert TorusPoint([-1e-300]).coords[0] < 1.0


def test_apply_shift_examples(golden):
    alpha = 0.6180339887
    act = ShiftAction([[alpha]], warn=False)
    assert apply_shift(golden, TorusPoint([0.25]), [0]).coords == (0.25,)
    assert apply_shift(act, TorusPoint([0.0]), [1]).coords[0] == pytest.approx(0.6180339887, abs=1e-15)
    assert apply_shift(act, TorusPoint([0.9]), [1]).coords[0] == pytest.approx(0.5180339887, abs=1e-15)


def test_apply_shift_dimension_mismatch(golden):
    with pytest.raises(ValueError):
        apply_shift(golden, TorusPoint([0.1]), [1, 2])
    with pytest.raises(ValueError):
        apply_shift(golden, TorusPoint([0.1, 0.2]), [1])


def test_user_frequency_warns():
    with pytest.warns(UserWarning):
        ShiftAction([[0.3]])


def test_torus_distance_examples():
    assert torus_distance(TorusPoint([0.1]), TorusPoint([0.9])) == pytest.approx(0.2)
    assert torus_distance(TorusPoint([0.3]), TorusPoint([0.3])) == 0.0
    assert torus_distance(TorusPoint([0.1, 0.4]), TorusPoint([0.2, 0.9])) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        torus_distance(TorusPoint([0.1]), TorusPoint([0.1, 0.2]))


def test_trajectory_examples(golden):
    act = ShiftAction([[0.6180339887]], warn=False)
    assert [p.coords for p in trajectory(golden, TorusPoint([0.0]), [0])] == [(0.0,)]
    pts = [p.coords[0] for p in trajectory(act, TorusPoint([0.0]), [-1, 0, 1])]
    assert pts == pytest.approx([0.3819660113, 0.0, 0.6180339887], abs=1e-12)
    assert len(trajectory(golden, TorusPoint([0.3]), LatticeCube((0,), 1).sites())) == 3


def brute_spacing(alpha, omega, sites):
    # independent enumeration with python floats
    pts = [(omega + alpha * x) % 1.0 for x in sites]
    return min(min(abs(a - b), 1 - abs(a - b)) for a, b in combinations(pts, 2))


def test_min_spacing_examples(golden):
    assert min_spacing(golden, TorusPoint([0.123]), LatticeCube((0,), 1)) == pytest.approx(
        brute_spacing(GOLDEN, 0.123, [-1, 0, 1]), abs=1e-12)
    assert min_spacing(golden, TorusPoint([0.0]), LatticeCube((0,), 1)) == pytest.approx(
        0.2360679775, abs=1e-10)
    assert min_spacing(golden, TorusPoint([0.4]), [0, 1]) == pytest.approx(0.3819660113, abs=1e-10)


def test_min_spacing_rejects_rational_orbit():
    act = ShiftAction([[0.25]], warn=False)
    with pytest.raises(DegenerateOrbitError):
        min_spacing(act, TorusPoint([0.1]), LatticeCube((0,), 3))


def test_min_spacing_times_L_bounded_below(golden):
    Ls = [2 ** k for k in range(1, 10)]
    deltas = [min_spacing(golden, TorusPoint([0.0]), LatticeCube((0,), L)) for L in Ls]
    for L, dl in zip(Ls[:5], deltas[:5]):
        assert dl == pytest.approx(brute_spacing(GOLDEN, 0.0, range(-L, L + 1)), abs=1e-12)
    B, C, lower = fit_diophantine(Ls, deltas)
    assert lower > 0.2
    assert 0.9 <= B <= 1.1


def test_separation_level_examples():
    assert separation_level(0.5) == 2
    assert separation_level(0.2360679775) == 3
    assert separation_level(2.0 ** -10) == 11
    for bad in (0.0, 0.6, -1.0):
        with pytest.raises(ValueError):
            separation_level(bad)


def test_partition_index_examples():
    assert partition_index(2, TorusPoint([0.30])).multi_index == (2,)
    assert partition_index(1, TorusPoint([0.7, 0.2])).multi_index == (2, 1)
    assert partition_index(3, TorusPoint([0.0])).multi_index == (1,)


def test_flat_index_roundtrip():
    for n, nu in [(1, 1), (2, 2), (3, 3)]:
        seen = set()
        for k in range(1, 2 ** (n * nu) + 1):
            idx = DyadicCubeIndex.from_flat(n, k, nu)
            assert idx.flat_index == k
            seen.add(idx.multi_index)
        assert len(seen) == 2 ** (n * nu)
    assert DyadicCubeIndex(2, (2, 3)).flat_index == 1 + 1 + 2 * 4
    with pytest.raises(ValueError):
        DyadicCubeIndex.from_flat(1, 5, 2)


def test_lattice_cube_sites():
    cube = LatticeCube((1, -1), 1)
    assert len(cube) == 9 == len(cube.sites())
    assert cube.sites()[0].tolist() == [0, -2]
    assert cube.sites()[1].tolist() == [0, -1]


# ------------------------------------------------------------ properties

@settings(max_examples=200, deadline=None)
@given(w=unit, x=lattice, y=lattice)
def test_group_action(w, x, y):
    golden = ShiftAction()
    lhs = apply_shift(golden, TorusPoint([w]), [x + y])
    rhs = apply_shift(golden, apply_shift(golden, TorusPoint([w]), [x]), [y])
    assert circ(lhs.coords, rhs.coords) <= 1e-12
    assert apply_shift(golden, TorusPoint([w]), [0]).coords == (w,)


@settings(max_examples=200, deadline=None)
@given(a=st.tuples(unit, unit), b=st.tuples(unit, unit), c=st.tuples(unit, unit),
       x=st.tuples(lattice, lattice))
def test_metric_properties(a, b, c, x):
    act = ShiftAction([[GOLDEN, math.sqrt(2) - 1], [math.sqrt(3) - 1, GOLDEN ** 2]], warn=False)
    A, B, C = TorusPoint(a), TorusPoint(b), TorusPoint(c)
    dab = torus_distance(A, B)
    assert 0.0 <= dab <= 0.5
    assert dab == torus_distance(B, A)
    assert dab <= torus_distance(A, C) + torus_distance(C, B) + 1e-15
    shifted = torus_distance(apply_shift(act, A, x), apply_shift(act, B, x))
    assert abs(shifted - dab) <= 1e-12


def test_spacing_independent_of_omega_and_center(golden, rng):
    L = 7
    ref = min_spacing(golden, TorusPoint([0.0]), LatticeCube((0,), L))
    for w in rng.random(20):
        for u in rng.integers(-500, 500, 20):
            assert abs(min_spacing(golden, TorusPoint([w]), LatticeCube((int(u),), L)) - ref) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(w=unit, n=st.integers(1, 20))
def test_partition_indicator(w, n):
    i = partition_index(n, TorusPoint([w])).multi_index[0]
    lo, hi = (i - 1) / 2 ** n, i / 2 ** n
    assert lo <= w < hi


@pytest.mark.parametrize("n", range(1, 11))
def test_partition_tiles_circle(n):
    mids = (np.arange(2 ** n) + 0.5) / 2 ** n
    ks = [partition_index(n, TorusPoint([m])).flat_index for m in mids]
    assert ks == list(range(1, 2 ** n + 1))
    lefts = np.arange(2 ** n) / 2 ** n
    assert [partition_index(n, TorusPoint([m])).flat_index for m in lefts] == ks


@settings(max_examples=300, deadline=None)
@given(a=unit, b=unit)
def test_separated_points_fall_in_different_cubes(a, b):
    dist = torus_distance(TorusPoint([a]), TorusPoint([b]))
    if dist < 1e-9:
        return
    n0 = separation_level(min(dist, 0.5))
    for n in range(n0, min(n0 + 5, 60)):
        assert partition_index(n, TorusPoint([a])) != partition_index(n, TorusPoint([b]))


def test_shift_matches_rational_arithmetic(golden, rng):
    # the double frequency and omega taken as exact rationals
    from fractions import Fraction
    alpha = Fraction(GOLDEN)
    for _ in range(200):
        w = float(rng.random())
        x = int(rng.integers(-10 ** 7, 10 ** 7))
        exact = float((Fraction(w) + alpha * x) % 1)
        got = apply_shift(golden, TorusPoint([w]), [x]).coords[0]
        assert circ([got], [exact]) <= 1e-15
