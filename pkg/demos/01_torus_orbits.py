"""
Orbits of an irrational rotation
================================

The golden-mean rotation on the circle, its orbit spacings, and the dyadic
level that separates every point of a finite orbit.
"""

# %%
# The shift acts by ``w -> frac(w + alpha * x)``.
import numpy as np

from qpwegner import (LatticeCube, ShiftAction, TorusPoint, apply_shift, fit_diophantine,
                      min_spacing, partition_index, separation_level, trajectory)

golden = ShiftAction()
w = TorusPoint([0.0])
print("alpha =", golden.frequency[0, 0])
print("orbit of 0 over x = -3..3:",
      np.round([p.coords[0] for p in trajectory(golden, w, range(-3, 4))], 6))
print("T^(10^6) 0.3 =", apply_shift(golden, TorusPoint([0.3]), [10 ** 6]).coords[0])

# %%
# Minimal spacing of the orbit over a lattice cube.  It does not depend on the
# starting point, and ``L * delta_L`` stays bounded away from zero.
print("\n   L   delta_L     L*delta_L")
Ls = [2 ** k for k in range(1, 10)]
deltas = []
for L in Ls:
    d = min_spacing(golden, w, LatticeCube((0,), L))
    deltas.append(d)
    print(f"{L:4d}  {d:.8f}  {L * d:.6f}")
B, C, low = fit_diophantine(Ls, deltas)
print(f"fitted exponent B = {B:.4f}, constant C = {C:.4f}, min L*delta = {low:.4f}")

# %%
# The separation level: once cubes have side below the spacing, every orbit
# point sits in its own cube.
L = 8
cube = LatticeCube((0,), L)
delta = min_spacing(golden, w, cube)
n0 = separation_level(delta)
cells = [partition_index(n0, p).flat_index for p in trajectory(golden, w, cube.sites())]
print(f"\ndelta = {delta:.5f}, n0 = {n0}, distinct cubes {len(set(cells))} of {len(cells)}")
cells = [partition_index(n0 - 2, p).flat_index for p in trajectory(golden, w, cube.sites())]
print(f"two levels coarser: {len(set(cells))} distinct cubes")
