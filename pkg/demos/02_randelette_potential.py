"""
The randelette potential
========================

A hierarchical random series on the circle.  One seed fixes the whole
parameter point, the tail beyond the truncation is certified, and the value
splits into a part fixed by the coarse levels plus an independent remainder.
"""

# %%
import numpy as np

from qpwegner import (CoefficientSchedule, RandeletteField, ShiftAction, ThetaSample,
                      conditional_density_bound, decompose, potential,
                      potential_values, tail_bound)
from qpwegner.randelette import coefficient

sched = CoefficientSchedule(c_upper=1.0, c_lower=1.0, kappa=2.0, M=2.0)
field = RandeletteField(sched, ThetaSample(1), nu=1, truncation_N=48)
print("a_1..a_5 =", sched.coefficients(5))
print("tail bound after 48 levels:", tail_bound(sched, 48))

# %%
# Values on a grid of the circle: a step function refined level by level.
grid = np.linspace(0, 1, 9, endpoint=False)[:, None]
print("\nv on a coarse grid:", np.round(field.evaluate(grid), 4))

# %%
# The lattice potential is the field read along the orbit.
golden = ShiftAction()
sites = np.arange(-5, 6)[:, None]
print("V(x; 0.2) for x = -5..5:", np.round(potential_values(field, golden, [0.2], sites), 4))

# %%
# Splitting at level n0: ``xi`` reads levels below n0 only, ``eta`` the rest.
n0 = 5
xi, eta = decompose(field, golden, [0.2], [3], n0)
print(f"\nV(3) = {potential(field, golden, [0.2], [3]):.12f} = xi {xi:.6f} + eta {eta:.6f}")

# %%
# Freeze the coarse levels, resample the fine ones, and compare the histogram
# of v with the density bound 1 / a_n0.  Each fine level contributes one
# uniform parameter at a fixed point, so the resampling is a sum of scaled
# uniforms.
from qpwegner.rng import STREAM_AUX, keyed_uniform

samples = 100_000
ids = np.arange(samples, dtype=np.uint64)
coarse = RandeletteField(sched, ThetaSample(1), truncation_N=n0 - 1).evaluate([[0.3]])[0]
fine = sum(coefficient(sched, n) * keyed_uniform(9, STREAM_AUX, n, ids)
           for n in range(n0, 30))
vals = coarse + fine
width = coefficient(sched, n0) / 10
hist, _ = np.histogram(vals, bins=np.arange(vals.min(), vals.max() + width, width),
                       density=True)
print(f"max empirical density {hist.max():.2f} vs bound {conditional_density_bound(sched, n0):.2f}")
