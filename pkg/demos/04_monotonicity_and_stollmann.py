"""
Diagonal monotonicity and Stollmann's lemma
===========================================

Eigenvalues of the two-particle Hamiltonian as functions of the shadow
potentials are diagonally monotone, which is what turns a one-site density
bound into an eigenvalue concentration bound.
"""

# %%
import numpy as np

from qpwegner import (InteractionSpec, TwoParticleCube, TwoParticleStructure, check_dm,
                      mean_functional, stollmann_empirical)
from qpwegner.stollmann import sample_functional, stollmann_from_values, two_particle_eigenvalue

st = TwoParticleStructure(TwoParticleCube((0, 1), 1), InteractionSpec())
J = len(st.shadow_sites)
rng = np.random.default_rng(0)
q = rng.random(J)
for k in (0, 4, 8):
    res = check_dm(two_particle_eigenvalue(st, k), q, rng.random(J), 1.0)
    print(f"eigenvalue {k}: monotone margin {res.monotone_margin:.4f}, "
          f"diagonal margin {res.diagonal_margin:.4f} (exactly t = 1 above the DM bound)")

# %%
# Mean of two uniforms: the exact probability of a centered window of width
# 0.1 is 0.19, just under the bound 2 * 0.1.
res = stollmann_empirical(mean_functional, 2, (0.45, 0.1), 100_000, seed=2)
e = res.estimate
print(f"\nmean2: p_hat {e.p_hat:.4f} [{e.ci_low:.4f}, {e.ci_high:.4f}], bound {res.bound:.2f}")

# %%
# Ground-state energy of the two-particle box, windows centred at the median.
phi = two_particle_eigenvalue(st, 0)
vals = sample_functional(phi, J, 50_000, seed=3)
mid = float(np.median(vals))
for eps in (0.05, 0.1, 0.2):
    r = stollmann_from_values(vals, J, (mid - eps / 2, eps))
    print(f"eps {eps}: p_hat {r.estimate.p_hat:.4f}, bound |J| eps = {r.bound:.2f}")
