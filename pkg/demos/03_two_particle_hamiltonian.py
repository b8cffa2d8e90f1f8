"""
Two interacting particles in a box
==================================

Assembly of the two-particle Hamiltonian with Dirichlet conditions, its
free spectrum, and the exchange symmetry of spectra.
"""

# %%
import numpy as np

from qpwegner import (CoefficientSchedule, InteractionSpec, RandeletteField, ShiftAction,
                      ThetaSample, TwoParticleCube, TwoParticleStructure, assemble_two_particle,
                      eigenvalues_symmetric, exchange, separation_ok, shadow)

cube = TwoParticleCube((0, 10), 1)
print("shadow of", cube.center, "->", shadow(cube).ravel().tolist())
print("separated from (20, 23) at L=2:", separation_ok((0, 3), (20, 23), 2))
print("separated from its own exchange image:", separation_ok((0, 50), (50, 0), 10))

# %%
# Without potential and interaction the spectrum is the sum of two path-graph
# spectra.
free = TwoParticleStructure(TwoParticleCube((0, 0), 1), InteractionSpec(0.0, 0))
print("\nfree 9x9 spectrum:", np.round(eigenvalues_symmetric(free.matrix(np.zeros(3))).eigenvalues, 7) + 0.0)

# %%
# With the quasi-periodic potential, the spectra at u and at S(u) coincide.
field = RandeletteField(CoefficientSchedule(), ThetaSample(7), truncation_N=40)
golden = ShiftAction()
u = (2, -5)
a = eigenvalues_symmetric(assemble_two_particle(TwoParticleCube(u, 2), field, golden, [0.4]))
b = eigenvalues_symmetric(assemble_two_particle(TwoParticleCube(exchange(u), 2), field, golden,
                                                [0.4]))
print("max |spec(u) - spec(Su)| =", np.abs(a.eigenvalues - b.eigenvalues).max())

# %%
# The verified solver returns the same spectrum as LAPACK.
H = assemble_two_particle(TwoParticleCube(u, 3), field, golden, [0.4])
ours = eigenvalues_symmetric(H, verify=True).eigenvalues
ref = eigenvalues_symmetric(H, method="lapack").eigenvalues
print(f"dimension {H.dimension}, max difference to LAPACK {np.abs(ours - ref).max():.1e}")
