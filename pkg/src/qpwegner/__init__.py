"""Quasi-periodic grand-ensemble potentials and Wegner-type eigenvalue concentration.

Submodules
----------
torus        torus points, the Z^d shift action, dyadic partitions, orbit spacing
randelette   the randelette potential, its truncation and conditional decomposition
hamiltonian  finite-volume one- and two-particle tight-binding matrices
spectral     symmetric eigensolver and spectrum queries
stollmann    diagonal monotonicity checks and Stollmann's bound
wegner       Monte Carlo concentration experiments
harness      subcommand orchestration behind the ``qpwegner`` command
"""
__version__ = "0.1.0"

from .torus import (GOLDEN, TorusPoint, ShiftAction, DyadicCubeIndex, LatticeCube,
                    apply_shift, torus_distance, trajectory, min_spacing, separation_level,
                    partition_index, fit_diophantine)
from .randelette import (CoefficientSchedule, ThetaSample, RandeletteField, coefficient,
                         theta_value, evaluate_v, tail_bound, potential, decompose,
                         conditional_density_bound, potential_values, SplicedTheta,
                         OverrideTheta, ConstantTheta)
from .hamiltonian import (TwoParticleCube, InteractionSpec, HamiltonianMatrix,
                          TwoParticleStructure, shadow,
                          exchange, separation_ok, assemble_one_particle,
                          assemble_two_particle)
from .spectral import (Spectrum, eigenvalues_symmetric, dist_to_energy, dist_between_spectra,
                       count_below, ids_estimate)
from .stollmann import (check_dm, concentration_uniform, stollmann_empirical,
                        mean_functional, min_functional)
from .stats import ConcentrationEstimate, wilson_interval, fit_epsilon_slope
from .wegner import (WegnerExperimentConfig, ConfigError, run_classical_wegner,
                     run_iid_two_particle, run_qp_one_volume, run_qp_two_volume)
