"""
Wegner estimates by Monte Carlo
===============================

Probability that a finite-volume spectrum comes within eps of an energy (one
volume) or of another spectrum (two volumes), for IID and quasi-periodic
potentials.  The same samples serve every eps, so estimates are exactly
monotone in eps.
"""

# %%
from qpwegner import (WegnerExperimentConfig, run_classical_wegner, run_iid_two_particle,
                      run_qp_one_volume, run_qp_two_volume)


def show(res):
    for e, b in zip(res.estimates, res.bounds):
        print(f"  eps {e.epsilon:.2e}  p_hat {e.p_hat:.5f}  "
              f"[{e.ci_low:.5f}, {e.ci_high:.5f}]  bound {b:.4g}")
    print("  passed:", res.passed)


# %%
# One particle, IID uniform potential, bound |Lambda| eps.  At E = 0.5 the
# energy sits inside the bulk of the spectrum.
print("classical, E = 0.5")
show(run_classical_wegner(WegnerExperimentConfig(mode="classical-1p", E=0.5,
                                                 omega_samples=50_000)))

# %%
print("\ntwo particles, IID, one volume")
show(run_iid_two_particle(WegnerExperimentConfig(mode="iid-2p-one-volume",
                                                 omega_samples=50_000)))

# %%
# Quasi-periodic potential at a fixed parameter point; the bound carries an
# unknown constant, so the check is the eps-exponent of the fitted power law.
res = run_qp_one_volume(WegnerExperimentConfig(mode="qp-one-volume"))
print(f"\nquasi-periodic, one volume: slope {res.details['slope']:.3f}, n0 {res.details['n0']}, "
      f"density bound {res.details['conditional_density_bound']:.1f}")

res = run_qp_two_volume(WegnerExperimentConfig(mode="qp-two-volume"))
print(f"quasi-periodic, two volumes: slope {res.details['slope']:.3f}, N {res.details['N']}")

# %%
# Drop the separation condition and put the second box on the exchange image
# of the first: the spectra coincide and the event is certain.
forced = run_qp_two_volume(WegnerExperimentConfig(mode="qp-two-volume", center=(0, 20),
                                                  center2=(20, 0), omega_samples=500),
                           check=False)
print("exchange image: p_hat =", [e.p_hat for e in forced.estimates])
