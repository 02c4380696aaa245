"""Temperature dependence of the singlet shelf lifetime and the optical
phonon sideband of the triplet."""

import numpy as np

from nvcenter import lineshape, rates

model = rates.reference_shelf_model()
print(f"Lower-branch spin-orbit strength calibrated to {model.inputs.lambda_z_mhz:.0f} MHz")
for t in (0, 100, 200, 300):
    s = model.at(t)
    print(f"  {t:3d} K: tau = {s.lifetime_ns:6.1f} ns, ms=0 share {s.selectivity:.3f}")

up = rates.upper_branch_rates(rates.quoted_triplet_coefficients())
print(f"Upper branch: A1 {up.a1:.3e} MHz, E1,2 {up.e12:.3e} MHz, A2/A1 = {up.a2 / up.a1:.1e}")

modes = lineshape.split_huang_rhys(3.5, 0.1)
sf = lineshape.spectral_function(modes)
em = lineshape.emission_spectrum(1.945, sf)
peak = em.photon_energy[np.argmax(em.intensity)]
print(f"\nPL: zero-phonon fraction {em.zpl_weight:.4f}, sideband maximum at {peak:.3f} eV")
mu = lineshape.dipole_from_lifetime(2.4, 1.945, 12.0)
print(f"Transition dipole for a 12 ns radiative lifetime: {mu * 10:.3f} e*A")
