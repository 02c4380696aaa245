"""Vibronic levels of the triplet excited state (dynamic Jahn-Teller) and
of the singlet pair (pseudo Jahn-Teller), with the derived quenching factor."""

from nvcenter import vibronic

sol = vibronic.solve_djt(vibronic.TRIPLET_DJT, n_max=14)
print(f"Triplet E x e: F = {vibronic.TRIPLET_DJT.f:.2f} meV, G = {vibronic.TRIPLET_DJT.g:.3f} meV")
for e, label, deg in sol.levels()[:6]:
    print(f"  {e:7.2f} meV  {label:2s} x{deg}")
red = vibronic.ham_reduction_factor(sol)
print(f"Ham factor p = {red.p:.4f}; quenched spin-orbit = {red.p * 15780:.0f} MHz")

params = vibronic.reference_singlet_params()
singlet = vibronic.solve_singlet(params)
print(f"\nSinglet pair: PJT coupling calibrated to {params.pjt:.2f} meV")
for e, label, deg in singlet.levels()[:6]:
    print(f"  {e:7.2f} meV  {label:2s} x{deg}")
lines = vibronic.singlet_emission(params)
print(f"Emission sideband maximum at {vibronic.sideband_peak(lines):.2f} meV below the zero-phonon line")
