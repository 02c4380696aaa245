"""Formation energies, transition levels and the self-consistent Fermi
level for the synthetic vacancy / nitrogen reference set."""

from nvcenter import thermo

host = thermo.HostModel()
for d in thermo.REFERENCE_SPECIES:
    levels = [thermo.transition_level(d, q, host) for q in d.charges if q + 1 in d.energies]
    text = ", ".join(f"({lv.q:+d}|{lv.q + 1:+d}) {lv.value:.2f} eV" for lv in levels) or "none"
    print(f"{d.name:3s} transition levels: {text}")

ef = thermo.REFERENCE_FERMI_LEVEL
v, v2, ns, nv = thermo.VACANCY, thermo.DIVACANCY, thermo.SUBSTITUTIONAL_N, thermo.NV_CENTER
print(f"V + V -> V2 at E_F = {ef} eV: {thermo.reaction_energy([(v2, None)], [(v, None), (v, None)], host, ef):+.2f} eV")
print(f"Ns + V -> NV at E_F = {ef} eV: {thermo.reaction_energy([(nv, None)], [(ns, None), (v, None)], host, ef):+.2f} eV")

sol = thermo.solve_fermi_level(thermo.REFERENCE_SPECIES, host, 1500.0)
print(f"Charge-neutral Fermi level at 1500 K: {sol.e_fermi:.3f} eV (residual {sol.residual:.1e})")
