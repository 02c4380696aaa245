"""Ground-state ODMR: zero field, a small axial field with 14N, and the
level anticrossing near 102 mT."""

import numpy as np

from nvcenter import ground


def show(title, params, fields=None):
    t = ground.odmr_transitions(ground.build_ground_hamiltonian(params, fields))
    f, w, m = ground.merge_lines(t.frequencies, t.weights, 0.01)
    print(title)
    for fi, wi, mi in zip(f, w, m):
        print(f"  {fi:10.4f} MHz  weight {wi:.3f}  x{mi}")


bare = ground.GroundStateParams()
show("Zero field, electron spin only:", bare)

with_n = bare.with_nuclei(ground.NITROGEN_14)
show("5 mT along the NV axis with 14N (three hyperfine lines per branch):", with_n,
     ground.Fields(magnetic=(0.0, 0.0, 5.0)))

# A [111] uniaxial stress in the cubic frame only shifts D.
stress = ground.rotate_to_nv(np.full((3, 3), 1.0 / 3.0))
show("1 GPa uniaxial stress along the NV axis:", bare, ground.Fields(stress=tuple(map(tuple, stress))))

lac = ground.find_level_anticrossing(with_n)
print(f"Ground-state anticrossing at {lac.field_mT:.2f} mT; nuclear rotation rate {lac.rotation_rate_MHz:.3f} MHz")
