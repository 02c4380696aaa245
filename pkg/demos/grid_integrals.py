"""Spin-spin and hyperfine tensors from densities on a real-space grid,
checked against point-dipole limits."""

import numpy as np

from nvcenter import density as dn

grid = dn.cubic_grid(1.6, 48, (0.0, 0.0, 1.0))
a = dn.gaussian_orbital(grid, (0.0, 0.0, 0.0), 0.1)
b = dn.gaussian_orbital(grid, (0.0, 0.0, 2.0), 0.1)
res = dn.zfs_tensor([dn.OrbitalPair(a, b)])
print(f"Two lobes 2 A apart: D_zz = {res.tensor[2, 2]:.2f} MHz, "
      f"point dipole {dn.point_dipole_zfs((0, 0, 2.0))[2, 2]:.2f} MHz")

box = dn.ScalarGrid3D((-1.5, -1.5, -0.5), 0.08, np.zeros((38, 38, 90)))
rho = dn.gaussian_density(box, [[0.0, 0.0, 5.0]], [0.15], [1.0])
hf = dn.hyperfine_tensor(rho, (0.0, 0.0, 0.0), dn.NUCLEAR_G["13C"])
print(f"13C 5 A from a compact spin: A_par = {hf.a_parallel:.4f} MHz, A_perp = {hf.a_perp:.4f} MHz")
print(f"14N quadrupole for Vzz = -138.38 V/A^2: C_Q = {dn.quadrupole_coupling(-138.3794411, 0.02):.3f} MHz")
