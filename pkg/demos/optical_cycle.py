"""Optical spin polarization and readout with the seven-level rate model."""

import numpy as np

from nvcenter import pumploop as pl

scheme = pl.LevelScheme.from_shelf(pl.SHELF_LIFETIME_300K_NS, pl.LOWER_SELECTIVITY_300K)
m = pl.build_rate_matrix(scheme)
p0 = np.zeros(8)
p0[:3] = 1 / 3
t = np.array([0.0, 100.0, 500.0, 2000.0, 10000.0])
pops = pl.transient(m, p0, t)
print("Polarization build-up from a thermal start (g0 share of the ground triplet):")
for ti, p in zip(t, pops):
    print(f"  {ti:7.0f} ns: {p[0] / p[:3].sum():.3f}")

res = pl.odmr_contrast(scheme)
print(f"Pulsed ODMR contrast (300 ns window): {res.contrast:.3f}")
print(f"CW contrast with 10 MHz mixing: {pl.cw_contrast(scheme, 10.0):.3f}")

ionizing = pl.LevelScheme(**{**scheme.__dict__, "ionization": 0.05, "recapture": 0.5})
pd = pl.pdmr_observables(ionizing, 10.0)
print(f"Photocurrent contrast {pd.contrast:.3f}; Auger share {pd.auger_fraction:.4f}")
