"""Huang-Rhys phonon sidebands, Debye-Waller factors and radiative lifetimes.

A :class:`SpectralFunction` is kept as an exact stick spectrum (phonon
energies in meV with Poisson-product weights) plus a Gaussian broadening
width.  Densities are evaluated analytically from the sticks, so moments and
the zero-phonon weight do not depend on a grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm, poisson

from .core import C_LIGHT, E_CHARGE, EPS0, HBAR, InputError

PRUNE_WEIGHT = 1e-15
SINGLET_RADIATIVE_LIFETIME_NS = 1878.0  # reference value for the 1A1 -> 1E transition


@dataclass(frozen=True)
class PhononMode:
    energy: float  # meV
    huang_rhys: float
    symmetry: str = "A1"

    def __post_init__(self):
        if self.energy <= 0:
            raise InputError(f"phonon energy must be positive, got {self.energy}")
        if self.huang_rhys < 0:
            raise InputError(f"Huang-Rhys factor must be non-negative, got {self.huang_rhys}")
        if self.symmetry not in ("A1", "E"):
            raise InputError(f"mode symmetry must be 'A1' or 'E', got {self.symmetry!r}")

    @classmethod
    def from_displacement(cls, energy: float, delta_q: float, symmetry: str = "A1") -> "PhononMode":
        """Mode from a configuration-coordinate shift in units where
        ``S = omega * dQ**2 / (2 hbar)`` reduces to ``dQ**2 / 2`` (dimensionless dQ)."""
        return cls(energy, 0.5 * delta_q**2, symmetry)


def total_huang_rhys(modes) -> float:
    return float(sum(m.huang_rhys for m in modes))


def debye_waller(huang_rhys: float) -> float:
    """Zero-phonon fraction ``exp(-S)``."""
    if huang_rhys < 0:
        raise InputError("Huang-Rhys factor must be non-negative")
    return float(np.exp(-huang_rhys))


def poisson_weights(huang_rhys: float, n_max: int) -> np.ndarray:
    """``exp(-S) S**n / n!`` for ``n = 0..n_max``."""
    return poisson.pmf(np.arange(n_max + 1), huang_rhys)


def _mode_comb(mode: PhononMode) -> tuple[np.ndarray, np.ndarray]:
    s = mode.huang_rhys
    if s == 0:
        return np.zeros(1), np.ones(1)
    n_max = int(poisson.isf(PRUNE_WEIGHT, s)) + 2
    w = poisson_weights(s, n_max)
    return mode.energy * np.arange(n_max + 1), w


def _convolve_sticks(a, b) -> tuple[np.ndarray, np.ndarray]:
    ea, wa = a
    eb, wb = b
    e = (ea[:, None] + eb[None, :]).ravel()
    w = (wa[:, None] * wb[None, :]).ravel()
    keep = w > PRUNE_WEIGHT
    e, w = e[keep], w[keep]
    # merge coincident sticks so that combs on a common lattice stay compact
    order = np.lexsort((w, np.round(e, 9)))
    e, w = e[order], w[order]
    key = np.round(e, 9)
    uniq, idx = np.unique(key, return_index=True)
    return uniq, np.add.reduceat(w, idx)


@dataclass(frozen=True)
class SpectralFunction:
    """Normalized phonon-overlap density F(eps) in 1/meV.

    ``sticks``/``weights`` hold the unbroadened spectrum (weights sum to one),
    ``sigma`` the Gaussian width.  ``energy``/``density`` is a sampled copy on
    the requested grid.
    """

    sticks: np.ndarray
    weights: np.ndarray
    sigma: float
    energy: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)

    def __call__(self, eps) -> np.ndarray:
        x = np.atleast_1d(np.asarray(eps, dtype=float))
        vals = (self.weights[None, :] * norm.pdf(x[:, None], self.sticks[None, :], self.sigma)).sum(axis=1)
        return vals if np.ndim(eps) else float(vals[0])

    @property
    def zero_phonon_weight(self) -> float:
        return float(self.weights[np.abs(self.sticks) < 1e-9].sum())

    def mean(self) -> float:
        return float(self.weights @ self.sticks)

    def grid_mass(self) -> float:
        return float(np.trapezoid(self.density, self.energy))


def stick_spectrum(modes) -> tuple[np.ndarray, np.ndarray]:
    sticks = (np.zeros(1), np.ones(1))
    for m in modes:
        sticks = _convolve_sticks(sticks, _mode_comb(m))
    e, w = sticks
    return e, w / w.sum()


def spectral_function(modes, sigma: float = 5.0, step: float | None = None, e_min: float | None = None,
                      e_max: float | None = None) -> SpectralFunction:
    """T = 0 Poisson-product phonon sideband broadened by a Gaussian.

    The default grid runs from ``-6 sigma`` to ``6 sigma`` past the later of
    the last retained stick and six quanta beyond the mean.  An explicit grid that captures less than 0.999 of the mass is
    rejected.
    """
    if sigma <= 0:
        raise InputError("broadening sigma must be positive")
    modes = list(modes)
    e, w = stick_spectrum(modes)
    top_quantum = max((m.energy for m in modes), default=0.0)
    mean = float(w @ e)
    lo = -6 * sigma if e_min is None else e_min
    # at least six quanta past the mean, and never short of the last retained stick
    hi = max(mean + 6 * top_quantum, float(e.max())) + 6 * sigma if e_max is None else e_max
    step = sigma / 10 if step is None else step
    if hi <= lo or step <= 0:
        raise InputError("invalid energy grid")
    grid = np.arange(lo, hi + 0.5 * step, step)
    sf = SpectralFunction(e, w, sigma, grid, np.zeros_like(grid))
    dens = sf(grid)
    mass = float(np.trapezoid(dens, grid))
    if mass < 0.999:
        raise InputError(f"grid captures only {mass:.4f} of the spectral mass; widen the energy window")
    return SpectralFunction(e, w, sigma, grid, dens / mass)


@dataclass(frozen=True)
class Spectrum:
    photon_energy: np.ndarray  # eV
    intensity: np.ndarray  # 1/eV, unit area
    zpl_weight: float  # fraction of the area in the zero-phonon line


def _line_weights(sf: SpectralFunction, photon_ev: np.ndarray, omega3: bool, zpl_ev: float) -> np.ndarray:
    w = sf.weights.copy()
    if omega3:
        w = w * (photon_ev / zpl_ev) ** 3
    return w / w.sum()


def emission_spectrum(zpl_ev: float, sf: SpectralFunction, include_omega3: bool = False) -> Spectrum:
    """``L(E) = F(ZPL - E)``; phonon sidebands fall below the ZPL."""
    if zpl_ev <= 0:
        raise InputError("ZPL energy must be positive")
    line_ev = zpl_ev - sf.sticks * 1e-3
    if np.any(line_ev <= 0):
        raise InputError("sideband extends below zero photon energy")
    w = _line_weights(sf, line_ev, include_omega3, zpl_ev)
    grid = zpl_ev - sf.energy[::-1] * 1e-3
    dens = (w[None, :] * norm.pdf(grid[:, None], line_ev[None, :], sf.sigma * 1e-3)).sum(axis=1)
    zpl = float(w[np.abs(sf.sticks) < 1e-9].sum())
    return Spectrum(grid, dens / np.trapezoid(dens, grid), zpl)


def mirror_absorption(zpl_ev: float, sf: SpectralFunction) -> Spectrum:
    """Absorption as the reflection of ``F`` about the ZPL."""
    line_ev = zpl_ev + sf.sticks * 1e-3
    grid = zpl_ev + sf.energy * 1e-3
    dens = (sf.weights[None, :] * norm.pdf(grid[:, None], line_ev[None, :], sf.sigma * 1e-3)).sum(axis=1)
    return Spectrum(grid, dens / np.trapezoid(dens, grid), sf.zero_phonon_weight)


def absorption_spectrum(zpl_ev: float, modes, policy: str = "asymmetric", sigma: float = 5.0) -> Spectrum:
    """Absorption sideband under one of two policies.

    ``"asymmetric"`` builds the sideband from the A1-tagged modes only (the
    E-mode distortion is averaged out by fast tunnelling in the upper
    state); ``"mirror"`` reflects the full emission function.
    """
    modes = list(modes)
    if policy == "asymmetric":
        used = [m for m in modes if m.symmetry == "A1"]
    elif policy == "mirror":
        used = modes
    else:
        raise InputError(f"unknown absorption policy {policy!r}; use 'asymmetric' or 'mirror'")
    return mirror_absorption(zpl_ev, spectral_function(used, sigma))


def sideband_mass_difference(modes) -> float:
    """Sideband weight removed when absorption drops the E-tagged modes."""
    modes = list(modes)
    full = 1.0 - debye_waller(total_huang_rhys(modes))
    a1 = 1.0 - debye_waller(total_huang_rhys(m for m in modes if m.symmetry == "A1"))
    return full - a1


def split_huang_rhys(total: float, e_fraction: float, a1_energy: float = 65.0, e_energy: float = 77.6) -> list[PhononMode]:
    """Two effective modes whose E-mode carries ``e_fraction`` of the total S."""
    if not 0 <= e_fraction <= 1:
        raise InputError("e_fraction must lie in [0, 1]")
    modes = [PhononMode(a1_energy, total * (1 - e_fraction), "A1")]
    if e_fraction > 0:
        modes.append(PhononMode(e_energy, total * e_fraction, "E"))
    return modes


# --------------------------------------------------------------------------
# spontaneous emission


def _rate_per_s(n_r: float, photon_ev: float, dipole_e_nm: float) -> float:
    omega = photon_ev * E_CHARGE / HBAR
    mu = E_CHARGE * dipole_e_nm * 1e-9
    return n_r * omega**3 * mu**2 / (3 * np.pi * EPS0 * HBAR * C_LIGHT**3)


def radiative_lifetime(n_r: float, photon_ev: float, dipole_e_nm: float) -> float:
    """Spontaneous-emission lifetime in ns for a dipole given in e*nm."""
    if n_r <= 0 or photon_ev <= 0 or dipole_e_nm <= 0:
        raise InputError("refractive index, photon energy and dipole must be positive")
    return 1e9 / _rate_per_s(n_r, photon_ev, dipole_e_nm)


def dipole_from_lifetime(n_r: float, photon_ev: float, lifetime_ns: float) -> float:
    """Inverse of :func:`radiative_lifetime`: the dipole (e*nm) giving ``lifetime_ns``."""
    if lifetime_ns <= 0:
        raise InputError("lifetime must be positive")
    unit_rate = _rate_per_s(n_r, photon_ev, 1.0)
    guess = np.sqrt(1e9 / lifetime_ns / unit_rate)
    # polish the closed-form guess against the forward model
    return float(brentq(lambda mu: radiative_lifetime(n_r, photon_ev, mu) - lifetime_ns, 0.5 * guess, 2.0 * guess,
                        xtol=1e-16, rtol=1e-15))
