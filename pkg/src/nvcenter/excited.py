"""Excited-state triplet fine structure in the six-state spin-orbit basis.

Basis order is ``(A1, A2, Ex, Ey, E1, E2)``: A1/A2 and E1/E2 are the
spin-orbit combinations of the ms = +-1 states, Ex/Ey carry ms = 0.
Energies are in MHz.  Strain enters as a symmetric 3x3 tensor already scaled
to energy (MHz), so that ``(e_xx - e_yy)/2`` is directly the orbital
deformation energy; electric fields are in MV/m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MHZ_PER_KELVIN, InputError, diagonalize

BASIS = ("A1", "A2", "Ex", "Ey", "E1", "E2")
BARE_SPIN_ORBIT_MHZ = 15_780.0


@dataclass(frozen=True)
class ExcitedStateParams:
    spin_orbit: float = 5330.0  # lambda_z
    zfs_axial: float = 1420.0  # D_es
    zfs_a1a2: float = 3100.0  # splitting of A1 and A2
    zfs_mixing: float = 200.0  # couples E1,E2 with Ex,Ey
    dipole_parallel: float = 6600.0  # MHz per MV/m
    dipole_perp: float = 600.0  # MHz per MV/m
    strain_xz_ratio: float = 1.0  # weight of the eps_xz/eps_yz pair relative to the in-plane pair


EXPERIMENTAL = ExcitedStateParams()
# First-principles spin-spin values with the Ham-reduced spin-orbit splitting.
FIRST_PRINCIPLES = ExcitedStateParams(spin_orbit=0.304 * BARE_SPIN_ORBIT_MHZ, zfs_axial=1610.0, zfs_a1a2=1950.0, zfs_mixing=150.0)


def effective_spin_orbit(ham_factor: float, bare: float = BARE_SPIN_ORBIT_MHZ) -> float:
    """Spin-orbit splitting after vibronic quenching: ``p * lambda``."""
    return ham_factor * bare


def reduction_factor(splitting_mhz: float, temperature_k: float) -> float:
    """Thermal reduction of the rhombic spin-spin term.

    ``(1 - exp(-x)) / (1 + exp(-x))`` with ``x = h eps_perp / k T``, i.e.
    ``tanh(x/2)``.  Zero splitting gives zero; zero temperature with a
    finite splitting gives one.
    """
    if splitting_mhz < 0 or temperature_k < 0:
        raise InputError("splitting and temperature must be non-negative")
    if splitting_mhz == 0:
        return 0.0
    if temperature_k == 0:
        return 1.0
    return float(np.tanh(0.5 * splitting_mhz / (MHZ_PER_KELVIN * temperature_k)))


def _orbital_pattern(d1: float, d2: float) -> np.ndarray:
    """E-symmetry perturbation with an x-like component d1 and a y-like d2."""
    m = np.zeros((6, 6), dtype=complex)
    # A1/A2 <-> E1/E2
    m[0, 4], m[0, 5] = d1, -1j * d2
    m[1, 4], m[1, 5] = -1j * d2, d1
    # Ex/Ey block
    m[2, 2], m[3, 3] = d1, -d1
    m[2, 3] = m[3, 2] = d2
    m[4:, :2] = m[:2, 4:].conj().T
    return m


def strain_components(strain_mhz, xz_ratio: float = 1.0) -> tuple[float, float]:
    """The x-like and y-like orbital deformation energies of a strain tensor."""
    e = np.asarray(strain_mhz, dtype=float)
    if e.shape != (3, 3):
        raise InputError(f"strain must be 3x3, got shape {e.shape}")
    if np.max(np.abs(e - e.T)) > 1e-9 * max(1.0, np.max(np.abs(e))):
        raise InputError("strain must be symmetric")
    d1 = 0.5 * (e[0, 0] - e[1, 1]) + xz_ratio * 0.5 * (e[0, 2] + e[2, 0])
    d2 = 0.5 * (e[0, 1] + e[1, 0]) + xz_ratio * 0.5 * (e[1, 2] + e[2, 1])
    return float(d1), float(d2)


def build_excited_hamiltonian(
    params: ExcitedStateParams = EXPERIMENTAL,
    strain_mhz=None,
    electric_mv_per_m=None,
    temperature_k: float = 0.0,
    perpendicular_splitting_mhz: float | None = None,
) -> np.ndarray:
    """6x6 excited-state Hamiltonian (MHz).

    At ``temperature_k > 0`` the A1/A2 splitting is scaled by
    :func:`reduction_factor`, using the orbital splitting produced by the
    applied strain and field unless ``perpendicular_splitting_mhz`` is given.
    ``temperature_k = 0`` means no thermal averaging.
    """
    d1 = d2 = 0.0
    shift = 0.0
    if strain_mhz is not None:
        s1, s2 = strain_components(strain_mhz, params.strain_xz_ratio)
        d1, d2 = d1 + s1, d2 + s2
    if electric_mv_per_m is not None:
        ef = np.asarray(electric_mv_per_m, dtype=float)
        if ef.shape != (3,):
            raise InputError("electric field must be a 3-vector")
        d1 += params.dipole_perp * ef[0]
        d2 += params.dipole_perp * ef[1]
        shift = params.dipole_parallel * ef[2]
    if temperature_k > 0:
        split = 2.0 * np.hypot(d1, d2) if perpendicular_splitting_mhz is None else perpendicular_splitting_mhz
        rhombic = params.zfs_a1a2 * reduction_factor(split, temperature_k)
    else:
        rhombic = params.zfs_a1a2
    lam, dz = params.spin_orbit, params.zfs_axial
    h = np.diag(
        [lam + dz / 3 - rhombic / 2, lam + dz / 3 + rhombic / 2, -2 * dz / 3, -2 * dz / 3, -lam + dz / 3, -lam + dz / 3]
    ).astype(complex)
    h[4, 2] = h[2, 4] = params.zfs_mixing
    h[5, 3] = h[3, 5] = params.zfs_mixing
    h += _orbital_pattern(d1, d2)
    h += shift * np.eye(6)
    return h


@dataclass(frozen=True)
class PLELines:
    energies: np.ndarray  # MHz relative to the centroid
    intensities: np.ndarray
    vectors: np.ndarray


def ple_lines(h6: np.ndarray, weights=None) -> PLELines:
    """Eigenvalues relative to the centroid with optical weights.

    ``weights`` gives the brightness of each basis state (default: all one),
    and each line's intensity is the weighted basis content of its eigenvector.
    """
    eig = diagonalize(h6)
    w = np.ones(6) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (6,):
        raise InputError("weights must have one entry per basis state")
    inten = (np.abs(eig.vectors) ** 2 * w[:, None]).sum(axis=0)
    return PLELines(eig.values - eig.values.mean(), inten, eig.vectors)


def spin_orbit_gap(h6: np.ndarray) -> float:
    """Half the spacing between the A1/A2 and E1/E2 pair centroids (MHz)."""
    eig = diagonalize(h6)
    weights = np.abs(eig.vectors) ** 2
    # assign each eigenvector to the pair it overlaps most
    top = (weights[:2].sum(axis=0) * eig.values).sum() / weights[:2].sum()
    bottom = (weights[4:].sum(axis=0) * eig.values).sum() / weights[4:].sum()
    return 0.5 * float(top - bottom)
