"""Shared numerics: physical constants, unit conversion, spin operators and a
deterministic Hermitian eigensolver.

Units & conventions
-------------------
Spin-Hamiltonian energies are carried in MHz (frequency units, i.e. E/h).
Vibronic energies are carried in meV.  Temperatures are in K, magnetic fields
in mT and stresses in GPa.  Spin operators are dimensionless (units of hbar)
and written in the ``|S, m>`` basis ordered by descending ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.constants as sc

# Conversion factors are fixed numbers so that results do not drift with the
# CODATA revision shipped by scipy.
MHZ_PER_MEV = 241_799.0504
MHZ_PER_KELVIN = 20_836.6123
BOHR_MHZ_PER_T = 13_996.245
MEV_PER_KELVIN = MHZ_PER_KELVIN / MHZ_PER_MEV

# SI constants for the absolute-rate formulas.
HBAR = sc.hbar
PLANCK = sc.h
EPS0 = sc.epsilon_0
C_LIGHT = sc.c
E_CHARGE = sc.e
MU0 = sc.mu_0
MU_B = sc.physical_constants["Bohr magneton"][0]
MU_N = sc.physical_constants["nuclear magneton"][0]
J_PER_MEV = sc.e * 1e-3


class NVModelError(Exception):
    """Base class for package errors."""


class InputError(NVModelError, ValueError):
    """Rejected input: bad shape, unknown key, out-of-domain value."""


class ConvergenceError(NVModelError, RuntimeError):
    """A numerical procedure failed to reach its stated tolerance."""


# --------------------------------------------------------------------------
# units

_DIMENSIONS: dict[str, tuple[str, float]] = {
    # energy-like, scale to MHz
    "Hz": ("energy", 1e-6),
    "kHz": ("energy", 1e-3),
    "MHz": ("energy", 1.0),
    "GHz": ("energy", 1e3),
    "meV": ("energy", MHZ_PER_MEV),
    "eV": ("energy", MHZ_PER_MEV * 1e3),
    "K": ("energy", MHZ_PER_KELVIN),
    # magnetic field, scale to mT
    "mT": ("field", 1.0),
    "T": ("field", 1e3),
    "G": ("field", 0.1),
    # stress, scale to GPa
    "GPa": ("stress", 1.0),
    "MPa": ("stress", 1e-3),
}


def convert(value, unit_from: str, unit_to: str):
    """Convert ``value`` between two unit tags of the same dimension.

    Temperature converts to energy through the Boltzmann constant, so
    ``convert(1, "K", "MHz")`` is k_B/h.  Mixing dimensions (for example
    mT to MHz, which needs a g-factor) raises :class:`InputError`.
    """
    try:
        dim_a, scale_a = _DIMENSIONS[unit_from]
        dim_b, scale_b = _DIMENSIONS[unit_to]
    except KeyError as exc:
        raise InputError(f"unknown unit tag {exc.args[0]!r}") from None
    if dim_a != dim_b:
        raise InputError(f"cannot convert {unit_from} ({dim_a}) to {unit_to} ({dim_b})")
    factor = scale_a / scale_b
    if np.ndim(value) == 0:
        return float(value) * factor
    return np.asarray(value, dtype=float) * factor


def known_units() -> list[str]:
    return list(_DIMENSIONS)


# --------------------------------------------------------------------------
# spin operators


def spin_matrices(spin: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(Sx, Sy, Sz)`` for spin quantum number ``spin``.

    The basis is ``|S, m>`` with ``m = S, S-1, ..., -S``.
    """
    two_s = 2.0 * spin
    if spin <= 0 or abs(two_s - round(two_s)) > 1e-12:
        raise InputError(f"spin must be a positive multiple of 1/2, got {spin}")
    m = spin - np.arange(int(round(two_s)) + 1)
    # <m+1|S+|m> = sqrt(S(S+1) - m(m+1)), placed on the superdiagonal
    plus = np.diag(np.sqrt(spin * (spin + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
    sx = 0.5 * (plus + plus.conj().T)
    sy = -0.5j * (plus - plus.conj().T)
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def embed(op: np.ndarray, position: int, dims: list[int]) -> np.ndarray:
    """Kronecker-embed ``op`` acting on factor ``position`` of a product space."""
    out = np.ones((1, 1), dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == position else np.eye(d))
    return out


# --------------------------------------------------------------------------
# eigensolver


@dataclass(frozen=True)
class Eigensystem:
    """Ascending eigenvalues with eigenvectors stored as columns."""

    values: np.ndarray
    vectors: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


def hermiticity_defect(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def diagonalize(h: np.ndarray, tol: float = 1e-9, degeneracy_tol: float | None = None) -> Eigensystem:
    """Diagonalize a Hermitian matrix with reproducible eigenvectors.

    Eigenvalues come back ascending.  Inside a degenerate cluster the basis is
    rebuilt from the cluster projector: the first vector is the projection of
    the standard basis vector with the largest overlap, ties broken by lower
    index, and so on after deflation.  Each vector is then given a phase that
    makes its largest-magnitude component real and positive.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InputError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
    defect = hermiticity_defect(h)
    if defect > tol * scale:
        raise InputError(f"non-Hermitian input: max |H - H^dagger| = {defect:.3e}")
    vals, vecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    if degeneracy_tol is None:
        degeneracy_tol = 1e-9 * scale
    vecs = vecs.astype(complex)
    start = 0
    n = len(vals)
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[stop - 1] <= degeneracy_tol:
            stop += 1
        if stop - start > 1:
            vecs[:, start:stop] = _canonical_subspace_basis(vecs[:, start:stop])
        start = stop
    for k in range(n):
        vecs[:, k] = _fix_phase(vecs[:, k])
    if np.isrealobj(h):
        # real symmetric input keeps real eigenvectors after the phase fix
        if np.max(np.abs(vecs.imag)) < 1e-12:
            vecs = vecs.real.copy()
    return Eigensystem(vals, vecs)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    # first index within rounding of the maximum, so near-ties resolve by index
    k = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-9))[0])
    return v * (abs(v[k]) / v[k])


def _canonical_subspace_basis(block: np.ndarray) -> np.ndarray:
    projector = block @ block.conj().T
    basis = []
    for _ in range(block.shape[1]):
        weights = np.real(np.diag(projector))
        k = int(np.flatnonzero(weights >= weights.max() * (1 - 1e-9))[0])
        v = projector[:, k] / np.sqrt(weights[k])
        basis.append(v)
        projector = projector - np.outer(v, v.conj())
    return np.column_stack(basis)


def boltzmann_weights(energies_mev, temperature_k: float, degeneracy=None) -> np.ndarray:
    """Normalized thermal populations for energies in meV."""
    e = np.asarray(energies_mev, dtype=float)
    g = np.ones_like(e) if degeneracy is None else np.asarray(degeneracy, dtype=float)
    if temperature_k <= 0:
        w = np.where(e - e.min() <= 1e-9, g, 0.0)
    else:
        w = g * np.exp(-(e - e.min()) / (MEV_PER_KELVIN * temperature_k))
    return w / w.sum()
