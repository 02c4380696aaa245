"""Defect formation energies, charge-transition levels and the
charge-neutral Fermi level.

Energies in eV, densities in cm^-3, temperatures in K.  ``DefectSpecies``
total energies are host-referenced: ``E_tot^q`` is the energy of the
defective crystal minus that of the perfect crystal, and ``stoichiometry``
counts atoms added (positive) or removed (negative) relative to the host.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.constants as sc
from scipy.optimize import brentq

from .core import ConvergenceError, InputError

KB_EV = sc.k / sc.e  # eV/K
DIAMOND_GAP_EV = 5.4
DIAMOND_SITE_DENSITY = 1.76e23  # carbon atoms per cm^3


@dataclass(frozen=True)
class DefectSpecies:
    name: str
    energies: dict[int, float]  # q -> E_tot^q (eV, host-referenced)
    stoichiometry: dict[str, int] = field(default_factory=dict)
    corrections: dict[int, float] = field(default_factory=dict)
    site_density: float = DIAMOND_SITE_DENSITY
    degeneracy: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.energies:
            raise InputError(f"species {self.name!r} needs at least one charge state")
        if self.corrections.get(0, 0.0) != 0.0:
            raise InputError(f"species {self.name!r}: the neutral charge correction must be zero")
        if self.site_density <= 0:
            raise InputError("site density must be positive")

    @property
    def charges(self) -> list[int]:
        return sorted(self.energies)

    def total(self, q: int) -> float:
        """``E_tot^q + E_corr^q``."""
        if q not in self.energies:
            raise InputError(f"species {self.name!r} has no charge state {q:+d}")
        return self.energies[q] + self.corrections.get(q, 0.0)


@dataclass(frozen=True)
class HostModel:
    gap: float = DIAMOND_GAP_EV
    vbm: float = 0.0  # E_V, the reference for E_F
    chemical_potentials: dict[str, float] = field(default_factory=lambda: {"C": 0.0, "N": 0.0})
    donors: float = 0.0  # fully ionized shallow donors, cm^-3
    acceptors: float = 0.0
    nc: float = 0.0  # effective conduction-band density of states, cm^-3 (0 disables free electrons)
    nv: float = 0.0

    def __post_init__(self):
        if self.gap <= 0:
            raise InputError("band gap must be positive")


def formation_energy(d: DefectSpecies, host: HostModel, q: int, e_fermi: float) -> float:
    """``E_tot^q - sum_i n_i mu_i + q (E_F + E_V) + E_corr^q``."""
    if not 0 <= e_fermi <= host.gap:
        raise InputError(f"Fermi level {e_fermi} eV outside [0, {host.gap}]")
    mu = 0.0
    for elem, n in d.stoichiometry.items():
        if elem not in host.chemical_potentials:
            raise InputError(f"no chemical potential for element {elem!r}")
        mu += n * host.chemical_potentials[elem]
    return d.total(q) - mu + q * (e_fermi + host.vbm)


def lowest_charge_state(d: DefectSpecies, host: HostModel, e_fermi: float) -> tuple[int, float]:
    vals = [(formation_energy(d, host, q, e_fermi), q) for q in d.charges]
    e, q = min(vals)
    return q, e


@dataclass(frozen=True)
class TransitionLevel:
    q: int
    value: float  # eV above E_V
    inside_gap: bool


def transition_level(d: DefectSpecies, q: int, host: HostModel | None = None) -> TransitionLevel:
    """Fermi level at which charge states ``q`` and ``q + 1`` have equal formation energy.

    ``E(q|q+1) = (E_tot^q + E_corr^q) - (E_tot^{q+1} + E_corr^{q+1}) - E_V``.
    A level outside the gap is still returned, flagged by ``inside_gap``.
    """
    host = HostModel() if host is None else host
    level = d.total(q) - d.total(q + 1) - host.vbm
    return TransitionLevel(q, level, 0.0 <= level <= host.gap)


def concentration(e_form: float, site_density: float, temperature_k: float, degeneracy: float = 1.0) -> float:
    """``g N0 exp(-E_form / k_B T)``."""
    if temperature_k <= 0:
        raise InputError("temperature must be positive")
    return degeneracy * site_density * float(np.exp(-e_form / (KB_EV * temperature_k)))


def charge_state_densities(species, host: HostModel, e_fermi: float, temperature_k: float) -> dict[str, dict[int, float]]:
    out = {}
    for d in species:
        out[d.name] = {q: concentration(formation_energy(d, host, q, e_fermi), d.site_density, temperature_k,
                                        d.degeneracy.get(q, 1.0)) for q in d.charges}
    return out


def _carriers(host: HostModel, e_fermi: float, temperature_k: float) -> tuple[float, float]:
    kt = KB_EV * temperature_k
    n = host.nc * np.exp(-(host.gap - e_fermi) / kt) if host.nc else 0.0
    p = host.nv * np.exp(-e_fermi / kt) if host.nv else 0.0
    return float(n), float(p)


def net_charge(species, host: HostModel, e_fermi: float, temperature_k: float) -> float:
    """Net positive charge density (cm^-3) at a given Fermi level."""
    dens = charge_state_densities(species, host, e_fermi, temperature_k)
    n, p = _carriers(host, e_fermi, temperature_k)
    total = sum(q * v for per in dens.values() for q, v in per.items())
    return total + p - n + host.donors - host.acceptors


@dataclass(frozen=True)
class FermiSolution:
    e_fermi: float
    densities: dict[str, dict[int, float]]
    electrons: float
    holes: float
    residual: float  # |net charge| / total charged density


def solve_fermi_level(species, host: HostModel, temperature_k: float) -> FermiSolution:
    """Charge-neutral Fermi level by bracketing on ``[0, gap]``."""
    species = list(species)
    if not species:
        raise InputError("species list is empty")
    if temperature_k <= 0:
        raise InputError("temperature must be positive")

    def scale(ef):
        dens = charge_state_densities(species, host, ef, temperature_k)
        n, p = _carriers(host, ef, temperature_k)
        return sum(abs(q) * v for per in dens.values() for q, v in per.items()) + n + p + host.donors + host.acceptors

    lo, hi = net_charge(species, host, 0.0, temperature_k), net_charge(species, host, host.gap, temperature_k)
    if lo == 0 and hi == 0:
        ef = 0.5 * host.gap
    elif lo * hi > 0:
        raise ConvergenceError(f"net charge does not change sign on [0, {host.gap}] eV "
                               f"(charge at E_V: {lo:.3e}, at E_C: {hi:.3e} cm^-3)")
    else:
        # the net charge spans many decades; solve on sign-preserving log scale
        def f(ef):
            c = net_charge(species, host, ef, temperature_k)
            return c / max(scale(ef), 1e-300)

        ef = brentq(f, 0.0, host.gap, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    dens = charge_state_densities(species, host, ef, temperature_k)
    n, p = _carriers(host, ef, temperature_k)
    res = abs(net_charge(species, host, ef, temperature_k)) / max(scale(ef), 1e-300)
    return FermiSolution(float(ef), dens, n, p, float(res))


Reactant = tuple[DefectSpecies, int]


def reaction_energy(products, reactants, host: HostModel, e_fermi: float) -> float:
    """``sum E_form(products) - sum E_form(reactants)`` at one Fermi level.

    Each entry is ``(species, q)``; ``q = None`` picks the lowest-energy
    charge state at ``e_fermi``.  Atom counts must balance.
    """
    def side(entries):
        atoms = Counter()
        energy = 0.0
        for d, q in entries:
            if q is None:
                q, e = lowest_charge_state(d, host, e_fermi)
            else:
                e = formation_energy(d, host, q, e_fermi)
            energy += e
            atoms.update(d.stoichiometry)
        return energy, {k: v for k, v in atoms.items() if v}

    e_p, atoms_p = side(products)
    e_r, atoms_r = side(reactants)
    if atoms_p != atoms_r:
        raise InputError(f"unbalanced reaction: products {atoms_p} vs reactants {atoms_r}")
    return e_p - e_r


def formation_energy_diagram(species, host: HostModel, points: int = 109) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Lowest formation energy of each species on a Fermi-level grid."""
    ef = np.linspace(0.0, host.gap, points)
    return ef, {d.name: np.array([lowest_charge_state(d, host, x)[1] for x in ef]) for d in species}


# Reference species with host-referenced energies chosen so that, with zero
# reservoir chemical potentials and E_F = 2 eV, the divacancy and NV
# formation reactions release 4.2 eV and 3.3 eV.
VACANCY = DefectSpecies("V", {0: 7.0, 1: 5.9, -1: 9.5}, {"C": -1})
DIVACANCY = DefectSpecies("V2", {0: 9.8}, {"C": -2})
SUBSTITUTIONAL_N = DefectSpecies("Ns", {0: 4.0, 1: 0.3}, {"N": 1, "C": -1})
NV_CENTER = DefectSpecies("NV", {0: 6.0, 1: 4.9, -1: 8.7}, {"N": 1, "C": -2})
REFERENCE_SPECIES = (VACANCY, DIVACANCY, SUBSTITUTIONAL_N, NV_CENTER)
REFERENCE_FERMI_LEVEL = 2.0
