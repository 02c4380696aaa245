"""Named parameter trees for the command-line runner.

Each preset is the complete parameter document of one command.  The tree
doubles as the schema: a configuration may only contain keys that appear in
the preset (maps listed in ``OPEN_MAPS`` accept arbitrary keys with numeric
values).
"""

from __future__ import annotations

import copy

from .core import InputError
from .excited import EXPERIMENTAL
from .ground import NITROGEN_14, STRAIN_COUPLINGS, STRESS_COUPLINGS
from .pumploop import (
    AUGER_TIME_PS,
    DIRECT_IONIZATION_TIME_US,
    LOWER_SELECTIVITY_300K,
    RADIATIVE_RATE_MHZ,
    SHELF_LIFETIME_300K_NS,
    SINGLET_DECAY_MHZ,
    UPPER_ISC_PM_MHZ,
)
from .rates import (
    ISC_ACCEPTING_HW,
    ISC_ACCEPTING_S,
    ISC_GAP_MEV,
    ISC_SIGMA,
    LAMBDA_PERP_AB_INITIO_MHZ,
    LAMBDA_RATIO,
    SHELF_LIFETIME_0K_NS,
    SINGLET_MIXING_C2,
)
from .thermo import DIAMOND_GAP_EV, REFERENCE_FERMI_LEVEL, REFERENCE_SPECIES
from .vibronic import SINGLET_DOUBLET_WEIGHT, SINGLET_GAP, SINGLET_HW, TRIPLET_BARRIER, TRIPLET_E_JT, TRIPLET_HW

OPEN_MAPS = frozenset({"energies", "stoichiometry", "corrections", "degeneracy", "chemical_potentials"})

_ZERO3 = [[0.0] * 3 for _ in range(3)]

_GROUND = {
    "zfs_mhz": 2870.0,
    "g_tensor": [[2.0029, 0.0, 0.0], [0.0, 2.0029, 0.0], [0.0, 0.0, 2.0031]],
    "nitrogen": {
        "include": False,
        "isotope": "14N",
        "a_parallel_mhz": NITROGEN_14.a_parallel,
        "a_perp_mhz": NITROGEN_14.a_perp,
        "quadrupole_mhz": NITROGEN_14.quadrupole,
        "gamma_mhz_per_t": NITROGEN_14.gamma,
    },
    "electric_couplings": {"d_parallel": 0.35, "d_perp": 17.0, "d_perp_prime": 17.0},
    "strain_couplings": dict(STRAIN_COUPLINGS),
    "stress_couplings": dict(STRESS_COUPLINGS),
    "fields": {
        "magnetic_mt": [0.0, 0.0, 0.0],
        "electric_v_per_cm": [0.0, 0.0, 0.0],
        "strain": copy.deepcopy(_ZERO3),
        "stress_gpa": copy.deepcopy(_ZERO3),
        "stress_frame": "nv",
    },
    "sweep": {"axis": [0.0, 0.0, 1.0], "magnetic_mt": []},
    "merge_tol_mhz": 0.01,
    "relative_threshold": 1e-3,
}

_EXCITED = {
    "spin_orbit_mhz": EXPERIMENTAL.spin_orbit,
    "zfs_axial_mhz": EXPERIMENTAL.zfs_axial,
    "zfs_a1a2_mhz": EXPERIMENTAL.zfs_a1a2,
    "zfs_mixing_mhz": EXPERIMENTAL.zfs_mixing,
    "dipole_parallel": EXPERIMENTAL.dipole_parallel,
    "dipole_perp": EXPERIMENTAL.dipole_perp,
    "strain_xz_ratio": EXPERIMENTAL.strain_xz_ratio,
    "strain_mhz": copy.deepcopy(_ZERO3),
    "electric_mv_per_m": [0.0, 0.0, 0.0],
    "temperature_k": 0.0,
    "optical_weights": [1.0] * 6,
}

_DJT = {
    "model": "djt",
    "e_jt_mev": TRIPLET_E_JT,
    "barrier_mev": TRIPLET_BARRIER,
    "hw_mev": TRIPLET_HW,
    "n_max": 14,
    "n_states": 40,
    "bare_spin_orbit_mhz": 15780.0,
}

_SINGLET = {
    "model": "singlet",
    "hw_mev": SINGLET_HW,
    "gap_mev": SINGLET_GAP,
    "triplet_e_jt_mev": TRIPLET_E_JT,
    "doublet_weight": SINGLET_DOUBLET_WEIGHT,
    "pjt_mev": 0.0,  # 0 requests calibration to target_a1_mev
    "target_a1_mev": 14.0,
    "n_max": 24,
    "n_states": 60,
    "sideband_sigma_mev": 5.0,
}

_PL = {
    "zpl_ev": 1.945,
    "modes": [
        {"energy_mev": 65.0, "huang_rhys": 3.15, "symmetry": "A1"},
        {"energy_mev": 77.6, "huang_rhys": 0.35, "symmetry": "E"},
    ],
    "sigma_mev": 5.0,
    "include_omega3": False,
    "absorption_policy": "asymmetric",
    "refractive_index": 2.4,
    "radiative_lifetime_ns": 12.0,
}

_ISC = {
    "spectral": {"hw_mev": ISC_ACCEPTING_HW, "huang_rhys": ISC_ACCEPTING_S, "sigma_mev": ISC_SIGMA},
    "upper": {"coefficients": "quoted", "lambda_perp_mhz": LAMBDA_PERP_AB_INITIO_MHZ, "gap_mev": ISC_GAP_MEV,
              "f1": 1e-3, "n_max": 14},
    "lower": {"lambda_ratio": LAMBDA_RATIO, "c_squared": SINGLET_MIXING_C2, "gap_mev": ISC_GAP_MEV,
              "lifetime_0k_ns": SHELF_LIFETIME_0K_NS, "target_a1_mev": 14.0, "n_max": 24},
    "temperatures_k": [float(t) for t in range(0, 301, 25)],
}

_PUMP = {
    "pump_mhz": 0.1 * RADIATIVE_RATE_MHZ,
    "radiative_mhz": RADIATIVE_RATE_MHZ,
    "upper_isc_pm_mhz": UPPER_ISC_PM_MHZ,
    "upper_isc_0_mhz": UPPER_ISC_PM_MHZ / 100.0,
    "singlet_decay_mhz": SINGLET_DECAY_MHZ,
    "shelf_lifetime_ns": SHELF_LIFETIME_300K_NS,
    "lower_selectivity": LOWER_SELECTIVITY_300K,
    "mw_rate_mhz": 10.0,
    "readout_window_ns": 300.0,
    "ionization": 0.05,
    "recapture": 0.5,
    "auger_ps": AUGER_TIME_PS,
    "direct_ionization_us": DIRECT_IONIZATION_TIME_US,
    "transient": {"t_max_ns": 3000.0, "points": 301},
}

_ZFS = {
    "orbitals": [
        {"center": [0.0, 0.0, 0.0], "width": 0.1},
        {"center": [0.0, 0.0, 2.0], "width": 0.1},
    ],
    "pairs": [{"i": 0, "j": 1, "chi": 1}],
    "grid": {"center": [0.0, 0.0, 1.0], "half_width": 1.6, "points": 48},
    "method": "fft",
    "spin": 1.0,
}

_HYPERFINE = {
    "density": {"centers": [[0.0, 0.0, 5.0]], "widths": [0.15], "weights": [1.0]},
    "grid": {"origin": [-1.5, -1.5, -0.5], "spacing": 0.08, "shape": [38, 38, 90]},
    "grid_file": "",
    "nucleus": {"position": [0.0, 0.0, 0.0], "isotope": "13C"},
    "spin": 1.0,
    "quadrupole": {"vzz_v_per_a2": -138.3794411, "q_barn": 0.02},
}

_THERMO = {
    "temperature_k": 1500.0,
    "host": {"gap_ev": DIAMOND_GAP_EV, "vbm_ev": 0.0, "chemical_potentials": {"C": 0.0, "N": 0.0},
             "donors": 0.0, "acceptors": 0.0, "nc": 0.0, "nv": 0.0},
    "species": [
        {"name": d.name, "energies": {str(q): e for q, e in sorted(d.energies.items())},
         "stoichiometry": dict(d.stoichiometry), "corrections": {}, "degeneracy": {}, "site_density": d.site_density}
        for d in REFERENCE_SPECIES
    ],
    "reactions": [
        {"products": [{"species": "V2", "q": 0}], "reactants": [{"species": "V", "q": 0}, {"species": "V", "q": 0}],
         "e_fermi": REFERENCE_FERMI_LEVEL},
        {"products": [{"species": "NV", "q": 0}], "reactants": [{"species": "Ns", "q": 1}, {"species": "V", "q": 0}],
         "e_fermi": REFERENCE_FERMI_LEVEL},
    ],
    "diagram_points": 109,
}

PRESETS: dict[str, tuple[str, dict]] = {
    "paper-ground": ("odmr", _GROUND),
    "paper-excited": ("ple", _EXCITED),
    "paper-djt": ("vibronic", _DJT),
    "paper-singlet": ("vibronic", _SINGLET),
    "paper-pl": ("pl", _PL),
    "paper-isc": ("isc", _ISC),
    "paper-pump": ("pump", _PUMP),
    "paper-zfs": ("zfs", _ZFS),
    "paper-hyperfine": ("hyperfine", _HYPERFINE),
    "paper-thermo": ("thermo", _THERMO),
}

DEFAULT_PRESET = {
    "odmr": "paper-ground",
    "ple": "paper-excited",
    "vibronic": "paper-djt",
    "pl": "paper-pl",
    "isc": "paper-isc",
    "pump": "paper-pump",
    "zfs": "paper-zfs",
    "hyperfine": "paper-hyperfine",
    "thermo": "paper-thermo",
}


def preset(name: str) -> tuple[str, dict]:
    """Command and a fresh copy of the parameter tree of a named preset."""
    if name not in PRESETS:
        raise InputError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    command, tree = PRESETS[name]
    return command, copy.deepcopy(tree)
