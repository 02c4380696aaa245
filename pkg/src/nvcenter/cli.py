"""Command-line runner.

Usage::

    nvcenter COMMAND [--preset NAME] [--config FILE] [--set dot.path=value ...]
                     [--out PATH] [--format csv|json] [--dump-config]

A configuration document is JSON with the top-level keys ``command``,
``preset``, ``params`` (overrides of the preset tree) and optionally
``format``.  ``--set`` values are parsed as JSON literals and fall back to
plain strings.  Every output embeds the canonical inputs and their SHA-256.

Exit codes: 0 success, 2 configuration or input error, 3 numerical
convergence failure.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import density, excited, ground, lineshape, pumploop, rates, thermo, vibronic
from .core import ConvergenceError, InputError, NVModelError
from .presets import DEFAULT_PRESET, OPEN_MAPS, preset

COMMANDS = tuple(DEFAULT_PRESET)
FORMATS = ("csv", "json")
EXIT_SCHEMA = 2
EXIT_CONVERGENCE = 3


class SchemaError(InputError):
    """Configuration does not match the preset schema."""


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    command: str
    preset: str
    params: dict
    format: str = "json"
    out: str | None = None

    def canonical(self) -> str:
        return emit_config(self)

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def validate(value, template, path: str = "params"):
    """Check ``value`` against the shape of ``template``; return a normalized copy."""
    if isinstance(template, dict):
        if not isinstance(value, dict):
            raise SchemaError(f"{path}: expected an object, got {type(value).__name__}")
        if path.rsplit(".", 1)[-1] in OPEN_MAPS:
            out = {}
            for k, v in value.items():
                if not _is_number(v):
                    raise SchemaError(f"{path}.{k}: expected a number, got {v!r}")
                out[str(k)] = float(v)
            return out
        unknown = sorted(set(value) - set(template))
        if unknown:
            raise SchemaError(f"unknown key {path}.{unknown[0]}")
        return {k: validate(value[k], template[k], f"{path}.{k}") if k in value else copy.deepcopy(template[k])
                for k in template}
    if isinstance(template, list):
        if not isinstance(value, list):
            raise SchemaError(f"{path}: expected a list, got {type(value).__name__}")
        # records share the first entry's schema; numeric arrays are checked element-wise
        if template and isinstance(template[0], dict):
            return [validate(v, template[0], f"{path}[{i}]") for i, v in enumerate(value)]
        if template and isinstance(template[0], list) and len(value) != len(template):
            raise SchemaError(f"{path}: expected {len(template)} rows, got {len(value)}")
        spare = template[-1] if template else 0.0
        return [validate(v, template[i] if i < len(template) else spare, f"{path}[{i}]") for i, v in enumerate(value)]
    if isinstance(template, bool):
        if not isinstance(value, bool):
            raise SchemaError(f"{path}: expected true/false, got {value!r}")
        return value
    if isinstance(template, int) and not isinstance(template, bool):
        if not (_is_number(value) and float(value).is_integer()):
            raise SchemaError(f"{path}: expected an integer, got {value!r}")
        return int(value)
    if isinstance(template, float):
        if not _is_number(value):
            raise SchemaError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if isinstance(template, str):
        if not isinstance(value, str):
            raise SchemaError(f"{path}: expected a string, got {value!r}")
        return value
    raise SchemaError(f"{path}: unsupported template type")  # pragma: no cover


def deep_merge(base: dict, overrides: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in overrides.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def set_path(tree: dict, dotted: str, value) -> None:
    """Assign ``value`` at a dot path; list elements are addressed by index."""
    keys = dotted.split(".")
    node = tree
    walked = "params"
    for k in keys[:-1]:
        walked += f".{k}"
        if isinstance(node, list):
            try:
                node = node[int(k)]
            except (ValueError, IndexError):
                raise SchemaError(f"unknown key {walked}") from None
        elif isinstance(node, dict) and k in node:
            node = node[k]
        else:
            raise SchemaError(f"unknown key {walked}")
    last = keys[-1]
    if isinstance(node, list):
        try:
            node[int(last)] = value
        except (ValueError, IndexError):
            raise SchemaError(f"unknown key {walked}.{last}") from None
    elif isinstance(node, dict):
        if last not in node and walked.rsplit(".", 1)[-1] not in OPEN_MAPS:
            raise SchemaError(f"unknown key {walked}.{last}")
        node[last] = value
    else:
        raise SchemaError(f"unknown key {walked}.{last}")


def parse_config(text: str, command: str | None = None, preset_name: str | None = None,
                 sets: list[str] | None = None, fmt: str | None = None, out: str | None = None) -> RunConfig:
    """Build a validated :class:`RunConfig` from a JSON document and overrides.

    Explicit arguments win over the document.  Missing values are filled
    from the preset.
    """
    doc = {} if not text.strip() else json.loads(text)
    if not isinstance(doc, dict):
        raise SchemaError("configuration document must be a JSON object")
    unknown = sorted(set(doc) - {"command", "preset", "params", "format"})
    if unknown:
        raise SchemaError(f"unknown key {unknown[0]}")
    command = command or doc.get("command")
    if command not in COMMANDS:
        raise SchemaError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    name = preset_name or doc.get("preset") or DEFAULT_PRESET[command]
    owner, tree = preset(name)
    if owner != command:
        raise SchemaError(f"preset {name!r} belongs to command {owner!r}, not {command!r}")
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("params must be an object")
    merged = validate(deep_merge(tree, params), tree)
    for item in sets or []:
        if "=" not in item:
            raise SchemaError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        set_path(merged, key.strip(), parse_value(raw))
    merged = validate(merged, tree)
    fmt = fmt or doc.get("format", "json")
    if fmt not in FORMATS:
        raise SchemaError(f"unknown format {fmt!r}; choose csv or json")
    return RunConfig(command, name, merged, fmt, out)


def emit_config(cfg: RunConfig) -> str:
    """Canonical JSON text of a configuration (sorted keys, compact)."""
    return json.dumps({"command": cfg.command, "preset": cfg.preset, "params": cfg.params, "format": cfg.format},
                      sort_keys=True, separators=(",", ":"))


# --------------------------------------------------------------------------
# result formatting


@dataclass
class Result:
    summary: dict
    columns: list[str]
    rows: list[list]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.10e" % float(x)
    return str(x)


def _plain(x):
    """Recursively convert to JSON-ready types with floats rounded to 11 significant digits."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if not np.isfinite(v):
            return str(v)
        return float("%.10e" % v)
    if x is None:
        return None
    return str(x)


def render(cfg: RunConfig, result: Result) -> str:
    if cfg.format == "json":
        doc = {
            "command": cfg.command,
            "preset": cfg.preset,
            "inputs_sha256": cfg.sha256,
            "inputs": json.loads(cfg.canonical()),
            "summary": _plain(result.summary),
            "columns": result.columns,
            "rows": _plain(result.rows),
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# command={cfg.command}\n# preset={cfg.preset}\n# inputs_sha256={cfg.sha256}\n")
    buf.write(f"# inputs={cfg.canonical()}\n")
    for k, v in result.summary.items():
        buf.write(f"# {k}={json.dumps(_plain(v), sort_keys=True)}\n")
    buf.write(",".join(result.columns) + "\n")
    for row in result.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands


def _ground_params(p: dict) -> ground.GroundStateParams:
    nuclei = ()
    n = p["nitrogen"]
    if n["include"]:
        spins = {"14N": 1.0, "15N": 0.5}
        if n["isotope"] not in spins:
            raise InputError(f"unknown nitrogen isotope {n['isotope']!r}; use 14N or 15N")
        nuclei = (ground.Nucleus(n["isotope"], spins[n["isotope"]], n["a_parallel_mhz"], n["a_perp_mhz"],
                                 n["quadrupole_mhz"] if n["isotope"] == "14N" else 0.0, n["gamma_mhz_per_t"]),)
    e = p["electric_couplings"]
    return ground.GroundStateParams(
        zfs=p["zfs_mhz"], g_tensor=tuple(map(tuple, p["g_tensor"])), nuclei=nuclei,
        d_parallel=e["d_parallel"], d_perp=e["d_perp"], d_perp_prime=e["d_perp_prime"],
        strain_couplings=dict(p["strain_couplings"]), stress_couplings=dict(p["stress_couplings"]),
    )


def _ground_fields(f: dict, magnetic=None) -> ground.Fields:
    strain = np.asarray(f["strain"], dtype=float)
    stress = np.asarray(f["stress_gpa"], dtype=float)
    if f["stress_frame"] not in ("nv", "cubic"):
        raise InputError(f"stress_frame must be 'nv' or 'cubic', got {f['stress_frame']!r}")
    if stress.any() and f["stress_frame"] == "cubic":
        stress = ground.rotate_to_nv(stress)
    b = f["magnetic_mt"] if magnetic is None else magnetic
    return ground.Fields(
        magnetic=tuple(b),
        electric=tuple(f["electric_v_per_cm"]) if any(f["electric_v_per_cm"]) else None,
        strain=tuple(map(tuple, strain)) if strain.any() else None,
        stress=tuple(map(tuple, stress)) if stress.any() else None,
    )


def run_odmr(p: dict) -> Result:
    params = _ground_params(p)
    sweep = p["sweep"]["magnetic_mt"]
    if sweep:
        axis = np.asarray(p["sweep"]["axis"], dtype=float)
        if axis.shape != (3,) or not np.linalg.norm(axis):
            raise InputError("sweep axis must be a non-zero 3-vector")
        axis = axis / np.linalg.norm(axis)
        rows = []
        for b in sweep:
            t = ground.odmr_transitions(ground.build_ground_hamiltonian(params, _ground_fields(p["fields"], tuple(b * axis))),
                                        p["relative_threshold"])
            f, w, m = ground.merge_lines(t.frequencies, t.weights, p["merge_tol_mhz"])
            rows += [[b, fi, wi, int(mi)] for fi, wi, mi in zip(f, w, m)]
        return Result({"points": len(sweep)}, ["magnetic_mt", "frequency_mhz", "weight", "multiplicity"], rows)
    t = ground.odmr_transitions(ground.build_ground_hamiltonian(params, _ground_fields(p["fields"])), p["relative_threshold"])
    f, w, m = ground.merge_lines(t.frequencies, t.weights, p["merge_tol_mhz"])
    return Result({"lines": len(f)}, ["frequency_mhz", "weight", "multiplicity"],
                  [[fi, wi, int(mi)] for fi, wi, mi in zip(f, w, m)])


def run_ple(p: dict) -> Result:
    params = excited.ExcitedStateParams(p["spin_orbit_mhz"], p["zfs_axial_mhz"], p["zfs_a1a2_mhz"], p["zfs_mixing_mhz"],
                                        p["dipole_parallel"], p["dipole_perp"], p["strain_xz_ratio"])
    h = excited.build_excited_hamiltonian(params, p["strain_mhz"], p["electric_mv_per_m"], p["temperature_k"])
    lines = excited.ple_lines(h, p["optical_weights"])
    main = np.argmax(np.abs(lines.vectors) ** 2, axis=0)
    rows = [[e, i, excited.BASIS[k]] for e, i, k in zip(lines.energies, lines.intensities, main)]
    return Result({"spin_orbit_gap_mhz": excited.spin_orbit_gap(h)}, ["offset_mhz", "intensity", "main_component"], rows)


def run_vibronic(p: dict) -> Result:
    if p["model"] == "djt":
        jt = vibronic.JahnTellerParams.from_apes(p["e_jt_mev"], p["barrier_mev"], p["hw_mev"])
        sol = vibronic.solve_djt(jt, p["n_max"], p["n_states"])
        wider = vibronic.solve_djt(jt, p["n_max"] + 2, p["n_states"])
        shift = abs(float(wider.energies[0] - sol.energies[0]))
        red = vibronic.ham_reduction_factor(sol)
        co = vibronic.triplet_isc_coefficients(sol)
        levels = sol.levels()
        summary = {
            "F_mev": jt.f, "G_mev": jt.g, "p": red.p,
            "effective_spin_orbit_mhz": red.p * p["bare_spin_orbit_mhz"],
            "ground_shift_next_cutoff_mev": shift, "converged": shift < 0.1,
            "c1": float(co.c[0]), "d1": float(co.d[0]), "f1": float(co.f[0]) if len(co.f) else 0.0,
        }
        return Result(summary, ["energy_mev", "label", "degeneracy"], [[e, lab, deg] for e, lab, deg in levels])
    if p["model"] != "singlet":  # pragma: no cover - the schema fixes the model per preset
        raise InputError(f"unknown vibronic model {p['model']!r}")
    base = vibronic.SingletParams(hw=p["hw_mev"], gap=p["gap_mev"],
                                  djt=vibronic.damped_djt_coupling(p["triplet_e_jt_mev"], p["hw_mev"], p["doublet_weight"]))
    params = vibronic.calibrate_pjt(base, p["target_a1_mev"], p["n_max"]) if p["pjt_mev"] == 0 else \
        vibronic.SingletParams(p["hw_mev"], p["gap_mev"], p["pjt_mev"], base.djt)
    sol = vibronic.solve_singlet(params, p["n_max"], p["n_states"])
    em = vibronic.singlet_emission(params, p["n_max"])
    a1_level = vibronic.lowest_a1_excitation(sol)
    k = int(np.argmin(np.abs(em.energies - a1_level)))
    w = vibronic.shell_weights(sol, 0)
    summary = {
        "pjt_mev": params.pjt, "djt_mev": params.djt, "lowest_a1_mev": a1_level,
        "a1_line_intensity": float(em.intensities[k]),
        "sideband_peak_mev": vibronic.sideband_peak(em, p["sideband_sigma_mev"]),
        "ground_a1_admixture": float(w["A1"].sum()), "zpl_offset_mev": em.zero_phonon_mev,
    }
    return Result(summary, ["energy_mev", "intensity", "label"],
                  [[e, i, lab] for e, i, lab in zip(em.energies, em.intensities, em.labels)])


def run_pl(p: dict) -> Result:
    modes = [lineshape.PhononMode(m["energy_mev"], m["huang_rhys"], m["symmetry"]) for m in p["modes"]]
    sf = lineshape.spectral_function(modes, p["sigma_mev"])
    em = lineshape.emission_spectrum(p["zpl_ev"], sf, p["include_omega3"])
    ab = lineshape.absorption_spectrum(p["zpl_ev"], modes, p["absorption_policy"], p["sigma_mev"])
    s = lineshape.total_huang_rhys(modes)
    mu = lineshape.dipole_from_lifetime(p["refractive_index"], p["zpl_ev"], p["radiative_lifetime_ns"])
    summary = {
        "huang_rhys": s, "debye_waller": lineshape.debye_waller(s), "zpl_fraction": em.zpl_weight,
        "absorption_zpl_fraction": ab.zpl_weight,
        "e_mode_sideband_share": lineshape.sideband_mass_difference(modes) / (1 - lineshape.debye_waller(s)) if s else 0.0,
        "transition_dipole_e_angstrom": mu * 10,
        "singlet_radiative_lifetime_ns": lineshape.SINGLET_RADIATIVE_LIFETIME_NS,
    }
    rows = [["emission", e, i] for e, i in zip(em.photon_energy, em.intensity)]
    rows += [["absorption", e, i] for e, i in zip(ab.photon_energy, ab.intensity)]
    return Result(summary, ["spectrum", "photon_energy_ev", "intensity_per_ev"], rows)


def run_isc(p: dict) -> Result:
    sp = p["spectral"]
    sf = rates.isc_spectral_function(sp["hw_mev"], sp["huang_rhys"], sp["sigma_mev"])
    up = p["upper"]
    if up["coefficients"] == "quoted":
        coeffs = rates.quoted_triplet_coefficients(up["f1"])
    elif up["coefficients"] == "djt":
        coeffs = vibronic.triplet_isc_coefficients(vibronic.solve_djt(vibronic.TRIPLET_DJT, up["n_max"]))
    else:
        raise InputError(f"upper.coefficients must be 'quoted' or 'djt', got {up['coefficients']!r}")
    upper = rates.upper_branch_rates(coeffs, up["lambda_perp_mhz"], up["gap_mev"], sf=sf)
    lo = p["lower"]
    params = vibronic.reference_singlet_params(lo["target_a1_mev"], lo["n_max"])
    inputs = rates.LowerBranchInputs(1.0, lo["lambda_ratio"], lo["c_squared"], lo["gap_mev"])
    levels, inputs = rates.calibrate_lower_branch(rates.singlet_level_rates(params, inputs, lo["n_max"], sf=sf),
                                                  inputs, lo["lifetime_0k_ns"])
    curve = [rates.singlet_lifetime_vs_t(levels, t) for t in p["temperatures_k"]]
    summary = {
        **upper.as_dict(), "Gamma_A2_over_A1": upper.a2 / upper.a1 if upper.a1 else 0.0,
        "Gamma_A1_over_E12": upper.a1 / upper.e12 if upper.e12 else 0.0,
        "lambda_z_mhz": inputs.lambda_z_mhz, "lambda_perp_lower_mhz": inputs.lambda_perp_mhz,
        "selectivity_0k": rates.singlet_lifetime_vs_t(levels, 0.0).selectivity,
    }
    rows = [[c.temperature, c.lifetime_ns, c.gamma_z, c.gamma_perp, c.selectivity] for c in curve]
    return Result(summary, ["temperature_k", "lifetime_ns", "gamma_z_mhz", "gamma_perp_mhz", "selectivity"], rows)


def run_pump(p: dict) -> Result:
    s = pumploop.LevelScheme.from_shelf(
        p["shelf_lifetime_ns"], p["lower_selectivity"], pump=p["pump_mhz"], radiative=p["radiative_mhz"],
        upper_isc_pm=p["upper_isc_pm_mhz"], upper_isc_0=p["upper_isc_0_mhz"], singlet_decay=p["singlet_decay_mhz"],
    )
    ion = pumploop.LevelScheme(**{**s.__dict__, "ionization": p["ionization"], "recapture": p["recapture"]})
    pulsed = pumploop.odmr_contrast(s, p["readout_window_ns"])
    pdmr = pumploop.pdmr_observables(ion, p["mw_rate_mhz"], p["auger_ps"], p["direct_ionization_us"])
    tr = p["transient"]
    if tr["points"] < 2 or tr["t_max_ns"] <= 0:
        raise InputError("transient needs at least two points and a positive duration")
    t = np.linspace(0.0, tr["t_max_ns"], tr["points"])
    p0 = np.zeros(len(LEVELS_BASE))
    p0[:3] = 1.0 / 3.0
    pops = pumploop.transient(pumploop.build_rate_matrix(s), p0, t)
    pl = pumploop.pl_signal(pops, s)
    summary = {
        "pulsed_contrast": pulsed.contrast, "cw_contrast": pumploop.cw_contrast(s, p["mw_rate_mhz"]),
        "polarization_before_readout": pulsed.polarization, "steady_polarization": pumploop.ground_polarization(s),
        "photocurrent_off": pdmr.photocurrent_off, "photocurrent_on": pdmr.photocurrent_on,
        "pdmr_contrast": pdmr.contrast, "auger_fraction": pdmr.auger_fraction,
        "max_conservation_error": float(np.abs(pops.sum(axis=1) - 1).max()),
    }
    rows = [[ti, *row, li] for ti, row, li in zip(t, pops, pl)]
    return Result(summary, ["t_ns", *LEVELS_BASE, "pl_mhz"], rows)


LEVELS_BASE = pumploop.LEVELS


def run_zfs(p: dict) -> Result:
    gspec = p["grid"]
    grid = density.cubic_grid(gspec["half_width"], gspec["points"], gspec["center"])
    orbs = [density.gaussian_orbital(grid, o["center"], o["width"]) for o in p["orbitals"]]
    pairs = []
    for pr in p["pairs"]:
        try:
            pairs.append(density.OrbitalPair(orbs[pr["i"]], orbs[pr["j"]], pr["chi"]))
        except IndexError:
            raise InputError(f"pair {pr} refers to a missing orbital") from None
    res = density.zfs_tensor(pairs, p["spin"], p["method"])
    summary = {"D_mhz": res.d, "E_mhz": res.e, "principal_values_mhz": res.principal_values,
               "trace_over_norm": float(abs(np.trace(res.tensor)) / max(np.linalg.norm(res.tensor), 1e-300))}
    if len(p["orbitals"]) == 2:
        sep = np.subtract(p["orbitals"][1]["center"], p["orbitals"][0]["center"])
        summary["point_dipole_Dzz_mhz"] = float(density.point_dipole_zfs(sep)[2, 2])
    rows = [[a, b, res.tensor[a, b]] for a in range(3) for b in range(3)]
    return Result(summary, ["a", "b", "D_mhz"], rows)


def run_hyperfine(p: dict) -> Result:
    if p["grid_file"]:
        grid = density.read_grid(p["grid_file"])
    else:
        g = p["grid"]
        empty = density.ScalarGrid3D(g["origin"], g["spacing"], np.zeros(tuple(g["shape"])))
        d = p["density"]
        grid = density.gaussian_density(empty, np.asarray(d["centers"], dtype=float), np.asarray(d["widths"]),
                                        np.asarray(d["weights"]))
    iso = p["nucleus"]["isotope"]
    if iso not in density.NUCLEAR_G:
        raise InputError(f"unknown isotope {iso!r}; known: {', '.join(density.NUCLEAR_G)}")
    res = density.hyperfine_tensor(grid, p["nucleus"]["position"], density.NUCLEAR_G[iso], p["spin"])
    q = p["quadrupole"]
    summary = {"fermi_contact_mhz": res.fermi_contact, "a_parallel_mhz": res.a_parallel, "a_perp_mhz": res.a_perp,
               "spin_integral": grid.integral(), "contact_label": "valence-only",
               "quadrupole_cq_mhz": density.quadrupole_coupling(q["vzz_v_per_a2"], q["q_barn"])}
    if not p["grid_file"] and len(p["density"]["centers"]) == 1:
        r = np.subtract(p["density"]["centers"][0], p["nucleus"]["position"])
        if np.linalg.norm(r) > 0:
            summary["point_dipole_tensor_mhz"] = density.point_dipole_hyperfine(r, density.NUCLEAR_G[iso])
    rows = [[a, b, res.tensor[a, b], res.dipolar[a, b]] for a in range(3) for b in range(3)]
    return Result(summary, ["a", "b", "A_mhz", "dipolar_mhz"], rows)


def _species(spec: dict) -> thermo.DefectSpecies:
    try:
        energies = {int(k): v for k, v in spec["energies"].items()}
        corrections = {int(k): v for k, v in spec["corrections"].items()}
        degeneracy = {int(k): v for k, v in spec["degeneracy"].items()}
    except ValueError as exc:
        raise InputError(f"species {spec['name']!r}: charge keys must be integers ({exc})") from None
    stoich = {k: int(round(v)) for k, v in spec["stoichiometry"].items()}
    return thermo.DefectSpecies(spec["name"], energies, stoich, corrections, spec["site_density"], degeneracy)


def run_thermo(p: dict) -> Result:
    h = p["host"]
    host = thermo.HostModel(h["gap_ev"], h["vbm_ev"], dict(h["chemical_potentials"]), h["donors"], h["acceptors"],
                            h["nc"], h["nv"])
    species = [_species(s) for s in p["species"]]
    by_name = {s.name: s for s in species}

    def entries(items):
        try:
            return [(by_name[e["species"]], e["q"]) for e in items]
        except KeyError as exc:
            raise InputError(f"reaction refers to unknown species {exc.args[0]!r}") from None

    reactions = [thermo.reaction_energy(entries(r["products"]), entries(r["reactants"]), host, r["e_fermi"])
                 for r in p["reactions"]]
    sol = thermo.solve_fermi_level(species, host, p["temperature_k"])
    levels = {s.name: {f"{q:+d}/{q + 1:+d}": thermo.transition_level(s, q, host).value
                       for q in s.charges if q + 1 in s.energies} for s in species}
    ef, diag = thermo.formation_energy_diagram(species, host, p["diagram_points"])
    summary = {"fermi_level_ev": sol.e_fermi, "neutrality_residual": sol.residual, "reaction_energies_ev": reactions,
               "transition_levels_ev": levels, "densities_cm3": sol.densities}
    rows = [[x, *[diag[s.name][k] for s in species]] for k, x in enumerate(ef)]
    return Result(summary, ["e_fermi_ev", *[f"E_form_{s.name}_ev" for s in species]], rows)


RUNNERS = {
    "odmr": run_odmr, "ple": run_ple, "vibronic": run_vibronic, "pl": run_pl, "isc": run_isc,
    "pump": run_pump, "zfs": run_zfs, "hyperfine": run_hyperfine, "thermo": run_thermo,
}


def run(cfg: RunConfig) -> str:
    """Execute a configuration and return the rendered output text."""
    try:
        result = RUNNERS[cfg.command](cfg.params)
    except NVModelError as exc:
        raise type(exc)(f"{cfg.command}: {exc}") from exc
    return render(cfg, result)


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nvcenter", description="NV-center spin, vibronic and rate models.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--preset", help="named parameter set (default depends on the command)")
    ap.add_argument("--config", help="JSON configuration document")
    ap.add_argument("--set", dest="sets", action="append", default=[], metavar="KEY=VALUE",
                    help="override one parameter by dot path; repeatable")
    ap.add_argument("--out", help="output file (default: standard output)")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument("--B", dest="field_mt", type=float, help="odmr: magnetic field along the NV axis in mT")
    ap.add_argument("--dump-config", action="store_true", help="print the canonical configuration and exit")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text() if args.config else ""
        sets = list(args.sets)
        if args.field_mt is not None:
            if args.command != "odmr":
                raise SchemaError("--B applies to the odmr command only")
            sets.append(f"fields.magnetic_mt=[0.0, 0.0, {args.field_mt!r}]")
        cfg = parse_config(text, args.command, args.preset, sets, args.format or None, args.out)
        if args.dump_config:
            sys.stdout.write(cfg.canonical() + "\n")
            return 0
        out = run(cfg)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (InputError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
