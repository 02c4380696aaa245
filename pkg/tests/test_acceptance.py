"""The twelve acceptance criteria, each at its stated tolerance and time budget."""

import math
import time

import numpy as np
from scipy.stats import poisson

from nvcenter import core, density, ground, lineshape, pumploop, rates, thermo, vibronic


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_01_ground_odmr(report):
    with Timer() as t:
        bare = ground.odmr_transitions(ground.build_ground_hamiltonian(ground.GroundStateParams()))
        f0, _, _ = ground.merge_lines(bare.frequencies, bare.weights, 0.01)
        with_n = ground.GroundStateParams().with_nuclei(ground.NITROGEN_14)
        lines = ground.odmr_transitions(ground.build_ground_hamiltonian(with_n, ground.Fields(magnetic=(0.0, 0.0, 5.0))))
        f, _, _ = ground.merge_lines(lines.frequencies, lines.weights, 0.01)
    lower = np.sort(f[f < 2870.0])
    spacings = np.diff(lower)
    ok = (len(f0) == 1 and abs(f0[0] - 2870.0) / 2870.0 < 1e-6 and len(lower) == 3
          and np.all(np.abs(spacings - 2.14) <= 0.01) and t.elapsed < 1.0)
    report(1, "ground ODMR", ok, f"f0={f0[0]:.6f} MHz, 14N spacings={np.round(spacings, 4).tolist()} MHz, {t.elapsed:.3f} s")
    assert ok


def test_criterion_02_cubic_frame_stress_parameters(report):
    target = {"a1": -2.66, "a2": 2.51, "b": 1.94, "c": -2.83, "d": -0.12, "e": 0.66}
    with Timer() as t:
        got = ground.hybrid_stress_parameters()
    dev = {k: abs(got[k] - v) for k, v in target.items()}
    ok = max(dev.values()) <= 0.02 and t.elapsed < 1.0
    report(2, "stress parameters from g", ok, ", ".join(f"{k}={float(got[k]):.3f}" for k in target))
    assert ok


def test_criterion_03_strain_to_stress_couplings(report):
    with Timer() as t:
        g, residual = ground.convert_h_to_g()
    rel = {k: abs(g[k] - v) / abs(v) for k, v in ground.STRESS_COUPLINGS.items()}
    ok = max(rel.values()) < 0.05 and t.elapsed < 1.0
    report(3, "h to g conversion", ok, f"max relative deviation {max(rel.values()):.2e}, fit residual {residual:.1e}")
    assert ok


def test_criterion_04_triplet_djt(report):
    with Timer() as t:
        sol = vibronic.solve_djt(vibronic.TRIPLET_DJT, n_max=14)
        p = vibronic.ham_reduction_factor(sol).p
    excited = [e for e, _, _ in sol.levels()[1:4]]
    targets = (39.0, 57.0, 90.0)
    ok_levels = all(abs(e - x) <= 0.15 * x for e, x in zip(excited, targets))
    ok = ok_levels and abs(p - 0.304) <= 0.05 and 4000 <= p * 15780 <= 5600 and t.elapsed < 30
    report(4, "triplet DJT", ok, f"levels {np.round(excited, 2).tolist()} meV, p={p:.4f}, "
                                  f"p*lambda={p * 15780:.0f} MHz, {t.elapsed:.1f} s")
    assert ok


def test_criterion_05_singlet_pjt(report):
    with Timer() as t:
        params = vibronic.calibrate_pjt(vibronic.SingletParams(
            hw=vibronic.SINGLET_HW, gap=vibronic.SINGLET_GAP,
            djt=vibronic.damped_djt_coupling(vibronic.TRIPLET_E_JT, vibronic.SINGLET_HW, vibronic.SINGLET_DOUBLET_WEIGHT)))
        sol = vibronic.solve_singlet(params)
        a1 = vibronic.lowest_a1_excitation(sol)
        lines = vibronic.singlet_emission(params)
        peak = vibronic.sideband_peak(lines)
    k = int(np.argmin(np.abs(lines.energies - a1)))
    ratio = lines.intensities[k] / lines.intensities.max()
    ok = abs(a1 - 14.0) <= 4 and ratio < 1e-3 and abs(peak - 43.0) <= 6 and t.elapsed < 60
    report(5, "singlet PJT", ok, f"A1 level {a1:.2f} meV, relative intensity {ratio:.1e}, "
                                 f"sideband peak {peak:.2f} meV, {t.elapsed:.1f} s")
    assert ok


def test_criterion_06_isc(report):
    with Timer() as t:
        upper = rates.upper_branch_rates(rates.quoted_triplet_coefficients())
        model = rates.reference_shelf_model()
        temps = np.arange(0.0, 301.0, 25.0)
        curve = model.curve(temps)
    tau = np.array([c.lifetime_ns for c in curve])
    sel = curve[0].selectivity
    ratio = upper.a2 / upper.a1
    ok = (ratio < 1e-5 and abs(sel - 0.84) <= 0.03 and abs(tau[0] - 371.0) < 1e-6
          and abs(tau[-1] - 171.0) <= 0.15 * 171.0 and np.all(np.diff(tau) < 0) and t.elapsed < 10)
    report(6, "intersystem crossing", ok, f"A2/A1={ratio:.2e}, selectivity={sel:.4f}, "
                                          f"tau(0)={tau[0]:.1f} ns, tau(300)={tau[-1]:.1f} ns, {t.elapsed:.1f} s")
    assert ok


def test_criterion_07_lineshape(report):
    with Timer() as t:
        dw = lineshape.debye_waller(3.5)
        modes = lineshape.split_huang_rhys(3.5, 0.1)
        sf = lineshape.spectral_function(modes)
        target = sum(m.huang_rhys * m.energy for m in modes)
        k = np.arange(30)
        closed = np.exp(-3.5) * 3.5 ** k / np.array([float(math.factorial(n)) for n in k])
        weights = lineshape.poisson_weights(3.5, 29)
    moment_err = abs(sf.mean() - target)
    poisson_err = float(np.max(np.abs(weights - closed)))
    ok = abs(dw - 0.0302) <= 1e-4 and moment_err <= 1e-6 and poisson_err <= 1e-10 and t.elapsed < 1.0
    report(7, "lineshape", ok, f"DW={dw:.6f}, first-moment error {moment_err:.1e} meV, "
                               f"Poisson error {poisson_err:.1e}, {t.elapsed:.3f} s")
    assert ok
    assert np.allclose(weights, poisson.pmf(k, 3.5), atol=1e-12)


def test_criterion_08_radiative_lifetime(report):
    with Timer() as t:
        mu = lineshape.dipole_from_lifetime(2.4, 1.945, 12.0)
        back = lineshape.radiative_lifetime(2.4, 1.945, mu)
        ratio = lineshape.radiative_lifetime(2.4, 1.945, mu) / lineshape.radiative_lifetime(2.4, 2 * 1.945, mu)
    ok = abs(back - 12.0) / 12.0 < 1e-6 and abs(ratio - 8.0) < 1e-12 and t.elapsed < 1.0
    report(8, "radiative lifetime", ok, f"|mu|={mu * 10:.4f} e*A, round trip {back:.12f} ns, "
                                        f"tau(w)/tau(2w)={ratio:.12f}")
    assert ok


def test_criterion_09_grid_integrals(report):
    with Timer() as t:
        grid = density.cubic_grid(1.6, 48, (0.0, 0.0, 1.0))
        a = density.gaussian_orbital(grid, (0.0, 0.0, 0.0), 0.1)
        b = density.gaussian_orbital(grid, (0.0, 0.0, 2.0), 0.1)
        pairs = [density.OrbitalPair(a, b, 1)]
        fft = density.zfs_tensor(pairs, method="fft")
        direct = density.zfs_tensor(pairs, method="direct")
    oracle = density.point_dipole_zfs((0.0, 0.0, 2.0))
    rel = float(np.max(np.abs(fft.tensor - oracle)) / np.max(np.abs(oracle)))
    trace = abs(np.trace(fft.tensor)) / np.linalg.norm(fft.tensor)
    agree = float(np.max(np.abs(fft.tensor - direct.tensor)) / np.max(np.abs(direct.tensor)))
    ok = rel <= 0.02 and trace < 1e-6 and agree <= 1e-4 and t.elapsed < 60
    report(9, "grid integrals", ok, f"Dzz={fft.tensor[2, 2]:.2f} MHz vs {oracle[2, 2]:.2f}, relative error {rel:.1e}, "
                                    f"trace/norm {trace:.1e}, FFT vs direct {agree:.1e}, {t.elapsed:.1f} s")
    assert ok


def test_criterion_10_pump_loop(report):
    with Timer() as t:
        scheme = pumploop.LevelScheme.from_shelf(pumploop.SHELF_LIFETIME_300K_NS, pumploop.LOWER_SELECTIVITY_300K)
        m = pumploop.build_rate_matrix(scheme)
        p0 = np.zeros(8)
        p0[:3] = 1 / 3
        pops = pumploop.transient(m, p0, np.linspace(0.0, 5000.0, 501))
        conservation = float(np.max(np.abs(pops.sum(axis=1) - 1.0)))
        contrast = pumploop.odmr_contrast(scheme).contrast
        polar = pumploop.ground_polarization(scheme)
        auger = pumploop.auger_fraction()
    ok = (conservation <= 1e-12 and 0.15 <= contrast <= 0.35 and polar >= 0.80
          and abs(auger - 0.998) <= 0.001 and t.elapsed < 5)
    report(10, "pump loop", ok, f"conservation {conservation:.1e}, contrast {contrast:.4f}, "
                                f"polarization {polar:.4f}, Auger fraction {auger:.5f}, {t.elapsed:.2f} s")
    assert ok


def test_criterion_11_thermo(report):
    with Timer() as t:
        host = thermo.HostModel()
        nv = thermo.NV_CENTER
        slopes = [(thermo.formation_energy(nv, host, q, 3.0) - thermo.formation_energy(nv, host, q, 1.0)) / 2.0
                  for q in nv.charges]
        ef = thermo.REFERENCE_FERMI_LEVEL
        e_v2 = thermo.reaction_energy([(thermo.DIVACANCY, None)], [(thermo.VACANCY, None), (thermo.VACANCY, None)], host, ef)
        e_nv = thermo.reaction_energy([(nv, None)], [(thermo.SUBSTITUTIONAL_N, None), (thermo.VACANCY, None)], host, ef)
        sol = thermo.solve_fermi_level(thermo.REFERENCE_SPECIES, host, 1500.0)
    slope_ok = all(s == q for s, q in zip(slopes, nv.charges))
    ok = slope_ok and abs(-e_v2 - 4.2) <= 0.01 and abs(-e_nv - 3.3) <= 0.01 and sol.residual < 1e-6 and t.elapsed < 1.0
    report(11, "defect thermodynamics", ok, f"slopes {slopes}, V+V->V2 releases {-e_v2:.3f} eV, "
                                            f"Ns+V->NV releases {-e_nv:.3f} eV, residual {sol.residual:.1e}")
    assert ok


def test_criterion_12_zfs_in_kelvin(report):
    with Timer() as t:
        kelvin = core.convert(2870.0, "MHz", "K")
    ok = abs(kelvin - 0.1377) <= 0.5e-4 and abs(kelvin - 0.138) / 0.138 < 0.01 and t.elapsed < 1.0
    report(12, "ZFS in kelvin", ok, f"h*2870 MHz / k_B = {kelvin * 1e3:.2f} mK")
    assert ok
