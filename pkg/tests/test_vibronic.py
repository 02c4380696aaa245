import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvcenter import vibronic
from nvcenter.core import MHZ_PER_MEV, InputError


@pytest.fixture(scope="module")
def triplet():
    return vibronic.solve_djt(vibronic.TRIPLET_DJT, n_max=14)


@pytest.fixture(scope="module")
def singlet():
    params = vibronic.reference_singlet_params()
    return params, vibronic.solve_singlet(params)


def test_uncoupled_doublet_is_a_2d_oscillator():
    sol = vibronic.solve_djt(vibronic.JahnTellerParams(hw=77.6), n_max=6)
    levels = sol.levels()
    for n, (e, _, deg) in enumerate(levels[:4]):
        assert e == pytest.approx(n * 77.6, abs=1e-9)
        assert deg == 2 * (n + 1)
    assert vibronic.ham_reduction_factor(sol).p == pytest.approx(1.0)


def test_apes_round_trip():
    p = vibronic.TRIPLET_DJT
    e_jt, barrier = vibronic.apes_extrema(p.f, p.g, p.hw)
    assert e_jt == pytest.approx(42.0, abs=1e-8)
    assert barrier == pytest.approx(9.0, abs=1e-8)
    # linear coupling alone gives F^2 / 2 hw and no barrier
    f, g = vibronic.couplings_from_apes(20.0, 0.0, 70.0)
    assert g == 0.0 and f ** 2 / (2 * 70.0) == pytest.approx(20.0)


def test_apes_input_validation():
    with pytest.raises(InputError):
        vibronic.couplings_from_apes(10.0, 12.0, 70.0)
    with pytest.raises(InputError):
        vibronic.apes_extrema(1.0, 40.0, 70.0)


def test_triplet_levels_and_labels(triplet):
    levels = triplet.levels()
    assert [lab for _, lab, _ in levels[:4]] == ["E", "A1", "A2", "E"]
    energies = [e for e, _, _ in levels[1:4]]
    assert np.allclose(energies, [38.99, 57.20, 90.16], atol=0.01)


def test_triplet_converged_in_cutoff(triplet):
    wider = vibronic.solve_djt(vibronic.TRIPLET_DJT, n_max=16)
    assert np.allclose(wider.relative[:10], triplet.relative[:10], atol=1e-3)


def test_solve_converged_agrees():
    sol = vibronic.solve_djt_converged(levels=6, tol_mev=1e-3)
    ref = vibronic.solve_djt(vibronic.TRIPLET_DJT, n_max=16)
    assert np.allclose(sol.relative[:8], ref.relative[:8], atol=2e-3)


def test_ham_factor(triplet):
    red = vibronic.ham_reduction_factor(triplet)
    c2, d2 = float(np.vdot(red.c, red.c).real), float(np.vdot(red.d, red.d).real)
    assert c2 + d2 == pytest.approx(1.0, abs=1e-10)
    assert red.p == pytest.approx(c2 - d2)
    assert red.p == pytest.approx(0.3003, abs=1e-3)


def test_triplet_isc_coefficients(triplet):
    co = vibronic.triplet_isc_coefficients(triplet)
    assert co.c_quanta[0] == 0 and co.d_quanta[0] == 1 and co.f_quanta[0] == 3
    assert co.c[0] ** 2 == pytest.approx(0.5738, abs=1e-3)
    assert co.d[0] ** 2 == pytest.approx(0.3313, abs=1e-3)
    assert co.f[0] ** 2 == pytest.approx(1.29e-5, rel=0.02)
    # A2 vibrations start at three quanta, so the f channel is weak
    assert co.f[0] < 0.01 * co.c[0]


def test_damped_coupling():
    assert vibronic.damped_djt_coupling(42.0, 66.0, 0.1) == pytest.approx(np.sqrt(2 * 0.1 * 42 * 66))
    with pytest.raises(InputError):
        vibronic.damped_djt_coupling(42.0, 66.0, 1.5)


def test_singlet_calibration(singlet):
    params, sol = singlet
    assert vibronic.lowest_a1_excitation(sol) == pytest.approx(14.0, abs=1e-6)
    assert params.pjt == pytest.approx(180.52, abs=0.01)
    labels = [lab for _, lab, _ in sol.levels()[:5]]
    assert labels == ["E", "A1", "E", "A2", "E"]


def test_singlet_emission(singlet):
    params, sol = singlet
    lines = vibronic.singlet_emission(params)
    k = int(np.argmin(np.abs(lines.energies - vibronic.lowest_a1_excitation(sol))))
    # A1 -> A1 vibronic is dipole forbidden for in-plane light
    assert lines.intensities[k] < 1e-12
    assert lines.intensities.max() == pytest.approx(1.0)
    assert vibronic.sideband_peak(lines) == pytest.approx(46.95, abs=0.1)


def test_singlet_ground_composition(singlet):
    _, sol = singlet
    amps, quanta = vibronic.singlet_coefficients(sol, 0).select("E+", "A1")
    assert quanta[0] == 0 and amps[0] ** 2 == pytest.approx(0.588, abs=1e-3)
    w = vibronic.shell_weights(sol, 0)
    assert sum(v.sum() for v in w.values()) == pytest.approx(1.0, abs=1e-10)
    assert w["A1"].sum() == pytest.approx(0.0406, abs=5e-4)
    assert w["A1"][0] < 1e-20 and w["A1"][1] == pytest.approx(0.0201, abs=5e-4)


def test_coefficients_same_for_either_partner(singlet):
    _, sol = singlet
    a, _ = vibronic.singlet_coefficients(sol, 0).select("E+", "A1")
    b, _ = vibronic.singlet_coefficients(sol, 1).select("E+", "A1")
    assert np.allclose(a[:3], b[:3], atol=1e-8)


def test_tunneling_rate():
    assert vibronic.tunneling_rate_ghz(1.0) == pytest.approx(MHZ_PER_MEV * 1e-3)
    with pytest.raises(InputError):
        vibronic.tunneling_rate_ghz(-1.0)


@settings(max_examples=10, deadline=None)
@given(st.floats(5.0, 40.0), st.floats(0.0, 0.4))
def test_djt_states_normalized_and_hermitian(e_jt, barrier_share):
    params = vibronic.JahnTellerParams.from_apes(e_jt, barrier_share * e_jt, 70.0)
    basis = vibronic.BosonBasis(6)
    h = vibronic.djt_hamiltonian(params, basis)
    assert np.max(np.abs(h - h.conj().T)) < 1e-10
    sol = vibronic.solve_djt(params, n_max=6, n_states=12)
    norms = np.linalg.norm(sol.vectors, axis=0)
    assert np.allclose(norms, 1.0)
    assert 0.0 < vibronic.ham_reduction_factor(sol).p <= 1.0 + 1e-12
