import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvcenter import excited
from nvcenter.core import MHZ_PER_KELVIN, InputError, hermiticity_defect

P = excited.EXPERIMENTAL


def test_zero_strain_levels_match_block_oracle():
    lam, dz, da, dm = P.spin_orbit, P.zfs_axial, P.zfs_a1a2, P.zfs_mixing
    block = np.array([[-lam + dz / 3, dm], [dm, -2 * dz / 3]])
    expected = np.sort(np.concatenate([[lam + dz / 3 - da / 2, lam + dz / 3 + da / 2],
                                       np.repeat(np.linalg.eigvalsh(block), 2)]))
    vals = np.linalg.eigvalsh(excited.build_excited_hamiltonian(P))
    assert np.allclose(vals, expected, atol=1e-9)


def test_spin_orbit_gap_is_lambda_at_zero_strain():
    assert excited.spin_orbit_gap(excited.build_excited_hamiltonian(P)) == pytest.approx(P.spin_orbit)


def test_large_strain_separates_branches():
    s = np.zeros((3, 3))
    s[0, 0], s[1, 1] = 2e5, -2e5
    lines = excited.ple_lines(excited.build_excited_hamiltonian(P, strain_mhz=s))
    low, high = lines.energies[:3], lines.energies[3:]
    assert high.mean() - low.mean() == pytest.approx(4e5, rel=1e-2)


def test_axial_field_is_a_rigid_shift():
    h0 = excited.build_excited_hamiltonian(P)
    h1 = excited.build_excited_hamiltonian(P, electric_mv_per_m=[0.0, 0.0, 1.0])
    assert np.allclose(np.linalg.eigvalsh(h1) - np.linalg.eigvalsh(h0), P.dipole_parallel)


def test_ple_energies_relative_to_centroid():
    lines = excited.ple_lines(excited.build_excited_hamiltonian(P, electric_mv_per_m=[1.0, 0.5, 3.0]))
    assert abs(lines.energies.sum()) < 1e-8
    assert np.allclose(lines.intensities, 1.0)


def test_optical_weights_select_components():
    w = np.array([0, 0, 1, 1, 0, 0], dtype=float)
    lines = excited.ple_lines(excited.build_excited_hamiltonian(P), w)
    assert lines.intensities.sum() == pytest.approx(2.0)
    with pytest.raises(InputError):
        excited.ple_lines(excited.build_excited_hamiltonian(P), [1.0, 1.0])


def test_reduction_factor():
    assert excited.reduction_factor(0.0, 10.0) == 0.0
    assert excited.reduction_factor(100.0, 0.0) == 1.0
    x = 2.0
    val = excited.reduction_factor(x * MHZ_PER_KELVIN, 1.0)
    assert val == pytest.approx((1 - np.exp(-x)) / (1 + np.exp(-x)))
    with pytest.raises(InputError):
        excited.reduction_factor(-1.0, 1.0)


def test_temperature_reduces_rhombic_term():
    h_cold = excited.build_excited_hamiltonian(P, temperature_k=0.0)
    h_warm = excited.build_excited_hamiltonian(P, temperature_k=10.0, perpendicular_splitting_mhz=0.0)
    # with no orbital splitting the A1/A2 splitting averages out
    assert h_warm[0, 0] == pytest.approx(h_warm[1, 1])
    assert h_cold[1, 1] - h_cold[0, 0] == pytest.approx(P.zfs_a1a2)


def test_first_principles_preset_uses_quenched_spin_orbit():
    assert excited.FIRST_PRINCIPLES.spin_orbit == pytest.approx(0.304 * excited.BARE_SPIN_ORBIT_MHZ)


def test_strain_must_be_symmetric():
    s = np.zeros((3, 3))
    s[0, 1] = 1.0
    with pytest.raises(InputError):
        excited.strain_components(s)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1e5, 1e5), st.floats(-1e5, 1e5), st.floats(-1e5, 1e5))
def test_hamiltonian_hermitian_and_trace(exx, exy, exz):
    s = np.array([[exx, exy, exz], [exy, -exx, 0.0], [exz, 0.0, 0.0]])
    h = excited.build_excited_hamiltonian(P, strain_mhz=s)
    assert hermiticity_defect(h) == 0.0
    # strain is traceless in the orbital space
    assert np.trace(h).real == pytest.approx(np.trace(excited.build_excited_hamiltonian(P)).real, abs=1e-6)
