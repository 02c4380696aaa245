import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nvcenter import thermo
from nvcenter.core import ConvergenceError, InputError

HOST = thermo.HostModel()


@settings(max_examples=50, deadline=None)
@given(st.integers(-3, 3), st.floats(-10, 10), st.floats(0.0, 5.4), st.floats(0.0, 5.4),
       st.floats(-2, 2), st.floats(-1.0, 1.0))
def test_formation_slope_equals_charge(q, e_tot, ef1, ef2, mu_n, vbm):
    d = thermo.DefectSpecies("X", {q: e_tot}, {"N": 1, "C": -1})
    host = thermo.HostModel(vbm=vbm, chemical_potentials={"C": 0.3, "N": mu_n})
    e1 = thermo.formation_energy(d, host, q, ef1)
    e2 = thermo.formation_energy(d, host, q, ef2)
    assert e2 - e1 == pytest.approx(q * (ef2 - ef1), abs=1e-12)


def test_formation_energy_terms():
    d = thermo.DefectSpecies("X", {1: 2.0}, {"N": 1, "C": -1}, corrections={1: 0.1})
    host = thermo.HostModel(vbm=0.5, chemical_potentials={"C": -1.0, "N": -2.0})
    # E_tot - (mu_N - mu_C) + q (E_F + E_V) + E_corr
    assert thermo.formation_energy(d, host, 1, 1.0) == pytest.approx(2.0 - (-2.0 + 1.0) + 1.5 + 0.1)


def test_transition_level_is_the_crossing():
    d = thermo.DefectSpecies("X", {0: 5.0, -1: 6.0})
    level = thermo.transition_level(d, -1)
    assert level.value == pytest.approx(1.0) and level.inside_gap
    e_minus = thermo.formation_energy(d, HOST, -1, level.value)
    e_zero = thermo.formation_energy(d, HOST, 0, level.value)
    assert e_minus == pytest.approx(e_zero)
    deep = thermo.DefectSpecies("Y", {0: 0.0, 1: -7.0})
    assert not thermo.transition_level(deep, 0).inside_gap


def test_reference_levels():
    nv = thermo.NV_CENTER
    assert thermo.transition_level(nv, -1).value == pytest.approx(2.7)
    assert thermo.transition_level(nv, 0).value == pytest.approx(1.1)


def test_reaction_energies():
    ef = thermo.REFERENCE_FERMI_LEVEL
    v, v2, ns, nv = thermo.VACANCY, thermo.DIVACANCY, thermo.SUBSTITUTIONAL_N, thermo.NV_CENTER
    assert thermo.reaction_energy([(v2, None)], [(v, None), (v, None)], HOST, ef) == pytest.approx(-4.2)
    assert thermo.reaction_energy([(nv, None)], [(ns, None), (v, None)], HOST, ef) == pytest.approx(-3.3)
    with pytest.raises(InputError, match="unbalanced"):
        thermo.reaction_energy([(v2, 0)], [(v, 0)], HOST, ef)


def test_lowest_charge_state():
    q, e = thermo.lowest_charge_state(thermo.NV_CENTER, HOST, 4.0)
    assert q == -1
    assert e == pytest.approx(8.7 - 4.0)


def test_concentration():
    assert thermo.concentration(0.0, 1e22, 1000.0, 2.0) == pytest.approx(2e22)
    kt = thermo.KB_EV * 1000.0
    assert thermo.concentration(1.0, 1.0, 1000.0) == pytest.approx(np.exp(-1.0 / kt))
    with pytest.raises(InputError):
        thermo.concentration(1.0, 1.0, 0.0)


def test_mirror_pair_pins_midgap():
    donor = thermo.DefectSpecies("D", {0: 5.0, 1: 5.0 - 2.7})
    acceptor = thermo.DefectSpecies("A", {0: 5.0, -1: 5.0 + 2.7})
    sol = thermo.solve_fermi_level([donor, acceptor], HOST, 1200.0)
    assert sol.e_fermi == pytest.approx(2.7, abs=1e-9)
    assert sol.residual < 1e-10


def test_donor_only_needs_free_carriers():
    donor = thermo.DefectSpecies("D", {0: 3.0, 1: 0.0})
    with pytest.raises(ConvergenceError):
        thermo.solve_fermi_level([donor], HOST, 1000.0)
    host = thermo.HostModel(nc=5e18, nv=1.8e19)
    sol = thermo.solve_fermi_level([donor], host, 1000.0)
    assert sol.residual < 1e-6
    positive = sum(q * n for q, n in sol.densities["D"].items()) + sol.holes
    assert positive == pytest.approx(sol.electrons, rel=1e-6)


def test_reference_species_fermi_solution():
    sol = thermo.solve_fermi_level(thermo.REFERENCE_SPECIES, HOST, 1500.0)
    assert 0.0 < sol.e_fermi < HOST.gap
    assert sol.residual < 1e-6
    assert thermo.net_charge(thermo.REFERENCE_SPECIES, HOST, sol.e_fermi, 1500.0) == pytest.approx(
        0.0, abs=1e-6 * max(n for per in sol.densities.values() for n in per.values()))


def test_shallow_donors_raise_fermi_level():
    base = thermo.solve_fermi_level(thermo.REFERENCE_SPECIES, HOST, 1500.0).e_fermi
    doped = thermo.solve_fermi_level(thermo.REFERENCE_SPECIES, thermo.HostModel(donors=1e15, nc=5e18, nv=1.8e19), 1500.0)
    assert doped.e_fermi > base


def test_diagram_is_lower_envelope():
    ef, diag = thermo.formation_energy_diagram([thermo.NV_CENTER], HOST, 55)
    for x, y in zip(ef, diag["NV"]):
        assert y == pytest.approx(min(thermo.formation_energy(thermo.NV_CENTER, HOST, q, x) for q in (-1, 0, 1)))


def test_validation():
    with pytest.raises(InputError):
        thermo.DefectSpecies("X", {})
    with pytest.raises(InputError):
        thermo.DefectSpecies("X", {0: 1.0}, corrections={0: 0.1})
    with pytest.raises(InputError):
        thermo.HostModel(gap=0.0)
    with pytest.raises(InputError):
        thermo.formation_energy(thermo.NV_CENTER, HOST, 0, 6.0)
    with pytest.raises(InputError):
        thermo.formation_energy(thermo.NV_CENTER, HOST, 2, 1.0)
    with pytest.raises(InputError):
        thermo.formation_energy(thermo.DefectSpecies("B", {0: 1.0}, {"B": 1}), HOST, 0, 1.0)
