import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad_vec
from scipy.linalg import expm

from nvcenter import pumploop as pl
from nvcenter.core import ConvergenceError, InputError

SCHEME = pl.LevelScheme.from_shelf(pl.SHELF_LIFETIME_300K_NS, pl.LOWER_SELECTIVITY_300K)

rate = st.floats(0.01, 1e4)


def start():
    p0 = np.zeros(8)
    p0[:3] = 1 / 3
    return p0


@settings(max_examples=40, deadline=None)
@given(rate, rate, rate, rate, rate, rate, st.floats(0.0, 100.0))
def test_generator_columns_sum_to_zero(pump, rad, up, decay, lz, lp, mw):
    s = pl.LevelScheme(pump, rad, up, None, decay, lz, lp, mw)
    m = pl.build_rate_matrix(s)
    assert np.allclose(m.sum(axis=0), 0.0, atol=1e-9 * np.abs(m).max())
    off = m - np.diag(np.diag(m))
    assert np.all(off >= 0)
    p = pl.steady_state(m)
    assert p.sum() == pytest.approx(1.0) and np.all(p >= 0)
    assert np.allclose(m @ p, 0.0, atol=1e-9 * np.abs(m).max())


def test_transient_conserves_population_and_matches_expm():
    m = pl.build_rate_matrix(SCHEME)
    t = np.linspace(0.0, 4000.0, 81)
    pops = pl.transient(m, start(), t)
    assert np.max(np.abs(pops.sum(axis=1) - 1.0)) < 1e-12
    for k in (0, 10, 80):
        assert np.allclose(pops[k], expm(m * t[k] * 1e-3) @ start(), atol=1e-12)
    # spin polarization builds up over tens of microseconds
    late = pl.transient(m, start(), [50_000.0])[0]
    assert np.allclose(late, pl.steady_state(m), atol=1e-9)


def test_transient_rejects_unnormalized_start():
    with pytest.raises(InputError):
        pl.transient(pl.build_rate_matrix(SCHEME), np.ones(8), [0.0])


def test_integrated_populations_matches_quadrature():
    m = pl.build_rate_matrix(SCHEME)
    direct = pl.integrated_populations(m, start(), 300.0)
    ref, _ = quad_vec(lambda t: expm(m * t) @ start(), 0.0, 0.3, epsabs=1e-13)
    assert np.allclose(direct, ref, atol=1e-11)


def test_disconnected_scheme_raises_convergence_error():
    s = pl.LevelScheme(pump=10.0, radiative=90.0, upper_isc_pm=0.0, upper_isc_0=0.0, mw_rate=0.0)
    # without crossing the three spin loops never exchange population
    with pytest.raises(ConvergenceError, match="kernel has dimension 3"):
        pl.steady_state(pl.build_rate_matrix(s))


def test_pulsed_contrast_and_polarization():
    res = pl.odmr_contrast(SCHEME)
    assert res.contrast == pytest.approx(0.327, abs=1e-3)
    assert 0.15 <= res.contrast <= 0.35
    assert pl.ground_polarization(SCHEME) == pytest.approx(0.997, abs=1e-3)
    assert pl.cw_contrast(SCHEME, 10.0) == pytest.approx(0.2365, abs=1e-3)


def test_contrast_invariant_under_time_rescaling():
    base = pl.odmr_contrast(SCHEME, 300.0).contrast
    faster = pl.odmr_contrast(SCHEME.scaled(3.0), 100.0).contrast
    assert faster == pytest.approx(base, rel=1e-9)


def test_spin_blind_crossing_gives_no_contrast():
    s = pl.LevelScheme.from_shelf(pl.SHELF_LIFETIME_300K_NS, pl.LOWER_SELECTIVITY_300K, upper_isc_0=pl.UPPER_ISC_PM_MHZ)
    assert abs(pl.odmr_contrast(s).contrast) < 1e-10


def test_auger_fraction():
    assert pl.auger_fraction() == pytest.approx(1 / (1 + 800e-12 / 0.5e-6))
    assert pl.auger_fraction() == pytest.approx(0.998, abs=1e-3)
    with pytest.raises(InputError):
        pl.auger_fraction(0.0, 1.0)


def test_photoionization_adds_a_level_and_conserves():
    s = pl.LevelScheme(**{**SCHEME.__dict__, "ionization": 0.05, "recapture": 0.5})
    assert s.levels[-1] == "nv0"
    m = pl.build_rate_matrix(s)
    assert m.shape == (9, 9)
    p = pl.steady_state(m)
    assert p.sum() == pytest.approx(1.0)
    res = pl.pdmr_observables(s, 10.0)
    assert res.photocurrent_on < res.photocurrent_off
    assert 0 < res.contrast < 1
    assert pl.pdmr_observables(SCHEME, 10.0).photocurrent_off == 0.0


def test_negative_rates_rejected():
    with pytest.raises(InputError):
        pl.LevelScheme(pump=-1.0)
    with pytest.raises(InputError):
        pl.LevelScheme.from_shelf(100.0, 1.5)
