"""Classical rate equations for the optical spin-polarization cycle.

Levels (in order): ``g0, g+1, g-1, e0, e+1, e-1, sA1, sE`` and, when
photoionization is enabled, ``nv0``.  Rates are in MHz (1/us), times in
ns.  The generator ``M`` acts on column population vectors, ``dp/dt = M p``,
so each column sums to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm, null_space

from .core import ConvergenceError, InputError

LEVELS = ("g0", "g+1", "g-1", "e0", "e+1", "e-1", "sA1", "sE")
IONIZED = "nv0"
GROUND = (0, 1, 2)
EXCITED = (3, 4, 5)

RADIATIVE_RATE_MHZ = 1e3 / 12.0  # 12 ns optical lifetime
SINGLET_DECAY_MHZ = 1e6 / 100.0  # 100 ps 1A1 -> 1E
AUGER_TIME_PS = 800.0
DIRECT_IONIZATION_TIME_US = 0.5
# Room-temperature shelf from the calibrated singlet model (rates.reference_shelf_model().at(300)).
SHELF_LIFETIME_300K_NS = 169.2
LOWER_SELECTIVITY_300K = 0.829  # Gamma_z / (Gamma_z + Gamma_perp)
UPPER_ISC_PM_MHZ = 30.0


def auger_fraction(auger_ps: float = AUGER_TIME_PS, direct_us: float = DIRECT_IONIZATION_TIME_US) -> float:
    """Share of ionization events that proceed through the Auger channel."""
    if auger_ps <= 0 or direct_us <= 0:
        raise InputError("channel times must be positive")
    ka, kd = 1.0 / (auger_ps * 1e-12), 1.0 / (direct_us * 1e-6)
    return ka / (ka + kd)


@dataclass(frozen=True)
class LevelScheme:
    pump: float = 0.1 * RADIATIVE_RATE_MHZ
    radiative: float = RADIATIVE_RATE_MHZ
    upper_isc_pm: float = UPPER_ISC_PM_MHZ
    upper_isc_0: float | None = None  # defaults to upper_isc_pm / 100
    singlet_decay: float = SINGLET_DECAY_MHZ
    lower_z: float = LOWER_SELECTIVITY_300K * 1e3 / SHELF_LIFETIME_300K_NS
    lower_perp: float = (1 - LOWER_SELECTIVITY_300K) * 1e3 / SHELF_LIFETIME_300K_NS
    mw_rate: float = 0.0  # incoherent g0 <-> g-1 mixing
    ionization: float = 0.0  # kappa: ionization rate per unit pump rate from each excited level
    recapture: float = 0.0  # kappa_r: return from nv0 per unit pump rate, spread evenly over the ground triplet

    def __post_init__(self):
        for name, val in self.__dict__.items():
            if val is not None and val < 0:
                raise InputError(f"rate {name} must be non-negative, got {val}")

    @property
    def upper_0(self) -> float:
        return self.upper_isc_pm / 100.0 if self.upper_isc_0 is None else self.upper_isc_0

    @property
    def has_ionization(self) -> bool:
        return self.ionization > 0 or self.recapture > 0

    @property
    def levels(self) -> tuple[str, ...]:
        return LEVELS + ((IONIZED,) if self.has_ionization else ())

    @classmethod
    def from_shelf(cls, lifetime_ns: float, selectivity: float, **kw) -> "LevelScheme":
        """Scheme whose lower branch empties the shelf in ``lifetime_ns`` with the given ms = 0 share."""
        if lifetime_ns <= 0 or not 0 <= selectivity <= 1:
            raise InputError("lifetime must be positive and selectivity in [0, 1]")
        return cls(lower_z=selectivity * 1e3 / lifetime_ns, lower_perp=(1 - selectivity) * 1e3 / lifetime_ns, **kw)

    def scaled(self, factor: float) -> "LevelScheme":
        """Every rate multiplied by ``factor`` (a uniform change of time unit)."""
        out = {k: (v * factor if v is not None and k not in ("ionization", "recapture") else v) for k, v in self.__dict__.items()}
        return replace(self, **out)


def build_rate_matrix(s: LevelScheme) -> np.ndarray:
    n = len(s.levels)
    m = np.zeros((n, n))

    def link(src: int, dst: int, rate: float):
        m[dst, src] += rate
        m[src, src] -= rate

    for k in range(3):
        link(GROUND[k], EXCITED[k], s.pump)
        link(EXCITED[k], GROUND[k], s.radiative)
    link(3, 6, s.upper_0)
    link(4, 6, s.upper_isc_pm)
    link(5, 6, s.upper_isc_pm)
    link(6, 7, s.singlet_decay)
    link(7, 0, s.lower_z)
    link(7, 1, 0.5 * s.lower_perp)
    link(7, 2, 0.5 * s.lower_perp)
    link(0, 2, s.mw_rate)
    link(2, 0, s.mw_rate)
    if s.has_ionization:
        for k in EXCITED:
            link(k, 8, s.ionization * s.pump)
        for k in GROUND:
            link(8, k, s.recapture * s.pump / 3.0)
    check_connected(m)
    return m


def check_connected(m: np.ndarray) -> None:
    """Raise if some level neither receives nor loses population."""
    off = m - np.diag(np.diag(m))
    isolated = [k for k in range(len(m)) if not off[:, k].any() and not off[k, :].any()]
    if isolated and np.any(off):
        raise InputError(f"disconnected levels at indices {isolated}")


def steady_state(m: np.ndarray) -> np.ndarray:
    """Normalized kernel vector of the generator."""
    ker = null_space(m, rcond=1e-12)  # relative to the largest singular value
    if ker.shape[1] != 1:
        raise ConvergenceError(f"generator kernel has dimension {ker.shape[1]}; the level scheme is not connected")
    p = ker[:, 0] / ker[:, 0].sum()
    if p.min() < -1e-12:
        raise ConvergenceError(f"steady state has negative population {p.min():.3e}")
    return np.clip(p, 0.0, None) / np.clip(p, 0.0, None).sum()


def transient(m: np.ndarray, p0, times_ns) -> np.ndarray:
    """Populations ``exp(M t) p0`` on a time grid, one row per time.

    Uses the eigendecomposition of ``M`` when it is well conditioned and
    falls back to the matrix exponential otherwise.
    """
    p0 = np.asarray(p0, dtype=float)
    t = np.asarray(times_ns, dtype=float) * 1e-3  # us
    if abs(p0.sum() - 1.0) > 1e-12:
        raise InputError("initial populations must sum to one")
    vals, vecs = np.linalg.eig(m)
    if np.linalg.cond(vecs) < 1e6:
        coef = np.linalg.solve(vecs, p0)
        out = np.real((vecs[None, :, :] * (np.exp(np.outer(t, vals)) * coef)[:, None, :]).sum(axis=2))
    else:
        out = np.array([expm(m * tk) @ p0 for tk in t])
    return out


def pl_signal(populations: np.ndarray, scheme: LevelScheme) -> np.ndarray:
    """Photon emission rate ``Gamma_rad * sum(excited)`` in MHz."""
    return scheme.radiative * np.asarray(populations)[..., list(EXCITED)].sum(axis=-1)


def integrated_populations(m: np.ndarray, p0, window_ns: float) -> np.ndarray:
    """``int_0^T exp(M t) p0 dt`` (in us) via the block-exponential identity."""
    n = len(m)
    big = np.zeros((n + 1, n + 1))
    big[:n, :n] = m
    big[:n, n] = p0
    return expm(big * window_ns * 1e-3)[:n, n]


def relaxed_ground_state(s: LevelScheme) -> np.ndarray:
    """Populations after the pump is switched off and the shelf has emptied."""
    lit = build_rate_matrix(s)
    p = steady_state(lit)
    dark = build_rate_matrix(replace(s, pump=0.0, mw_rate=0.0))
    # every level but the ground triplet (and nv0, which needs light) decays
    p = expm(dark * 1e3) @ p  # 1 ms in us
    return p


@dataclass(frozen=True)
class ContrastResult:
    contrast: float
    pl_reference: float
    pl_flipped: float
    polarization: float  # g0 share of the ground triplet before readout


def odmr_contrast(s: LevelScheme, window_ns: float = 300.0) -> ContrastResult:
    """Pulsed readout contrast.

    The reference run starts from the optically polarized ground state; the
    second run has g0 and g-1 swapped by a resonant pi pulse.  PL is
    integrated for ``window_ns`` after the pump is switched back on.
    """
    p_ref = relaxed_ground_state(replace(s, mw_rate=0.0))
    p_flip = p_ref.copy()
    p_flip[[0, 2]] = p_flip[[2, 0]]
    m = build_rate_matrix(replace(s, mw_rate=0.0))
    pl_ref = float(pl_signal(integrated_populations(m, p_ref, window_ns), s))
    pl_flip = float(pl_signal(integrated_populations(m, p_flip, window_ns), s))
    if pl_ref <= 0:
        raise InputError("reference PL is zero; the pump rate must be positive")
    g = p_ref[list(GROUND)]
    return ContrastResult((pl_ref - pl_flip) / pl_ref, pl_ref, pl_flip, float(g[0] / g.sum()))


def cw_contrast(s: LevelScheme, mw_rate: float) -> float:
    """Steady-state PL drop when the g0 <-> g-1 mixing is switched on."""
    off = pl_signal(steady_state(build_rate_matrix(replace(s, mw_rate=0.0))), s)
    on = pl_signal(steady_state(build_rate_matrix(replace(s, mw_rate=mw_rate))), s)
    if off <= 0:
        raise InputError("PL is zero without microwaves")
    return float((off - on) / off)


def ground_polarization(s: LevelScheme) -> float:
    """Steady-state g0 share of the ground triplet under continuous pumping."""
    p = steady_state(build_rate_matrix(s))
    return float(p[0] / p[list(GROUND)].sum())


@dataclass(frozen=True)
class PDMRResult:
    photocurrent_off: float  # ionization events per us
    photocurrent_on: float
    contrast: float
    auger_fraction: float


def pdmr_observables(s: LevelScheme, mw_rate: float, auger_ps: float = AUGER_TIME_PS,
                     direct_us: float = DIRECT_IONIZATION_TIME_US) -> PDMRResult:
    """Steady ionization flux with and without microwave mixing."""

    def flux(scheme):
        if scheme.ionization == 0:
            return 0.0
        p = steady_state(build_rate_matrix(scheme))
        return scheme.ionization * scheme.pump * float(p[list(EXCITED)].sum())

    off = flux(replace(s, mw_rate=0.0))
    on = flux(replace(s, mw_rate=mw_rate))
    return PDMRResult(off, on, (off - on) / off if off > 0 else 0.0, auger_fraction(auger_ps, direct_us))
