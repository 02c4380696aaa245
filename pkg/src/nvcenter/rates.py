"""Intersystem-crossing rates between the triplet and singlet manifolds.

Upper branch (3E -> 1A1): the three spin-orbit levels A1, E1,2 and A2 of the
vibronic triplet couple to the singlet through the electronic A1 content of
each vibronic component, weighted by the phonon overlap density evaluated
at ``Delta - n hbar omega`` for a component carrying ``n`` quanta.

Lower branch (1E -> 3A2): each vibronic level of the singlet doublet decays
to ms = 0 through its 1A1 admixture (axial spin-orbit) and to ms = +-1
through its 1E' admixture (perpendicular spin-orbit).

Spin-orbit strengths are frequencies in MHz (lambda/h); F is in 1/meV and
the returned rates are in MHz (events per microsecond).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HBAR, J_PER_MEV, MEV_PER_KELVIN, PLANCK, InputError
from .lineshape import PhononMode, SpectralFunction, spectral_function
from .vibronic import (
    TRIPLET_HW,
    SingletParams,
    TripletISCCoefficients,
    reference_singlet_params,
    shell_weights,
    solve_singlet,
)

# Phonon-overlap density used by both branches: one accepting A1 mode with a
# wide Gaussian that stands in for the dense bath of the real crystal.
ISC_ACCEPTING_HW = 65.0
ISC_ACCEPTING_S = 0.3
ISC_SIGMA = 40.0
ISC_GAP_MEV = 400.0
LAMBDA_PERP_AB_INITIO_MHZ = 56_300.0
LAMBDA_RATIO = 1.2  # lambda_perp / lambda_z for the lower branch
SINGLET_MIXING_C2 = 0.9
SHELF_LIFETIME_0K_NS = 371.0


def isc_spectral_function(hw: float = ISC_ACCEPTING_HW, huang_rhys: float = ISC_ACCEPTING_S,
                          sigma: float = ISC_SIGMA) -> SpectralFunction:
    return spectral_function([PhononMode(hw, huang_rhys)], sigma)


def _per_mhz(prefactor_si: float) -> float:
    """Convert ``prefactor * F`` with F in 1/meV to MHz."""
    return prefactor_si / J_PER_MEV * 1e-6


def _check_gap(sf: SpectralFunction, gap: float, hw: float, quanta: np.ndarray):
    args = gap - quanta * hw
    hi = sf.sticks.max() + 8 * sf.sigma
    if np.any(args > hi) or np.all(args < -8 * sf.sigma):
        raise InputError(f"gap {gap} meV lies outside the support of the phonon-overlap density")


# --------------------------------------------------------------------------
# upper branch


@dataclass(frozen=True)
class UpperBranchRates:
    a1: float
    e12: float
    a2: float

    def as_dict(self) -> dict[str, float]:
        return {"Gamma_A1": self.a1, "Gamma_E12": self.e12, "Gamma_A2": self.a2}


def quoted_triplet_coefficients(f1: float = 1e-3, quanta: tuple[int, int, int] = (0, 0, 0)) -> TripletISCCoefficients:
    """Leading coefficients quoted for the ab initio triplet solution.

    Only the first term of each series is known and ``f1`` is an upper bound.
    By default all three sit on a common shell, so the rates compare the
    electronic weights under one overlap factor; pass ``quanta=(0, 1, 3)``
    to place them on the lowest shells that carry A1, E and A2 vibrations.
    """
    one = np.ones(1)
    nc, nd, nf = (np.full(1, q, dtype=int) for q in quanta)
    return TripletISCCoefficients(0.578 * one, nc, 0.331 * one, nd, f1 * one, nf)


def upper_branch_rates(coeffs: TripletISCCoefficients, lambda_perp_mhz: float = LAMBDA_PERP_AB_INITIO_MHZ,
                       gap_mev: float = ISC_GAP_MEV, hw: float = TRIPLET_HW,
                       sf: SpectralFunction | None = None) -> UpperBranchRates:
    """``Gamma_X = 4 pi hbar lambda^2 sum_i w_i F(Delta - n_i hbar omega)``, lambda in rad/s.

    Weights: ``c_i^2`` for A1, ``d_i^2 / 2`` for E1,2 and ``f_i^2`` for A2.
    """
    if gap_mev <= 0:
        raise InputError("gap must be positive")
    sf = isc_spectral_function() if sf is None else sf
    _check_gap(sf, gap_mev, hw, np.concatenate([coeffs.c_quanta, coeffs.d_quanta]))
    pref = _per_mhz(4 * np.pi * HBAR * (2 * np.pi * lambda_perp_mhz * 1e6) ** 2)

    def channel(amp, quanta, scale=1.0):
        if len(amp) == 0:
            return 0.0
        return pref * scale * float(np.sum(np.abs(amp) ** 2 * sf(gap_mev - np.asarray(quanta) * hw)))

    return UpperBranchRates(channel(coeffs.c, coeffs.c_quanta), channel(coeffs.d, coeffs.d_quanta, 0.5),
                            channel(coeffs.f, coeffs.f_quanta))


# --------------------------------------------------------------------------
# lower branch


@dataclass(frozen=True)
class LowerBranchInputs:
    lambda_z_mhz: float = 1.0  # absolute scale set by calibrate_lower_branch
    lambda_ratio: float = LAMBDA_RATIO
    c_squared: float = SINGLET_MIXING_C2
    gap_mev: float = ISC_GAP_MEV

    def __post_init__(self):
        if not 0 <= self.c_squared <= 1:
            raise InputError("C^2 must lie in [0, 1]")
        if self.gap_mev <= 0 or self.lambda_z_mhz < 0 or self.lambda_ratio < 0:
            raise InputError("gap must be positive and spin-orbit strengths non-negative")

    @property
    def lambda_perp_mhz(self) -> float:
        return self.lambda_ratio * self.lambda_z_mhz


@dataclass(frozen=True)
class LevelRates:
    """Decay channels of one vibronic level of the singlet doublet (MHz)."""

    energy: float  # meV above the vibronic ground level
    label: str
    gamma_z: float
    gamma_pm: float
    gamma_mp: float

    @property
    def total(self) -> float:
        return self.gamma_z + self.gamma_pm + self.gamma_mp

    @property
    def gamma_perp(self) -> float:
        return self.gamma_pm + self.gamma_mp

    def scaled(self, factor: float) -> "LevelRates":
        return LevelRates(self.energy, self.label, factor * self.gamma_z, factor * self.gamma_pm, factor * self.gamma_mp)


def lower_branch_rates(weights: dict[str, np.ndarray], inputs: LowerBranchInputs, hw: float,
                       level_energy: float = 0.0, sf: SpectralFunction | None = None,
                       label: str = "E") -> LevelRates:
    """Rates out of one singlet vibronic level.

    ``weights`` holds per-shell weights of the level (see
    :func:`nvcenter.vibronic.shell_weights`): ``"A1"`` feeds ms = 0,
    ``"E_A"`` (doublet with A-type vibrations) and ``"E_E"`` (doublet with
    E-type vibrations) feed ms = +-1.  The accepted energy for shell ``n`` is
    ``Sigma + level_energy - n hbar omega``.
    """
    sf = isc_spectral_function() if sf is None else sf
    n = np.arange(len(weights["A1"]))
    _check_gap(sf, inputs.gap_mev + level_energy, hw, n)
    dens = sf(inputs.gap_mev + level_energy - n * hw)
    golden = 2 * np.pi / HBAR
    hz = _per_mhz(golden * (PLANCK * inputs.lambda_z_mhz * 1e6) ** 2)
    hp = _per_mhz(golden * (PLANCK * inputs.lambda_perp_mhz * 1e6) ** 2)
    c2 = inputs.c_squared
    return LevelRates(
        level_energy,
        label,
        c2 * 4 * hz * float(weights["A1"] @ dens),
        (1 - c2) * hp * float(weights["E_A"] @ dens),
        (1 - c2) * hp * float(weights["E_E"] @ dens),
    )


def singlet_level_rates(params: SingletParams, inputs: LowerBranchInputs, n_max: int = 24,
                        max_energy_mev: float = 250.0, sf: SpectralFunction | None = None) -> list[LevelRates]:
    """Per-level rates for every singlet vibronic state below ``max_energy_mev``.

    Degenerate partners are listed separately so that a Boltzmann sum over
    the list counts each level with its degeneracy.
    """
    sf = isc_spectral_function() if sf is None else sf
    sol = solve_singlet(params, n_max, n_states=60)
    rel = sol.relative
    if rel[-1] < max_energy_mev:
        # widen the window until it covers the requested energy range
        k = 120
        while True:
            sol = solve_singlet(params, n_max, n_states=k)
            rel = sol.relative
            if rel[-1] >= max_energy_mev or k >= sol.basis.dim * 3:
                break
            k *= 2
    out = []
    for k in np.flatnonzero(rel <= max_energy_mev):
        out.append(lower_branch_rates(shell_weights(sol, int(k)), inputs, params.hw, float(rel[k]), sf, sol.labels[k]))
    return out


@dataclass(frozen=True)
class ShelfLifetime:
    temperature: float
    lifetime_ns: float
    gamma_z: float
    gamma_perp: float

    @property
    def selectivity(self) -> float:
        """Branching toward ms = 0: ``Gamma_z / (Gamma_z + Gamma_perp)``."""
        return self.gamma_z / (self.gamma_z + self.gamma_perp)

    @property
    def ratio(self) -> float:
        return self.gamma_z / self.gamma_perp if self.gamma_perp > 0 else np.inf


def singlet_lifetime_vs_t(levels: list[LevelRates], temperature_k: float) -> ShelfLifetime:
    """Boltzmann-averaged decay of the singlet shelf at one temperature."""
    if not levels:
        raise InputError("empty level set")
    if temperature_k < 0:
        raise InputError("temperature must be non-negative")
    e = np.array([lv.energy for lv in levels])
    if temperature_k == 0:
        w = (e - e.min() <= 1e-6).astype(float)
    else:
        w = np.exp(-(e - e.min()) / (MEV_PER_KELVIN * temperature_k))
    w /= w.sum()
    gz = float(w @ [lv.gamma_z for lv in levels])
    gp = float(w @ [lv.gamma_perp for lv in levels])
    return ShelfLifetime(temperature_k, 1e3 / (gz + gp), gz, gp)


def calibrate_lower_branch(levels: list[LevelRates], inputs: LowerBranchInputs,
                           lifetime_0k_ns: float = SHELF_LIFETIME_0K_NS) -> tuple[list[LevelRates], LowerBranchInputs]:
    """Rescale the spin-orbit strengths (fixed ratio) so that tau(0 K) matches."""
    current = singlet_lifetime_vs_t(levels, 0.0).lifetime_ns
    factor = current / lifetime_0k_ns
    scaled = LowerBranchInputs(inputs.lambda_z_mhz * np.sqrt(factor), inputs.lambda_ratio, inputs.c_squared, inputs.gap_mev)
    return [lv.scaled(factor) for lv in levels], scaled


@dataclass(frozen=True)
class ShelfModel:
    params: SingletParams
    inputs: LowerBranchInputs
    levels: list[LevelRates]

    def at(self, temperature_k: float) -> ShelfLifetime:
        return singlet_lifetime_vs_t(self.levels, temperature_k)

    def curve(self, temperatures) -> list[ShelfLifetime]:
        return [self.at(float(t)) for t in temperatures]


def reference_shelf_model(lifetime_0k_ns: float = SHELF_LIFETIME_0K_NS, inputs: LowerBranchInputs | None = None,
                      n_max: int = 24) -> ShelfModel:
    """Calibrated singlet preset with lambda_z fixed by the low-temperature lifetime."""
    params = reference_singlet_params(14.0, n_max)
    inputs = LowerBranchInputs() if inputs is None else inputs
    raw = singlet_level_rates(params, inputs, n_max)
    levels, scaled = calibrate_lower_branch(raw, inputs, lifetime_0k_ns)
    return ShelfModel(params, scaled, levels)
