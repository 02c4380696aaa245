"""Ground-state (triplet) spin Hamiltonian and derived quantities.

All energies are in MHz.  Vectors and tensors are expressed in the NV frame
(z along the defect axis [111], x along [-1-12], y along [1-10]) unless a
function states otherwise.  Fields: B in mT, E in V/cm, strain
dimensionless, stress in GPa (negative = compressive).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize, stats

from .core import (
    BOHR_MHZ_PER_T,
    MHZ_PER_KELVIN,
    ConvergenceError,
    InputError,
    anticommutator,
    diagonalize,
    embed,
    spin_matrices,
)

# Spin-strain couplings (MHz per unit strain) and spin-stress couplings
# (MHz/GPa), keyed by their Voigt-style index.
STRAIN_COUPLINGS = {"h43": 2300.0, "h41": -6420.0, "h25": -2600.0, "h26": -2830.0, "h15": 5700.0, "h16": 19660.0}
STRESS_COUPLINGS = {"g43": 2.4, "g41": -5.17, "g25": -2.17, "g26": -2.58, "g15": 3.6, "g16": 18.98}

DIAMOND_STIFFNESS_GPA = (1076.0, 125.0, 576.0)  # C11, C12, C44

# Rows are the NV-frame axes written in cubic-crystal coordinates.  The sign
# of x matters: a half turn about [111] is not a symmetry of the cubic
# elastic tensor, and this orientation is the one for which the tabulated
# strain and stress couplings are related by the compliance.
NV_AXES = np.array(
    [
        [-1.0, -1.0, 2.0] / np.sqrt(6.0),
        [1.0, -1.0, 0.0] / np.sqrt(2.0),
        [1.0, 1.0, 1.0] / np.sqrt(3.0),
    ]
)


@dataclass(frozen=True)
class Nucleus:
    """A nuclear spin coupled to the electron spin.

    ``a_parallel``/``a_perp`` describe an axial hyperfine tensor along the NV
    axis; pass ``a_tensor`` for anything else.  ``gamma`` is the nuclear
    gyromagnetic ratio in MHz/T and ``quadrupole`` the axial C_Q in MHz.
    """

    label: str
    spin: float
    a_parallel: float = 0.0
    a_perp: float = 0.0
    quadrupole: float = 0.0
    gamma: float = 0.0
    a_tensor: tuple | None = None

    def hyperfine_tensor(self) -> np.ndarray:
        if self.a_tensor is not None:
            a = np.asarray(self.a_tensor, dtype=float)
            if a.shape != (3, 3):
                raise InputError(f"hyperfine tensor for {self.label} must be 3x3")
            return a
        return np.diag([self.a_perp, self.a_perp, self.a_parallel])


NITROGEN_14 = Nucleus("14N", 1.0, a_parallel=-2.14, a_perp=-2.70, quadrupole=-4.945, gamma=3.077)
NITROGEN_15 = Nucleus("15N", 0.5, a_parallel=3.03, a_perp=3.65, gamma=-4.316)
CARBON_13_GAMMA = 10.705

NUCLEUS_PRESETS = {"14N": NITROGEN_14, "15N": NITROGEN_15}


@dataclass(frozen=True)
class GroundStateParams:
    zfs: float = 2870.0
    g_tensor: tuple = ((2.0029, 0.0, 0.0), (0.0, 2.0029, 0.0), (0.0, 0.0, 2.0031))
    nuclei: tuple[Nucleus, ...] = ()
    # electric-dipole couplings in Hz cm/V
    d_parallel: float = 0.35
    d_perp: float = 17.0
    d_perp_prime: float = 17.0
    strain_couplings: dict = field(default_factory=lambda: dict(STRAIN_COUPLINGS))
    stress_couplings: dict = field(default_factory=lambda: dict(STRESS_COUPLINGS))

    def with_nuclei(self, *nuclei: Nucleus) -> "GroundStateParams":
        return replace(self, nuclei=tuple(nuclei))


@dataclass(frozen=True)
class Fields:
    """External perturbations in the NV frame.  ``None`` means absent."""

    magnetic: tuple | None = None  # mT
    electric: tuple | None = None  # V/cm
    strain: tuple | None = None  # 3x3, dimensionless
    stress: tuple | None = None  # 3x3, GPa

    def __post_init__(self):
        if self.strain is not None and self.stress is not None:
            raise InputError("set either strain or stress, not both")


@dataclass(frozen=True)
class GroundHamiltonian:
    matrix: np.ndarray
    dims: tuple[int, ...]

    def electron_operator(self, op: np.ndarray) -> np.ndarray:
        return embed(op, 0, list(self.dims))


def _vector(value, name: str) -> np.ndarray:
    v = np.asarray(value, dtype=float)
    if v.shape != (3,):
        raise InputError(f"{name} must be a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} contains non-finite entries")
    return v


def _tensor(value, name: str) -> np.ndarray:
    t = np.asarray(value, dtype=float)
    if t.shape != (3, 3):
        raise InputError(f"{name} must be a 3x3 tensor, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise InputError(f"{name} contains non-finite entries")
    if np.max(np.abs(t - t.T)) > 1e-12 * max(1.0, np.max(np.abs(t))):
        raise InputError(f"{name} must be symmetric")
    return t


def spin_strain_channels(eps: np.ndarray, coeffs: dict, prefix: str = "h") -> np.ndarray:
    """Coefficients of the five spin operators driven by a strain or stress.

    Returns ``(M0, N1x, N1y, M2x, M2y)`` multiplying ``Sz^2``, ``{Sx,Sz}``,
    ``{Sy,Sz}``, ``Sy^2 - Sx^2`` and ``{Sx,Sy}``.  ``coeffs`` uses keys
    ``<prefix>43`` etc.
    """
    c = {k[len(prefix):]: float(v) for k, v in coeffs.items()}
    exx, eyy, ezz = eps[0, 0], eps[1, 1], eps[2, 2]
    eyz, ezx, exy = eps[1, 2], eps[2, 0], eps[0, 1]
    m0 = c["41"] * (exx + eyy) + c["43"] * ezz
    n1x = 0.5 * (c["26"] * ezx - 0.5 * c["25"] * (exx - eyy))
    n1y = 0.5 * (c["26"] * eyz + c["25"] * exy)
    m2x = 0.5 * (c["16"] * ezx - 0.5 * c["15"] * (exx - eyy))
    m2y = 0.5 * (c["16"] * eyz + c["15"] * exy)
    return np.array([m0, n1x, n1y, m2x, m2y])


def _channel_operators(sx, sy, sz):
    return (
        sz @ sz,
        anticommutator(sx, sz),
        anticommutator(sy, sz),
        sy @ sy - sx @ sx,
        anticommutator(sx, sy),
    )


def electron_hamiltonian(params: GroundStateParams, fields: Fields | None = None) -> np.ndarray:
    """The 3x3 electron-only part: fine structure, Zeeman, electric, strain."""
    fields = fields or Fields()
    sx, sy, sz = spin_matrices(1)
    h = params.zfs * (sz @ sz - (2.0 / 3.0) * np.eye(3))
    if fields.magnetic is not None:
        b_t = _vector(fields.magnetic, "magnetic field") * 1e-3
        g = np.asarray(params.g_tensor, dtype=float)
        gb = g @ b_t
        h = h + BOHR_MHZ_PER_T * (gb[0] * sx + gb[1] * sy + gb[2] * sz)
    if fields.electric is not None:
        ex, ey, ez = _vector(fields.electric, "electric field") * 1e-6  # Hz -> MHz after d
        h = h + params.d_parallel * ez * (sz @ sz)
        h = h + params.d_perp_prime * (ex * anticommutator(sx, sz) + ey * anticommutator(sy, sz))
        h = h - params.d_perp * ex * (sx @ sx - sy @ sy) + params.d_perp * ey * anticommutator(sx, sy)
    ops = _channel_operators(sx, sy, sz)
    if fields.strain is not None:
        ch = spin_strain_channels(_tensor(fields.strain, "strain"), params.strain_couplings, "h")
        h = h + sum(c * o for c, o in zip(ch, ops))
    if fields.stress is not None:
        ch = spin_strain_channels(_tensor(fields.stress, "stress"), params.stress_couplings, "g")
        h = h + sum(c * o for c, o in zip(ch, ops))
    return h


def build_ground_hamiltonian(params: GroundStateParams, fields: Fields | None = None) -> GroundHamiltonian:
    """Full electron x nuclei Hamiltonian in MHz.

    The product basis is electron first, then nuclei in the order given,
    each factor with descending ``m``.
    """
    fields = fields or Fields()
    dims = [3] + [int(round(2 * n.spin + 1)) for n in params.nuclei]
    h = embed(electron_hamiltonian(params, fields), 0, dims)
    s_ops = [embed(op, 0, dims) for op in spin_matrices(1)]
    b_t = None if fields.magnetic is None else _vector(fields.magnetic, "magnetic field") * 1e-3
    for k, nuc in enumerate(params.nuclei, start=1):
        i_ops = [embed(op, k, dims) for op in spin_matrices(nuc.spin)]
        a = nuc.hyperfine_tensor()
        for p in range(3):
            for q in range(3):
                if a[p, q] != 0.0:
                    h = h + a[p, q] * s_ops[p] @ i_ops[q]
        if nuc.quadrupole and nuc.spin >= 1:
            h = h + nuc.quadrupole * i_ops[2] @ i_ops[2]
        if b_t is not None and nuc.gamma:
            h = h - nuc.gamma * sum(b_t[j] * i_ops[j] for j in range(3))
    return GroundHamiltonian(h, tuple(dims))


@dataclass(frozen=True)
class Transitions:
    frequencies: np.ndarray  # MHz
    weights: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def odmr_transitions(ham: GroundHamiltonian, relative_threshold: float = 1e-3) -> Transitions:
    """Magnetic-dipole allowed transitions between eigenstates.

    The weight of ``i -> f`` is ``|<f|Sx|i>|^2 + |<f|Sy|i>|^2`` with the
    electron operators embedded in the full space.  Lines weaker than
    ``relative_threshold`` times the strongest line are dropped.
    """
    eig = diagonalize(ham.matrix)
    sx, sy, _ = spin_matrices(1)
    vx = eig.vectors.conj().T @ ham.electron_operator(sx) @ eig.vectors
    vy = eig.vectors.conj().T @ ham.electron_operator(sy) @ eig.vectors
    w = np.abs(vx) ** 2 + np.abs(vy) ** 2
    lo, up = np.triu_indices(len(eig), k=1)
    freq = eig.values[up] - eig.values[lo]
    weight = w[up, lo]
    keep = weight > relative_threshold * max(weight.max(initial=0.0), 1e-300)
    order = np.argsort(freq[keep], kind="stable")
    return Transitions(freq[keep][order], weight[keep][order], lo[keep][order], up[keep][order])


def merge_lines(frequencies, weights, tol: float = 1e-6) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Group lines closer than ``tol`` MHz; returns centres, summed weights, multiplicities."""
    f = np.asarray(frequencies, dtype=float)
    w = np.asarray(weights, dtype=float)
    if f.size == 0:
        return f, w, np.zeros(0, dtype=int)
    order = np.argsort(f, kind="stable")
    f, w = f[order], w[order]
    groups = np.concatenate([[0], np.cumsum(np.diff(f) > tol)])
    n = groups[-1] + 1
    wsum = np.bincount(groups, w, n)
    centre = np.bincount(groups, w * f, n) / np.where(wsum > 0, wsum, 1)
    mult = np.bincount(groups, minlength=n)
    return centre, wsum, mult


def odmr_sweep(params: GroundStateParams, field_list, relative_threshold: float = 1e-3) -> list[Transitions]:
    """ODMR lines for each entry of a list of :class:`Fields` (independent points)."""
    return [odmr_transitions(build_ground_hamiltonian(params, f), relative_threshold) for f in field_list]


# --------------------------------------------------------------------------
# mechanics


def stiffness_voigt(c11: float, c12: float, c44: float) -> np.ndarray:
    c = np.zeros((6, 6))
    c[:3, :3] = c12
    np.fill_diagonal(c[:3, :3], c11)
    c[3, 3] = c[4, 4] = c[5, 5] = c44
    return c


_VOIGT = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)]


def _to_voigt(t: np.ndarray, engineering: bool) -> np.ndarray:
    shear = 2.0 if engineering else 1.0
    return np.array([t[i, j] * (1.0 if i == j else shear) for i, j in _VOIGT])


def _from_voigt(v: np.ndarray, engineering: bool) -> np.ndarray:
    shear = 0.5 if engineering else 1.0
    t = np.zeros((3, 3))
    for k, (i, j) in enumerate(_VOIGT):
        t[i, j] = t[j, i] = v[k] * (1.0 if i == j else shear)
    return t


def rotate_to_nv(t_cubic: np.ndarray) -> np.ndarray:
    return NV_AXES @ t_cubic @ NV_AXES.T


def rotate_to_cubic(t_nv: np.ndarray) -> np.ndarray:
    return NV_AXES.T @ t_nv @ NV_AXES


def stress_to_strain(stress, frame: str = "nv", stiffness=DIAMOND_STIFFNESS_GPA) -> np.ndarray:
    """Strain tensor (NV frame) produced by a stress tensor in GPa.

    ``frame`` names the frame of the input stress: ``"nv"`` or ``"cubic"``.
    Hooke's law is applied in the cubic frame through the Voigt compliance,
    with engineering shear strains halved on the way back to tensor form.
    """
    sigma = _tensor(stress, "stress")
    if frame not in ("nv", "cubic"):
        raise InputError(f"unknown frame {frame!r}; use 'nv' or 'cubic'")
    sigma_cubic = rotate_to_cubic(sigma) if frame == "nv" else sigma
    compliance = np.linalg.inv(stiffness_voigt(*stiffness))
    eps_cubic = _from_voigt(compliance @ _to_voigt(sigma_cubic, engineering=False), engineering=True)
    return rotate_to_nv(eps_cubic)


def convert_h_to_g(strain_couplings: dict | None = None, stiffness=DIAMOND_STIFFNESS_GPA) -> tuple[dict, float]:
    """Spin-stress couplings equivalent to a set of spin-strain couplings.

    For each unit NV-frame stress the strain is computed through the cubic
    compliance and its spin channels are evaluated with ``h``; the six ``g``
    values are then the least-squares solution that reproduces those channels
    directly from the stress.  Returns the ``g`` mapping and the largest
    channel residual (MHz/GPa), which is zero up to rounding when the
    compliance respects the defect symmetry.
    """
    h = dict(STRAIN_COUPLINGS if strain_couplings is None else strain_couplings)
    keys = ["43", "41", "25", "26", "15", "16"]
    rows, rhs = [], []
    for k in range(6):
        unit = _from_voigt(np.eye(6)[k], engineering=False)
        target = spin_strain_channels(stress_to_strain(unit, "nv", stiffness), h, "h")
        # channels are linear in g: probe each coefficient separately
        cols = [spin_strain_channels(unit, {f"g{key}": float(key == other) for key in keys}, "g") for other in keys]
        rows.append(np.column_stack(cols))
        rhs.append(target)
    a = np.vstack(rows)
    b = np.concatenate(rhs)
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    residual = float(np.max(np.abs(a @ sol - b)))
    return {f"g{key}": float(v) for key, v in zip(keys, sol)}, residual


def hybrid_stress_parameters(g: dict | None = None) -> dict:
    """The six coefficients of the cubic-frame stress Hamiltonian (MHz/GPa)."""
    g = dict(STRESS_COUPLINGS if g is None else g)
    r2 = np.sqrt(2.0)
    return {
        "a1": (2 * g["g41"] + g["g43"]) / 3,
        "a2": (-g["g41"] + g["g43"]) / 3,
        "b": (-g["g15"] + r2 * g["g16"]) / 12,
        "c": (-2 * g["g15"] - r2 * g["g16"]) / 12,
        "d": (-g["g25"] + r2 * g["g26"]) / 12,
        "e": (-2 * g["g25"] - r2 * g["g26"]) / 12,
    }


def hybrid_stress_channels(stress_cubic, coeffs: dict | None = None) -> np.ndarray:
    """Spin-operator coefficients from a stress given in the cubic frame.

    Returns ``(Mz, Nx, Ny, Mx, My)`` multiplying ``Sz^2``, ``{Sx,Sz}``,
    ``{Sy,Sz}``, ``-(Sx^2 - Sy^2)`` and ``{Sx,Sy}``.
    """
    s = _tensor(stress_cubic, "stress")
    p = hybrid_stress_parameters() if coeffs is None else coeffs
    xx, yy, zz = s[0, 0], s[1, 1], s[2, 2]
    yz, zx, xy = s[1, 2], s[2, 0], s[0, 1]
    r3 = np.sqrt(3.0)
    mz = p["a1"] * (xx + yy + zz) + 2 * p["a2"] * (yz + zx + xy)
    nx = p["d"] * (2 * zz - xx - yy) + p["e"] * (2 * xy - yz - zx)
    ny = r3 * (p["d"] * (xx - yy) + p["e"] * (yz - zx))
    mx = p["b"] * (2 * zz - xx - yy) + p["c"] * (2 * xy - yz - zx)
    my = r3 * (p["b"] * (xx - yy) + p["c"] * (yz - zx))
    return np.array([mz, nx, ny, mx, my])


# --------------------------------------------------------------------------
# analysis helpers


def d_tensor_from_hamiltonian(h_electron: np.ndarray) -> np.ndarray:
    """Traceless symmetric D with ``H = S.D.S + const`` for a 3x3 spin-1 block."""
    sx, sy, sz = spin_matrices(1)
    s = (sx, sy, sz)
    basis, index = [np.eye(3)], []
    for a in range(3):
        for b in range(a, 3):
            basis.append(s[a] @ s[b] + (s[b] @ s[a] if a != b else 0))
            index.append((a, b))
    a_mat = np.column_stack([m.ravel() for m in basis])
    sol, *_ = np.linalg.lstsq(a_mat, np.asarray(h_electron, dtype=complex).ravel(), rcond=None)
    # the identity column and Sx^2+Sy^2+Sz^2 = 2 make the split ambiguous;
    # fix it by removing the trace
    d = np.zeros((3, 3))
    for (a, b), v in zip(index, sol[1:].real):
        d[a, b] = d[b, a] = v
    return d - np.trace(d) / 3 * np.eye(3)


# (component of D, strain component, factor) recovering each strain coupling
_COUPLING_CONFIGS = {
    "h16": ((0, 1), (1, 2), 2.0),
    "h26": ((1, 2), (1, 2), 2.0),
    "h15": ((0, 1), (0, 1), 2.0),
    "h25": ((1, 2), (0, 1), 2.0),
    "h43": ((2, 2), (2, 2), 1.5),
    "h41": ((2, 2), (0, 0), 1.5),
}


def extract_coupling_constant(strain_values, d_tensors, coupling: str = "h16") -> tuple[float, float]:
    """Fit a spin-strain coupling from D tensors computed at several strains.

    ``strain_values`` are the amplitudes of the single strain component that
    was applied (for ``h16`` that is eps_yz); ``d_tensors`` the matching 3x3
    traceless D tensors in MHz.  Returns the coupling and its standard error.
    """
    if coupling not in _COUPLING_CONFIGS:
        raise InputError(f"unknown coupling {coupling!r}; choose from {sorted(_COUPLING_CONFIGS)}")
    comp, _, factor = _COUPLING_CONFIGS[coupling]
    x = np.asarray(strain_values, dtype=float)
    tensors = np.asarray(d_tensors, dtype=float)
    if tensors.shape != (len(x), 3, 3):
        raise InputError("need one 3x3 D tensor per strain value")
    if len(x) < 2 or np.ptp(x) == 0:
        raise InputError("degenerate abscissae: need at least two distinct strain values")
    y = tensors[:, comp[0], comp[1]]
    fit = stats.linregress(x, y)
    stderr = float(fit.stderr) if len(x) > 2 else 0.0
    return factor * float(fit.slope), factor * stderr


@dataclass(frozen=True)
class AnticrossingResult:
    field_mT: float
    gap_MHz: float
    rotation_rate_MHz: float


def find_level_anticrossing(
    params: GroundStateParams,
    axis=(0.0, 0.0, 1.0),
    window_mT: tuple[float, float] = (90.0, 115.0),
    samples: int = 801,
    tol_mT: float = 1e-4,
) -> AnticrossingResult:
    """Field magnitude along ``axis`` that minimises the smallest level gap.

    A coarse scan brackets the global minimum, golden-section search refines
    it.  The nuclear-spin rotation rate at the anticrossing is |A_perp|/sqrt(2)
    of the first nucleus with a transverse hyperfine term.
    """
    u = _vector(axis, "axis")
    u = u / np.linalg.norm(u)
    lo, hi = map(float, window_mT)
    if not hi > lo:
        raise InputError("window must be (low, high) with high > low")

    def gap(b):
        vals = np.linalg.eigvalsh(build_ground_hamiltonian(params, Fields(magnetic=tuple(b * u))).matrix)
        return float(np.min(np.diff(vals)))

    grid = np.linspace(lo, hi, samples)
    gaps = np.array([gap(b) for b in grid])
    k = int(np.argmin(gaps))
    if k == 0 or k == samples - 1:
        raise ConvergenceError(f"no gap minimum inside window {window_mT} mT")
    res = optimize.minimize_scalar(
        gap, bracket=(grid[k - 1], grid[k], grid[k + 1]), method="golden", tol=tol_mT / grid[k]
    )
    rate = 0.0
    for nuc in params.nuclei:
        a = nuc.hyperfine_tensor()
        a_perp = 0.5 * (a[0, 0] + a[1, 1])
        if a_perp:
            rate = abs(a_perp) / np.sqrt(2.0)
            break
    return AnticrossingResult(float(res.x), float(res.fun), rate)


def t1_one_phonon_rate(temperature_k, gamma0: float = 2.5e-5, zfs_mhz: float = 2870.0):
    """Direct-process spin-lattice rate (1/s): gamma0 * (1 + 3 n(D, T))."""
    t = np.asarray(temperature_k, dtype=float)
    if np.any(t < 0):
        raise InputError("temperature must be non-negative")
    with np.errstate(divide="ignore", over="ignore"):
        x = zfs_mhz / (MHZ_PER_KELVIN * t)
        occupation = np.where(t > 0, 1.0 / np.expm1(x), 0.0)
    out = gamma0 * (1.0 + 3.0 * occupation)
    return float(out) if out.ndim == 0 else out
