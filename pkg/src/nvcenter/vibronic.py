"""Vibronic models of orbital doublets coupled to a doubly degenerate e mode.

Two Hamiltonians are solved by exact diagonalization in a truncated
two-dimensional oscillator basis ``|n, m>`` with ``n + m <= n_max``:

* the E x e Jahn-Teller problem of an orbital doublet (linear coupling F,
  quadratic coupling G);
* an A1 + E singlet manifold in which a pseudo-Jahn-Teller coupling K mixes
  the singlet with the doublet through the same mode, plus a weak linear
  Jahn-Teller coupling inside the doublet.

Energies are in meV.  Mode coordinates are dimensionless, ``X = (a + a^+)/sqrt(2)``.
Eigenstates are labelled A1, A2 or E from the threefold rotation and a
mirror operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import optimize
from scipy.linalg import eigh, expm

from .core import MHZ_PER_MEV, ConvergenceError, InputError

OMEGA = np.exp(2j * np.pi / 3)
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])


# --------------------------------------------------------------------------
# oscillator basis


@dataclass(frozen=True)
class BosonBasis:
    """Two-mode Fock basis truncated by total quanta."""

    n_max: int
    states: tuple[tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        if self.n_max < 1:
            raise InputError("n_max must be at least 1")
        st = tuple((n, s - n) for s in range(self.n_max + 1) for n in range(s, -1, -1))
        object.__setattr__(self, "states", st)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def shell(self) -> np.ndarray:
        return np.array([n + m for n, m in self.states])

    def lowering(self, extra: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Annihilation operators ``a_x, a_y`` (optionally in a larger basis)."""
        states = self.states if extra == 0 else BosonBasis(self.n_max + extra).states
        index = {s: i for i, s in enumerate(states)}
        d = len(states)
        ax = np.zeros((d, d))
        ay = np.zeros((d, d))
        for (n, m), i in index.items():
            if n > 0:
                ax[index[(n - 1, m)], i] = np.sqrt(n)
            if m > 0:
                ay[index[(n, m - 1)], i] = np.sqrt(m)
        return ax, ay

    def coordinates(self) -> dict[str, np.ndarray]:
        """``X, Y, X^2 - Y^2, XY + YX, N, L`` restricted to the basis.

        Quadratic operators are formed in a basis two shells larger and then
        truncated, so their matrix elements are exact.
        """
        d = self.dim
        ax, ay = self.lowering(extra=2)
        x = (ax + ax.T) / np.sqrt(2.0)
        y = (ay + ay.T) / np.sqrt(2.0)
        quad_a = (x @ x - y @ y)[:d, :d]
        quad_b = (x @ y + y @ x)[:d, :d]
        ax, ay = ax[:d, :d], ay[:d, :d]
        return {
            "X": x[:d, :d],
            "Y": y[:d, :d],
            "X2-Y2": quad_a,
            "XY+YX": quad_b,
            "N": np.diag(self.shell.astype(float)),
            "L": -1j * (ax.T @ ay - ay.T @ ax),
        }

    def mirror(self) -> np.ndarray:
        """Parity under Y -> -Y."""
        return np.diag([(-1.0) ** m for _, m in self.states])

    def rotation(self, angle: float = 2 * np.pi / 3) -> np.ndarray:
        return expm(-1j * angle * self.coordinates()["L"])

    def angular_basis(self) -> tuple[np.ndarray, np.ndarray]:
        """Unitary whose columns are L eigenstates, shell by shell, and their l."""
        lop = self.coordinates()["L"]
        shell = self.shell
        u = np.zeros((self.dim, self.dim), dtype=complex)
        lval = np.zeros(self.dim)
        for s in range(self.n_max + 1):
            ids = np.flatnonzero(shell == s)
            w, v = np.linalg.eigh(lop[np.ix_(ids, ids)])
            u[np.ix_(ids, ids)] = v
            lval[ids] = np.round(w)
        return u, lval

    def symmetry_functions(self) -> list["VibrationalFunction"]:
        """Symmetry-adapted oscillator functions grouped by shell and |l|.

        For |l| divisible by three the pair ``|l>, |-l>`` is recombined into
        mirror-even (A1) and mirror-odd (A2) functions; other |l| give the two
        rows of an E pair.
        """
        u, lval = self.angular_basis()
        mir = self.mirror()
        shell = self.shell
        out = []
        for s in range(self.n_max + 1):
            for la in range(s % 2, s + 1, 2):
                cols = [k for k in np.flatnonzero(shell == s) if abs(lval[k]) == la]
                block = u[:, cols]
                if la % 3 == 0:
                    pw, pv = np.linalg.eigh(block.conj().T @ mir @ block)
                    for par, vec in zip(pw, pv.T):
                        out.append(VibrationalFunction(s, la, "A1" if par > 0 else "A2", block @ vec))
                else:
                    for k in cols:
                        row = "E+" if (lval[k] % 3) == 1 else "E-"
                        out.append(VibrationalFunction(s, la, row, u[:, k]))
        return out


@dataclass(frozen=True)
class VibrationalFunction:
    quanta: int
    abs_l: int
    symmetry: str  # A1, A2, E+ or E-
    vector: np.ndarray


# --------------------------------------------------------------------------
# adiabatic potential energy surface of the E x e problem


def apes_lower(rho, phi, f: float, g: float, hw: float):
    """Lower adiabatic sheet (meV) in dimensionless polar coordinates."""
    rho = np.asarray(rho, dtype=float)
    rad = f**2 * rho**2 + g**2 * rho**4 + 2 * f * g * rho**3 * np.cos(3 * np.asarray(phi))
    return 0.5 * hw * rho**2 - np.sqrt(np.maximum(rad, 0.0))


def apes_extrema(f: float, g: float, hw: float) -> tuple[float, float]:
    """Jahn-Teller energy and barrier from radial minimisation of the APES.

    The three minima and three saddle points of the warped trough lie on the
    mirror lines, so the search runs along ``phi = 0`` and ``phi = pi/3``.
    """
    if not 0 <= 2 * abs(g) < hw:
        raise InputError("need 0 <= 2|G| < hbar*omega for a bound trough")
    rho_hi = 4.0 * abs(f) / (hw - 2 * abs(g)) + 1.0
    depths = []
    for phi in (0.0, np.pi / 3):
        res = optimize.minimize_scalar(lambda r: apes_lower(r, phi, f, g, hw), bounds=(0.0, rho_hi), method="bounded",
                                       options={"xatol": 1e-12})
        depths.append(float(res.fun))
    minimum, saddle = min(depths), max(depths)
    return -minimum, saddle - minimum


def couplings_from_apes(e_jt: float, barrier: float, hw: float) -> tuple[float, float]:
    """Linear and quadratic couplings (F, G) reproducing an APES shape.

    At fixed G the whole APES scales as F^2, so the barrier-to-depth ratio
    depends on G alone.  G is found by a one-dimensional root search with F = 1
    and F is then rescaled to the requested depth.
    """
    if e_jt <= 0 or barrier < 0 or barrier >= e_jt or hw <= 0:
        raise InputError("need E_JT > 0, 0 <= barrier < E_JT and hbar*omega > 0")
    if barrier == 0:
        return float(np.sqrt(2 * e_jt * hw)), 0.0

    def ratio(g):
        depth, bar = apes_extrema(1.0, g, hw)
        return bar / depth - barrier / e_jt

    g_hi = 0.5 * hw * (1 - 1e-9)
    # at G = 0 the trough is flat, so the ratio starts at -barrier/E_JT < 0
    g = optimize.brentq(ratio, 0.0, g_hi, xtol=1e-14 * hw, rtol=1e-14)
    depth_unit, _ = apes_extrema(1.0, g, hw)
    return float(np.sqrt(e_jt / depth_unit)), float(g)


# --------------------------------------------------------------------------
# E x e Jahn-Teller doublet


@dataclass(frozen=True)
class JahnTellerParams:
    hw: float = 77.6
    f: float = 0.0
    g: float = 0.0
    # which orbital row is even under the labelling mirror; "Ey" reproduces
    # the level sequence A1 below A2 for G > 0
    mirror_even_row: str = "Ey"

    @classmethod
    def from_apes(cls, e_jt: float, barrier: float, hw: float, **kw) -> "JahnTellerParams":
        f, g = couplings_from_apes(e_jt, barrier, hw)
        return cls(hw=hw, f=f, g=g, **kw)


TRIPLET_E_JT, TRIPLET_BARRIER, TRIPLET_HW = 42.0, 9.0, 77.6
TRIPLET_DJT = JahnTellerParams.from_apes(TRIPLET_E_JT, TRIPLET_BARRIER, TRIPLET_HW)


@dataclass(frozen=True)
class VibronicSolution:
    energies: np.ndarray  # meV, ascending, absolute
    vectors: np.ndarray  # columns
    labels: tuple[str, ...]
    basis: BosonBasis
    electronic: tuple[str, ...]  # names of the electronic factor states
    rotation: np.ndarray = field(repr=False)

    @property
    def relative(self) -> np.ndarray:
        return self.energies - self.energies[0]

    def levels(self, tol: float = 1e-6) -> list[tuple[float, str, int]]:
        """Distinct levels as ``(energy above ground, label, degeneracy)``."""
        out = []
        e = self.relative
        k = 0
        while k < len(e):
            j = k + 1
            while j < len(e) and e[j] - e[k] < tol:
                j += 1
            out.append((float(e[k]), self.labels[k], j - k))
            k = j
        return out

    def component(self, state: int, electronic: int) -> np.ndarray:
        d = self.basis.dim
        return self.vectors[electronic * d:(electronic + 1) * d, state]


def djt_hamiltonian(params: JahnTellerParams, basis: BosonBasis) -> np.ndarray:
    """Real symmetric E x e matrix in the basis ``{Ex, Ey} x |n, m>``."""
    c = basis.coordinates()
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    ident = np.eye(basis.dim)
    h = params.hw * np.kron(np.eye(2), c["N"] + ident)
    h += params.f * (np.kron(sz, c["X"]) + np.kron(sx, c["Y"]))
    h += params.g * (np.kron(sz, c["X2-Y2"]) - np.kron(sx, c["XY+YX"]))
    return h


def _symmetry_operators_djt(params: JahnTellerParams, basis: BosonBasis):
    rot = np.kron(expm(1j * 2 * np.pi / 3 * SIGMA_Y), basis.rotation())
    row_parity = np.diag([1.0, -1.0]) if params.mirror_even_row == "Ex" else np.diag([-1.0, 1.0])
    if params.mirror_even_row not in ("Ex", "Ey"):
        raise InputError("mirror_even_row must be 'Ex' or 'Ey'")
    mirror = np.kron(row_parity, basis.mirror())
    return rot, mirror


def _lowest_complete(h: np.ndarray, n_states: int, tol: float = 1e-6):
    """Lowest eigenpairs, dropping a trailing degenerate cluster that the
    requested count might have cut in half."""
    n = min(n_states + 2, h.shape[0])
    e, v = eigh(h, subset_by_index=[0, n - 1])
    if n == h.shape[0]:
        return e, v
    last = n - 1
    while last > 0 and e[last] - e[last - 1] < tol:
        last -= 1
    return e[:last], v[:, :last]


def label_states(energies, vectors, rotation, mirror, tol: float = 1e-6):
    """Symmetry labels and a symmetry-adapted basis inside degenerate clusters."""
    vecs = vectors.astype(complex).copy()
    labels: list[str] = []
    k = 0
    n = len(energies)
    while k < n:
        j = k + 1
        while j < n and energies[j] - energies[k] < tol:
            j += 1
        block = vecs[:, k:j]
        rot_blk = block.conj().T @ rotation @ block
        w, v = np.linalg.eig(rot_blk)
        block = block @ v
        # A-type (eigenvalue 1) vs E rows (omega, omega*)
        a_mask = np.abs(w - 1.0) < 1e-4
        out_vecs, out_labels = [], []
        if a_mask.any():
            a_blk = block[:, a_mask]
            q, _ = np.linalg.qr(a_blk)
            pw, pv = np.linalg.eigh(q.conj().T @ mirror @ q)
            for par, vec in zip(pw, pv.T):
                out_vecs.append(q @ vec)
                out_labels.append("A1" if par > 0 else "A2")
        e_cols = block[:, ~a_mask]
        e_vals = w[~a_mask]
        if e_cols.shape[1] % 2:
            raise ConvergenceError("unpaired E row while labelling; tighten the degeneracy tolerance")
        for col, val in sorted(zip(e_cols.T, e_vals), key=lambda t: -np.angle(t[1])):
            out_vecs.append(col / np.linalg.norm(col))
            out_labels.append("E")
        vecs[:, k:j] = np.column_stack(out_vecs)
        labels.extend(out_labels)
        k = j
    return vecs, tuple(labels)


def solve_djt(params: JahnTellerParams = TRIPLET_DJT, n_max: int = 14, n_states: int = 40) -> VibronicSolution:
    basis = BosonBasis(n_max)
    h = djt_hamiltonian(params, basis)
    e, v = _lowest_complete(h, n_states)
    rot, mir = _symmetry_operators_djt(params, basis)
    vecs, labels = label_states(e, v, rot, mir)
    return VibronicSolution(e, vecs, labels, basis, ("Ex", "Ey"), rot)


def solve_djt_converged(params: JahnTellerParams = TRIPLET_DJT, levels: int = 6, tol_mev: float = 1e-3,
                        n_start: int = 8, n_limit: int = 40) -> VibronicSolution:
    """Grow the oscillator basis until the lowest ``levels`` energies settle."""
    prev = None
    n = n_start
    while n <= n_limit:
        sol = solve_djt(params, n, max(levels, 12))
        cur = sol.relative[:levels]
        if prev is not None and np.max(np.abs(cur - prev)) < tol_mev:
            return sol
        prev = cur
        n += 2
    raise ConvergenceError(f"vibronic levels not converged to {tol_mev} meV with n_max <= {n_limit}")


@dataclass(frozen=True)
class HamReduction:
    p: float
    c: np.ndarray  # amplitudes on E+ x |n, m>
    d: np.ndarray  # amplitudes on E- x |n, m>


def ham_reduction_factor(sol: VibronicSolution) -> HamReduction:
    """Orbital-angular-momentum quenching of the vibronic ground doublet.

    The doublet is rotated to the eigenbasis of the electronic angular
    momentum; for the partner with positive expectation ``Psi+`` the factor is
    ``sum |c|^2 - sum |d|^2`` where c (d) are the amplitudes on E+ (E-).
    """
    if sol.electronic != ("Ex", "Ey"):
        raise InputError("Ham factor is defined for the E x e doublet solution")
    if sol.labels[0] != "E":
        raise InputError(f"ground level is {sol.labels[0]}, not a doublet")
    d = sol.basis.dim
    g = sol.vectors[:, :2]
    lz = np.kron(SIGMA_Y, np.eye(d))
    w, u = np.linalg.eigh(g.conj().T @ lz @ g)
    psi = (g @ u[:, 1]).reshape(2, d)
    e_plus = np.array([1.0, 1j]) / np.sqrt(2.0)
    e_minus = np.array([1.0, -1j]) / np.sqrt(2.0)
    c = e_plus.conj() @ psi
    dd = e_minus.conj() @ psi
    p = float(np.sum(np.abs(c) ** 2) - np.sum(np.abs(dd) ** 2))
    return HamReduction(p, c, dd)


@dataclass(frozen=True)
class SymmetryCoefficients:
    """Amplitudes of a state on (electronic part) x (symmetry-adapted vibration)."""

    amplitudes: np.ndarray
    quanta: np.ndarray
    vib_symmetry: tuple[str, ...]
    electronic: tuple[str, ...]

    def select(self, electronic: str, vib_symmetry: str | tuple[str, ...]) -> tuple[np.ndarray, np.ndarray]:
        wanted = (vib_symmetry,) if isinstance(vib_symmetry, str) else vib_symmetry
        mask = np.array([e == electronic and v in wanted for e, v in zip(self.electronic, self.vib_symmetry)])
        if not mask.any():
            return np.zeros(0), np.zeros(0, dtype=int)
        return self.amplitudes[mask], self.quanta[mask]


def _decompose(components: dict[str, np.ndarray], functions: list[VibrationalFunction], tol: float = 1e-14):
    amps, quanta, vib, elec = [], [], [], []
    for name, comp in components.items():
        for fn in functions:
            a = complex(fn.vector.conj() @ comp)
            if abs(a) > tol:
                amps.append(abs(a))
                quanta.append(fn.quanta)
                vib.append(fn.symmetry)
                elec.append(name)
    return SymmetryCoefficients(np.array(amps), np.array(quanta, dtype=int), tuple(vib), tuple(elec))


@dataclass(frozen=True)
class TripletISCCoefficients:
    """Inputs of the upper-branch crossing: electronic A1 content of the
    A1-, E- and A2-like spin-vibronic levels, one entry per vibration."""

    c: np.ndarray
    c_quanta: np.ndarray
    d: np.ndarray
    d_quanta: np.ndarray
    f: np.ndarray
    f_quanta: np.ndarray


def triplet_isc_coefficients(sol: VibronicSolution) -> TripletISCCoefficients:
    """Split the vibronic ground doublet by vibrational symmetry.

    ``c``: same orbital row as the doublet partner times A1 vibrations;
    ``f``: same row times A2 vibrations; ``d``: opposite row times E
    vibrations.  Values are amplitudes (not squared).
    """
    red = ham_reduction_factor(sol)
    coeffs = _decompose({"E+": red.c, "E-": red.d}, sol.basis.symmetry_functions())
    c, cn = coeffs.select("E+", "A1")
    f, fn = coeffs.select("E+", "A2")
    d, dn = coeffs.select("E-", ("E+", "E-"))
    return TripletISCCoefficients(c, cn, d, dn, f, fn)


# --------------------------------------------------------------------------
# A1 + E singlet manifold


@dataclass(frozen=True)
class SingletParams:
    hw: float = 66.0
    gap: float = 1150.0  # bare A1 - E electronic separation
    pjt: float = 180.0  # K, couples A1 with E through the mode
    djt: float = 23.5  # linear Jahn-Teller coupling inside the doublet
    djt_quadratic: float = 0.0


def damped_djt_coupling(e_jt: float, hw: float, doublet_weight: float) -> float:
    """Linear coupling of a doublet whose Jahn-Teller energy is scaled by the
    weight of the distorting configuration in the many-body state."""
    if not 0 <= doublet_weight <= 1:
        raise InputError("doublet weight must lie in [0, 1]")
    return float(np.sqrt(2.0 * doublet_weight * e_jt * hw))


def singlet_hamiltonian(params: SingletParams, basis: BosonBasis) -> np.ndarray:
    """Matrix in ``{A1, Ex, Ey} x |n, m>``.

    The doublet rows co-rotate with the mode so that the pseudo-Jahn-Teller
    term ``K (|A1><Ex| X + |A1><Ey| Y + h.c.)`` is invariant; the linear
    Jahn-Teller term then takes the form ``F (sz X - sx Y)``.
    """
    c = basis.coordinates()
    d = basis.dim
    ident = np.eye(d)
    h = np.zeros((3 * d, 3 * d))
    for a in range(3):
        h[a * d:(a + 1) * d, a * d:(a + 1) * d] = params.hw * (c["N"] + ident)
    h[:d, :d] += params.gap * ident
    h[:d, d:2 * d] = h[d:2 * d, :d] = params.pjt * c["X"]
    h[:d, 2 * d:] = h[2 * d:, :d] = params.pjt * c["Y"]
    fx, fy = params.djt * c["X"], params.djt * c["Y"]
    gq, gx = params.djt_quadratic * c["X2-Y2"], params.djt_quadratic * c["XY+YX"]
    h[d:2 * d, d:2 * d] += fx + gq
    h[2 * d:, 2 * d:] += -fx - gq
    h[d:2 * d, 2 * d:] += -fy + gx
    h[2 * d:, d:2 * d] += -fy + gx
    return h


def _symmetry_operators_singlet(basis: BosonBasis):
    el_rot = np.zeros((3, 3), dtype=complex)
    el_rot[0, 0] = 1.0
    el_rot[1:, 1:] = expm(-1j * 2 * np.pi / 3 * SIGMA_Y)
    rot = np.kron(el_rot, basis.rotation())
    mirror = np.kron(np.diag([1.0, 1.0, -1.0]), basis.mirror())
    return rot, mirror


def solve_singlet(params: SingletParams, n_max: int = 24, n_states: int = 60) -> VibronicSolution:
    basis = BosonBasis(n_max)
    h = singlet_hamiltonian(params, basis)
    e, v = _lowest_complete(h, n_states)
    rot, mir = _symmetry_operators_singlet(basis)
    vecs, labels = label_states(e, v, rot, mir)
    return VibronicSolution(e, vecs, labels, basis, ("A1", "Ex", "Ey"), rot)


def lowest_a1_excitation(sol: VibronicSolution) -> float:
    for e, lab, _ in sol.levels():
        if lab == "A1":
            return e
    raise ConvergenceError("no A1 level among the computed states")


def calibrate_pjt(params: SingletParams, target_mev: float = 14.0, n_max: int = 24,
                  bracket: tuple[float, float] = (100.0, 260.0)) -> SingletParams:
    """Pseudo-Jahn-Teller coupling that puts the lowest A1 level at ``target_mev``."""

    def miss(k):
        sol = solve_singlet(_replace(params, pjt=k), n_max, n_states=8)
        if sol.labels[0] != "E":
            return -target_mev  # coupling so strong the A1 level became the ground state
        return lowest_a1_excitation(sol) - target_mev

    lo, hi = bracket
    if miss(lo) * miss(hi) > 0:
        raise ConvergenceError(f"lowest A1 level cannot be placed at {target_mev} meV inside K in {bracket}")
    k = optimize.brentq(miss, lo, hi, xtol=1e-6)
    return _replace(params, pjt=float(k))


def _replace(params, **kw):
    return replace(params, **kw)


SINGLET_DOUBLET_WEIGHT = 0.1  # share of the distorting configuration in the 1E state
SINGLET_HW = 66.0
SINGLET_GAP = 1150.0


@lru_cache(maxsize=4)
def reference_singlet_params(target_mev: float = 14.0, n_max: int = 24) -> SingletParams:
    """Singlet preset: damped doublet coupling from the triplet Jahn-Teller
    energy, K calibrated so that the lowest A1 level sits at ``target_mev``."""
    base = SingletParams(hw=SINGLET_HW, gap=SINGLET_GAP,
                         djt=damped_djt_coupling(TRIPLET_E_JT, SINGLET_HW, SINGLET_DOUBLET_WEIGHT))
    return calibrate_pjt(base, target_mev, n_max)


def upper_a1_state(sol: VibronicSolution, h: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Lowest eigenstate dominated by the A1 electronic state.

    ``sol`` is only used for its basis and parameters; the full spectrum is
    recomputed when ``h`` is given.
    """
    d = sol.basis.dim
    e, v = (sol.energies, sol.vectors) if h is None else np.linalg.eigh(h)
    weight = np.sum(np.abs(v[:d]) ** 2, axis=0)
    idx = np.flatnonzero(weight > 0.5)
    if idx.size == 0:
        raise ConvergenceError("no A1-dominated state in the computed window")
    k = int(idx[0])
    return float(e[k]), v[:, k]


@dataclass(frozen=True)
class EmissionLines:
    energies: np.ndarray  # meV below the zero-phonon line (>= 0)
    intensities: np.ndarray  # relative to the strongest line
    labels: tuple[str, ...]
    zero_phonon_mev: float


def singlet_emission(params: SingletParams, n_max: int = 24) -> EmissionLines:
    """Transitions from the lowest A1-dominated level into the doublet manifold.

    Intensities are summed over both in-plane dipole components; the
    electronic dipole connects A1 with Ex (x) and with Ey (y).
    """
    basis = BosonBasis(n_max)
    h = singlet_hamiltonian(params, basis)
    e, v = np.linalg.eigh(h)
    d = basis.dim
    e_up, psi = upper_a1_state(VibronicSolution(e, v, ("",) * len(e), basis, ("A1", "Ex", "Ey"), np.eye(1)))
    k_up = int(np.flatnonzero(np.isclose(e, e_up))[0])
    lower_e, lower_v = e[:k_up], v[:, :k_up]
    amp_x = lower_v[d:2 * d].T @ psi[:d] + lower_v[:d].T @ psi[d:2 * d]
    amp_y = lower_v[2 * d:].T @ psi[:d] + lower_v[:d].T @ psi[2 * d:]
    inten = np.abs(amp_x) ** 2 + np.abs(amp_y) ** 2
    rot, mir = _symmetry_operators_singlet(basis)
    _, labels = label_states(lower_e, lower_v, rot, mir)
    return EmissionLines(lower_e - lower_e[0], inten / inten.max(), labels, float(e_up - lower_e[0]))


def sideband_peak(lines: EmissionLines, sigma_mev: float = 5.0, exclude_below_mev: float = 1.0,
                  grid_step: float = 0.05) -> float:
    """Maximum of the Gaussian-broadened sideband (zero-phonon lines excluded)."""
    mask = lines.energies > exclude_below_mev
    if not mask.any():
        raise InputError("no sideband lines above the exclusion threshold")
    x = np.arange(0.0, lines.energies[mask].max() + 6 * sigma_mev, grid_step)
    prof = (lines.intensities[mask][None, :] * np.exp(-0.5 * ((x[:, None] - lines.energies[mask][None, :]) / sigma_mev) ** 2)).sum(1)
    return float(x[np.argmax(prof)])


def singlet_coefficients(sol: VibronicSolution, state: int) -> SymmetryCoefficients:
    """Decompose a singlet-manifold state into (A1 | E+ | E-) x vibrations.

    For a doublet level the partner is first rotated to the C3 eigenvector
    that transforms like ``E+ x |0, 0>``, so that c-type amplitudes sit on E+.
    """
    d = sol.basis.dim
    psi = sol.vectors[:, state]
    if sol.labels[state] == "E":
        same = [k for k in (state - 1, state + 1)
                if 0 <= k < len(sol.labels) and sol.labels[k] == "E" and abs(sol.energies[k] - sol.energies[state]) < 1e-6]
        if not same:
            raise InputError(f"state {state} is labelled E but has no degenerate partner in the solution")
        pair = sol.vectors[:, sorted((state, same[0]))]
        w, u = np.linalg.eig(pair.conj().T @ sol.rotation @ pair)
        ref = np.zeros(3 * d, dtype=complex)
        ref[d], ref[2 * d] = 1 / np.sqrt(2.0), 1j / np.sqrt(2.0)
        target = ref.conj() @ sol.rotation @ ref
        psi = pair @ u[:, int(np.argmin(np.abs(w - target)))]
        psi = psi / np.linalg.norm(psi)
    a1 = psi[:d]
    ex, ey = psi[d:2 * d], psi[2 * d:]
    # amplitudes on E+- = (Ex +- i Ey)/sqrt(2)
    e_plus = (ex - 1j * ey) / np.sqrt(2.0)
    e_minus = (ex + 1j * ey) / np.sqrt(2.0)
    return _decompose({"A1": a1, "E+": e_plus, "E-": e_minus}, sol.basis.symmetry_functions())


def shell_weights(sol: VibronicSolution, state: int) -> dict[str, np.ndarray]:
    """Weight of each electronic channel per oscillator shell.

    Channels: ``"A1"`` (singlet electronic content), ``"E_A"`` (doublet
    times A-type vibrations) and ``"E_E"`` (doublet times E-type
    vibrations).  Arrays are indexed by the number of quanta.
    """
    d = sol.basis.dim
    u, lval = sol.basis.angular_basis()
    shell = sol.basis.shell
    n = sol.basis.n_max + 1
    psi = sol.vectors[:, state]
    a = u.conj().T @ psi[:d]
    ex = u.conj().T @ psi[d:2 * d]
    ey = u.conj().T @ psi[2 * d:]
    a_type = (np.abs(lval) % 3) == 0
    doublet = np.abs(ex) ** 2 + np.abs(ey) ** 2
    return {
        "A1": np.bincount(shell, np.abs(a) ** 2, n),
        "E_A": np.bincount(shell, doublet * a_type, n),
        "E_E": np.bincount(shell, doublet * ~a_type, n),
    }


def tunneling_rate_ghz(splitting_mev: float) -> float:
    """Tunnelling rate between equivalent distortions, Delta E / h, in GHz."""
    if splitting_mev < 0:
        raise InputError("splitting must be non-negative")
    return splitting_mev * MHZ_PER_MEV * 1e-3
