"""Real-space integrals over model spin densities.

* Zero-field splitting from pairs of orbitals on a common grid, through the
  traceless dipolar kernel ``(r^2 delta_ab - 3 r_a r_b) / r^5``.
* Hyperfine tensors: Fermi contact from the interpolated spin density at the
  nucleus plus the dipolar grid integral.
* Closed-form point-dipole hyperfine tensors and the quadrupole constant.

Lengths are in Angstrom, tensors in MHz.  Spin densities are spin
expectation densities, so they integrate to ``S``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import fft
from scipy.ndimage import map_coordinates

from .core import E_CHARGE, MU0, MU_B, MU_N, PLANCK, InputError

G_ELECTRON = 2.0023193
ANGSTROM = 1e-10

# mu0/(4 pi) g^2 muB^2 / h at g = 2, in MHz * A^3 (51.9 GHz A^3)
DIPOLAR_CONSTANT_G2 = MU0 / (4 * np.pi) * (2.0 * MU_B) ** 2 / PLANCK / ANGSTROM**3 * 1e-6

NUCLEAR_G = {"14N": 0.403761, "15N": -0.566378, "13C": 1.404824}


def dipolar_constant(g: float = 2.0) -> float:
    """``mu0 g^2 muB^2 / (4 pi h)`` in MHz * A^3."""
    return DIPOLAR_CONSTANT_G2 * (g / 2.0) ** 2


def hyperfine_constant(g_nuclear: float, g_electron: float = G_ELECTRON) -> float:
    """``mu0 ge muB gn muN / (4 pi h)`` in MHz * A^3."""
    return MU0 / (4 * np.pi) * g_electron * MU_B * g_nuclear * MU_N / PLANCK / ANGSTROM**3 * 1e-6


# --------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class ScalarGrid3D:
    origin: np.ndarray  # A
    spacing: np.ndarray  # A per axis
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float).reshape(3))
        object.__setattr__(self, "spacing", np.broadcast_to(np.asarray(self.spacing, dtype=float), (3,)).copy())
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 3:
            raise InputError(f"grid values must be a 3D array, got shape {self.values.shape}")
        if np.any(self.spacing <= 0):
            raise InputError("grid spacing must be positive")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axes(self) -> list[np.ndarray]:
        return [self.origin[k] + self.spacing[k] * np.arange(self.shape[k]) for k in range(3)]

    def points(self) -> np.ndarray:
        """Cartesian coordinates, shape ``(nx, ny, nz, 3)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def integral(self) -> float:
        return float(self.values.sum() * self.cell_volume)

    def with_values(self, values) -> "ScalarGrid3D":
        return ScalarGrid3D(self.origin, self.spacing, values)

    def commensurate(self, other: "ScalarGrid3D") -> bool:
        return (self.shape == other.shape and np.allclose(self.origin, other.origin, atol=1e-9)
                and np.allclose(self.spacing, other.spacing, rtol=1e-12))


def cubic_grid(half_width: float, n: int, center=(0.0, 0.0, 0.0)) -> ScalarGrid3D:
    """Empty ``n^3`` grid spanning ``center +- half_width`` on every axis."""
    h = 2 * half_width / (n - 1)
    return ScalarGrid3D(np.asarray(center, dtype=float) - half_width, h, np.zeros((n, n, n)))


def gaussian_orbital(grid: ScalarGrid3D, center, width: float) -> ScalarGrid3D:
    """L2-normalized s-like Gaussian amplitude ``exp(-r^2 / 4 w^2)`` (density width ``w``)."""
    r2 = ((grid.points() - np.asarray(center, dtype=float)) ** 2).sum(axis=-1)
    amp = np.exp(-r2 / (4 * width**2))
    return grid.with_values(amp / np.sqrt((amp**2).sum() * grid.cell_volume))


def gaussian_density(grid: ScalarGrid3D, centers, widths, weights) -> ScalarGrid3D:
    """Sum of normalized Gaussian densities, ``weights`` giving each lobe's integral."""
    pts = grid.points()
    total = np.zeros(grid.shape)
    for c, w, q in zip(np.atleast_2d(centers), np.broadcast_to(widths, len(np.atleast_2d(centers))),
                       np.broadcast_to(weights, len(np.atleast_2d(centers)))):
        g = np.exp(-((pts - c) ** 2).sum(axis=-1) / (2 * w**2))
        total += q * g / (g.sum() * grid.cell_volume)
    return grid.with_values(total)


# Text grid format:
#   line 1: "origin x0 y0 z0"   line 2: "spacing dx dy dz"   line 3: "shape nx ny nz"
#   then nx*ny*nz values, whitespace separated, row-major (z fastest).
# Binary variant: the same three header lines followed by a line "binary",
# then little-endian float64 values in the same order.


def write_grid(path, grid: ScalarGrid3D, binary: bool = False) -> None:
    header = (f"origin {' '.join(repr(float(x)) for x in grid.origin)}\n"
              f"spacing {' '.join(repr(float(x)) for x in grid.spacing)}\n"
              f"shape {' '.join(str(n) for n in grid.shape)}\n")
    path = Path(path)
    if binary:
        with path.open("wb") as fh:
            fh.write((header + "binary\n").encode())
            fh.write(grid.values.astype("<f8").tobytes(order="C"))
    else:
        body = "\n".join(" ".join(repr(float(v)) for v in row) for row in grid.values.reshape(-1, grid.shape[2]))
        path.write_text(header + body + "\n")


def read_grid(path) -> ScalarGrid3D:
    raw = Path(path).read_bytes()
    lines = raw.split(b"\n", 4)
    try:
        fields = {}
        for line in lines[:3]:
            key, *vals = line.decode().split()
            fields[key] = vals
        origin = [float(x) for x in fields["origin"]]
        spacing = [float(x) for x in fields["spacing"]]
        shape = tuple(int(x) for x in fields["shape"])
    except (KeyError, ValueError, UnicodeDecodeError) as exc:
        raise InputError(f"malformed grid header in {path}: {exc}") from None
    if lines[3].strip() == b"binary":
        values = np.frombuffer(lines[4], dtype="<f8")
    else:
        values = np.array(b"\n".join(lines[3:]).split(), dtype=float)
    if values.size != np.prod(shape):
        raise InputError(f"grid {path} declares {np.prod(shape)} values but holds {values.size}")
    return ScalarGrid3D(origin, spacing, values.reshape(shape))


# --------------------------------------------------------------------------
# dipolar kernel sums

_COMPONENTS = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]


def _kernel(dx, dy, dz) -> np.ndarray:
    """Kernel ``(r^2 delta_ab - 3 r_a r_b) / r^5`` for each of the six components; zero at r = 0."""
    d = (dx, dy, dz)
    r2 = dx * dx + dy * dy + dz * dz
    with np.errstate(divide="ignore", invalid="ignore"):
        inv5 = np.where(r2 > 0, r2 ** -2.5, 0.0)
    out = []
    for a, b in _COMPONENTS:
        k = -3.0 * d[a] * d[b]
        if a == b:
            k = k + r2
        out.append(k * inv5)
    return np.stack(out)


def _to_tensor(six) -> np.ndarray:
    t = np.zeros((3, 3))
    for (a, b), v in zip(_COMPONENTS, six):
        t[a, b] = t[b, a] = v
    return t


def _pair_sum_direct(a: np.ndarray, b: np.ndarray, grid: ScalarGrid3D, threshold: float, chunk: int = 2048) -> np.ndarray:
    """``sum_r1 sum_r2 a(r1) b(r2) K(r1 - r2)`` over the support of ``a`` and ``b``."""
    pts = grid.points().reshape(-1, 3)
    fa, fb = a.ravel(), b.ravel()
    ia = np.flatnonzero(np.abs(fa) > threshold * np.abs(fa).max()) if fa.any() else np.array([], int)
    ib = np.flatnonzero(np.abs(fb) > threshold * np.abs(fb).max()) if fb.any() else np.array([], int)
    total = np.zeros(6)
    pb, wb = pts[ib], fb[ib]
    for start in range(0, len(ia), chunk):
        sel = ia[start:start + chunk]
        diff = pts[sel][:, None, :] - pb[None, :, :]
        k = _kernel(diff[..., 0], diff[..., 1], diff[..., 2])
        total += np.einsum("i,cij,j->c", fa[sel], k, wb)
    return total


def _pair_sum_fft(a: np.ndarray, b: np.ndarray, grid: ScalarGrid3D, kernel_ft=None) -> np.ndarray:
    shape = grid.shape
    pad = tuple(2 * n for n in shape)
    if kernel_ft is None:
        kernel_ft = _kernel_fft(grid)
    fb = fft.rfftn(b, pad)
    total = np.zeros(6)
    for c in range(6):
        conv = fft.irfftn(fb * kernel_ft[c], pad)[: shape[0], : shape[1], : shape[2]]
        total[c] = float((a * conv).sum())
    return total


def _kernel_fft(grid: ScalarGrid3D) -> np.ndarray:
    pad = tuple(2 * n for n in grid.shape)
    # offsets in wrap-around order: 0..n-1 then -n..-1
    offs = [np.concatenate([np.arange(n), np.arange(-n, 0)]) * h for n, h in zip(grid.shape, grid.spacing)]
    dx, dy, dz = np.meshgrid(*offs, indexing="ij")
    k = _kernel(dx, dy, dz)
    return np.stack([fft.rfftn(k[c], pad) for c in range(6)])


@dataclass(frozen=True)
class OrbitalPair:
    phi_i: ScalarGrid3D
    phi_j: ScalarGrid3D
    chi: int = 1  # +1 for a same-spin pair, -1 for an opposite-spin pair

    def __post_init__(self):
        if self.chi not in (1, -1):
            raise InputError("spin-channel sign must be +1 or -1")
        if not self.phi_i.commensurate(self.phi_j):
            raise InputError("orbital grids of a pair must share origin, spacing and shape")


@dataclass(frozen=True)
class ZFSResult:
    tensor: np.ndarray  # MHz
    principal_values: np.ndarray  # sorted by |value|, largest last
    principal_axes: np.ndarray  # columns
    d: float  # (3/2) D_zz in the principal frame
    e: float  # (D_xx - D_yy)/2 in the principal frame


def _principal(tensor: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(tensor)
    order = np.argsort(np.abs(vals), kind="stable")
    return vals[order], vecs[:, order]


def zfs_tensor(pairs, spin: float = 1.0, method: str = "fft", g: float = G_ELECTRON,
               check_normalization: bool = True, threshold: float = 1e-8) -> ZFSResult:
    """Spin-spin D tensor from orbital pairs.

    ``D_ab = C / (2 S (2S-1)) sum_pairs chi [ int rho_i rho_j K_ab - int n_ij n_ij K_ab ]``
    with ``rho_i = phi_i^2``, ``n_ij = phi_i phi_j`` and ``C`` the dipolar
    constant.  ``method`` is ``"fft"`` (zero-padded convolution) or
    ``"direct"`` (explicit double sum over points above ``threshold``
    times the maximum).  The self-interaction cell is excluded in both.
    """
    pairs = list(pairs)
    if not pairs:
        raise InputError("at least one orbital pair is required")
    denom = spin * (2 * spin - 1)
    if denom <= 0:
        raise InputError(f"spin {spin} gives a singular prefactor; S must be at least 1")
    grid = pairs[0].phi_i
    for p in pairs:
        if not grid.commensurate(p.phi_i) or not grid.commensurate(p.phi_j):
            raise InputError("all orbitals must share one grid")
        if check_normalization:
            for phi in (p.phi_i, p.phi_j):
                norm = float((phi.values**2).sum() * phi.cell_volume)
                if abs(norm - 1) > 1e-3:
                    raise InputError(f"orbital is not normalized: <phi|phi> = {norm:.6f}")
    if method not in ("fft", "direct"):
        raise InputError(f"unknown method {method!r}; use 'fft' or 'direct'")
    kft = _kernel_fft(grid) if method == "fft" else None
    total = np.zeros(6)
    for p in pairs:
        rho_i, rho_j = p.phi_i.values**2, p.phi_j.values**2
        n_ij = p.phi_i.values * p.phi_j.values
        if method == "fft":
            s = _pair_sum_fft(rho_i, rho_j, grid, kft) - _pair_sum_fft(n_ij, n_ij, grid, kft)
        else:
            s = _pair_sum_direct(rho_i, rho_j, grid, threshold) - _pair_sum_direct(n_ij, n_ij, grid, threshold)
        total += p.chi * s
    total *= grid.cell_volume**2 * dipolar_constant(g) / (2 * denom)
    t = _to_tensor(total)
    vals, vecs = _principal(t)
    dzz = vals[-1]
    dxx, dyy = sorted(vals[:2], reverse=True) if vals[-1] < 0 else sorted(vals[:2])
    return ZFSResult(t, vals, vecs, 1.5 * dzz, 0.5 * (dxx - dyy))


def point_dipole_zfs(separation) -> np.ndarray:
    """D tensor of two point spins (S = 1) at relative position ``separation`` (A), MHz."""
    r = np.asarray(separation, dtype=float)
    n = np.linalg.norm(r)
    if n == 0:
        raise InputError("separation must be non-zero")
    u = r / n
    return 0.5 * dipolar_constant(G_ELECTRON) * (np.eye(3) - 3 * np.outer(u, u)) / n**3


# --------------------------------------------------------------------------
# hyperfine


@dataclass(frozen=True)
class HyperfineResult:
    tensor: np.ndarray  # MHz
    fermi_contact: float  # valence-only contact term a
    dipolar: np.ndarray  # traceless part
    a_parallel: float | None  # set when the dipolar part is axial within 1 %
    a_perp: float | None
    axis: np.ndarray | None


def point_dipole_hyperfine(r, g_nuclear: float, g_electron: float = G_ELECTRON) -> np.ndarray:
    """``(mu0/4pi) ge muB gn muN (3 r r^T - r^2) / r^5`` in MHz for ``r`` in A."""
    r = np.asarray(r, dtype=float)
    n = np.linalg.norm(r)
    if n == 0:
        raise InputError("nucleus and spin cannot coincide in the point-dipole form")
    return hyperfine_constant(g_nuclear, g_electron) * (3 * np.outer(r, r) - n**2 * np.eye(3)) / n**5


def _axial(dip: np.ndarray, a: float):
    vals, vecs = _principal(dip)
    b = vals[-1] / 2.0
    if abs(b) < 1e-300 or abs(vals[0] - vals[1]) > 0.01 * abs(vals[-1]):
        return None, None, None
    return a + 2 * b, a - b, vecs[:, -1]


def hyperfine_tensor(spin_density: ScalarGrid3D, nucleus, g_nuclear: float, spin: float = 1.0,
                     g_electron: float = G_ELECTRON) -> HyperfineResult:
    """Hyperfine tensor of one nucleus in a spin density that integrates to ``S``.

    Contact term: ``(2 mu0 / 3) ge muB gn muN n_s(R) / S`` with ``n_s(R)``
    from tricubic spline interpolation.  Dipolar term: grid sum of the
    traceless kernel, omitting a grid point that coincides with the nucleus.
    """
    if spin <= 0:
        raise InputError("spin must be positive")
    pos = np.asarray(nucleus, dtype=float).reshape(3)
    frac = (pos - spin_density.origin) / spin_density.spacing
    if np.any(frac < 0) or np.any(frac > np.asarray(spin_density.shape) - 1):
        raise InputError(f"nucleus at {pos} lies outside the grid")
    dens_at = float(map_coordinates(spin_density.values, frac.reshape(3, 1), order=3, mode="nearest")[0])
    k = hyperfine_constant(g_nuclear, g_electron)
    a = 8 * np.pi / 3 * k * dens_at / spin  # (2 mu0/3) = (mu0/4pi) * 8 pi/3
    d = spin_density.points() - pos
    kern = _kernel(d[..., 0], d[..., 1], d[..., 2])  # (r^2 - 3 r r)/r^5 = -(3 r r - r^2)/r^5
    six = -np.tensordot(kern, spin_density.values, axes=3) * spin_density.cell_volume
    dip = k * _to_tensor(six) / spin
    a_par, a_perp, axis = _axial(dip, a)
    return HyperfineResult(a * np.eye(3) + dip, a, dip, a_par, a_perp, axis)


# --------------------------------------------------------------------------
# quadrupole

BARN = 1e-28  # m^2


def quadrupole_coupling(vzz_v_per_a2: float, q_barn: float) -> float:
    """``C_Q = 3 e Q V_zz / (4 h)`` in MHz for an I = 1 nucleus (V_zz in V/A^2)."""
    return 3 * E_CHARGE * q_barn * BARN * vzz_v_per_a2 / ANGSTROM**2 / (4 * PLANCK) * 1e-6


def field_gradient_for(c_q_mhz: float, q_barn: float) -> float:
    """Inverse of :func:`quadrupole_coupling`: the V_zz (V/A^2) that gives ``c_q_mhz``."""
    if q_barn == 0:
        raise InputError("quadrupole moment must be non-zero to invert")
    return c_q_mhz / quadrupole_coupling(1.0, q_barn)
