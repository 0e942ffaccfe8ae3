"""Discrete Fourier representation of vector fields on a periodized box.

Fields live on the torus [0, L)^3 sampled on an n^3 grid.  A vector field is
stored as the complex array of its Fourier coefficients in numpy ``fftn``
layout, shape (3, n, n, n).  The forward transform carries the 1/n^3 factor,

    u_hat(m) = (1/n^3) * sum_x u(x) exp(-i xi(m).x),      xi(m) = (2*pi/L) m,

so that Parseval reads  ||u||_{L^2(box)}^2 = L^3 * sum_m |u_hat(m)|^2.

Conventions enforced throughout:

* zero mode is identically zero (all fields have zero spatial mean; the
  inverse Laplacian and the Leray projection are undefined at xi = 0),
* Hermitian symmetry u_hat(-m) = conj(u_hat(m)), so physical samples are real,
* the Nyquist planes |m_i| = n/2 are kept empty.  They are self-conjugate
  under m -> -m, so multiplication by (i xi) would break reality there; the
  dealiasing masks remove them anyway.

Dealiasing: quadratic products are truncated by the 2/3 rule.  Effectively
cubic chains such as (u x B) x B are computed as two successive quadratic
products after a single 1/2-rule truncation of the inputs, which keeps the
retained band alias-free for triple products.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

__all__ = [
    "FrequencyLattice",
    "SpectralField",
    "EMState",
    "LatticeMismatchError",
    "ZeroModeError",
    "make_lattice",
    "hermitian_symmetrize",
    "single_mode_field",
    "to_physical",
    "from_physical",
    "transform_roundtrip",
    "curl",
    "divergence",
    "gradient_of_scalar",
    "laplacian",
    "leray_project",
    "pointwise_product",
    "cross_product",
    "triple_cross_chain",
    "l2_norm",
    "h_dot_norm",
    "linf_norm",
    "physical_l2_norm",
    "max_divergence",
    "hermitian_defect",
]


class LatticeMismatchError(ValueError):
    """Two fields that must share a lattice do not."""


class ZeroModeError(ValueError):
    """An operation requiring zero spatial mean received a nonzero zero mode."""


@dataclass(frozen=True)
class FrequencyLattice:
    """Integer mode lattice m in [-n/2, n/2)^3 with wavevectors xi = (2 pi / L) m.

    The arrays are laid out in numpy fftn order.  ``n`` must be even and >= 8
    so that at least the first few dyadic shells are representable.
    """

    n: int
    L: float
    # cached arrays, all shape (n, n, n) unless noted
    m: np.ndarray = field(repr=False)          # (3, n, n, n) integer modes
    xi: np.ndarray = field(repr=False)         # (3, n, n, n) wavevectors
    xi_sq: np.ndarray = field(repr=False)      # |xi|^2
    xi_norm: np.ndarray = field(repr=False)    # |xi|
    nonzero: np.ndarray = field(repr=False)    # mask: m != 0
    inv_xi_sq: np.ndarray = field(repr=False)  # 1/|xi|^2, 0 at the zero mode

    @property
    def xi_min(self) -> float:
        return 2.0 * np.pi / self.L

    @property
    def xi_max(self) -> float:
        return (2.0 * np.pi / self.L) * (self.n // 2) * np.sqrt(3.0)

    def dealias_mask(self, rule: str) -> np.ndarray:
        return _dealias_mask(self.n, rule)

    def same_as(self, other: "FrequencyLattice") -> bool:
        return self.n == other.n and self.L == other.L


@lru_cache(maxsize=32)
def _mode_axes(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)


@lru_cache(maxsize=64)
def _dealias_mask_cached(n: int, kmax: int) -> np.ndarray:
    ax = np.abs(_mode_axes(n))
    keep1 = ax <= kmax
    return (keep1[:, None, None] & keep1[None, :, None] & keep1[None, None, :])


def _dealias_mask(n: int, rule: str) -> np.ndarray:
    # strict bands: 2K < n (quadratic) resp. 4K < n (cubic chain), so aliased
    # contributions never reach the retained modes
    if rule == "two_thirds":
        kmax = int(np.ceil(n / 3)) - 1
    elif rule == "half":
        kmax = int(np.ceil(n / 4)) - 1
    elif rule == "none":
        kmax = n // 2 - 1  # only drops the Nyquist planes
    else:
        raise ValueError(f"unknown dealias rule {rule!r}")
    return _dealias_mask_cached(n, kmax)


def make_lattice(n: int, L: float = 2.0 * np.pi) -> FrequencyLattice:
    """Build the mode lattice for an n^3 grid on the box [0, L)^3."""
    if n < 8 or n % 2 != 0:
        raise ValueError(f"grid size must be even and >= 8, got {n}")
    if not (0.0 < L <= 16.0 * np.pi):
        raise ValueError(f"box size must lie in (0, 16*pi], got {L}")
    ax = _mode_axes(n)
    m = np.stack(np.meshgrid(ax, ax, ax, indexing="ij")).astype(np.float64)
    xi = (2.0 * np.pi / L) * m
    xi_sq = np.einsum("c...,c...->...", xi, xi)
    nonzero = xi_sq > 0
    inv = np.zeros_like(xi_sq)
    inv[nonzero] = 1.0 / xi_sq[nonzero]
    return FrequencyLattice(
        n=n, L=float(L), m=m, xi=xi, xi_sq=xi_sq,
        xi_norm=np.sqrt(xi_sq), nonzero=nonzero, inv_xi_sq=inv,
    )


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of a real 3-component field, shape (3, n, n, n)."""

    lattice: FrequencyLattice
    coeffs: np.ndarray

    def __post_init__(self):
        n = self.lattice.n
        if self.coeffs.shape != (3, n, n, n):
            raise ValueError(f"expected coeffs shape (3, {n}, {n}, {n}), got {self.coeffs.shape}")

    def copy(self) -> "SpectralField":
        return SpectralField(self.lattice, self.coeffs.copy())

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_lattice(self, other)
        return SpectralField(self.lattice, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_lattice(self, other)
        return SpectralField(self.lattice, self.coeffs - other.coeffs)

    def __mul__(self, c) -> "SpectralField":
        return SpectralField(self.lattice, self.coeffs * c)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.lattice, -self.coeffs)

    @staticmethod
    def zero(lattice: FrequencyLattice) -> "SpectralField":
        n = lattice.n
        return SpectralField(lattice, np.zeros((3, n, n, n), dtype=np.complex128))


@dataclass(frozen=True)
class EMState:
    """Velocity / electric / magnetic triple at one time instant."""

    u: SpectralField
    E: SpectralField
    B: SpectralField
    nu: float = 1.0
    sigma: float = 1.0
    time: float = 0.0

    def __post_init__(self):
        if self.nu <= 0 or self.sigma <= 0:
            raise ValueError("nu and sigma must be positive")
        _check_same_lattice(self.u, self.E)
        _check_same_lattice(self.u, self.B)

    @property
    def lattice(self) -> FrequencyLattice:
        return self.u.lattice

    def with_time(self, t: float) -> "EMState":
        return replace(self, time=t)

    @staticmethod
    def zero(lattice: FrequencyLattice, nu: float = 1.0, sigma: float = 1.0) -> "EMState":
        z = SpectralField.zero(lattice)
        return EMState(u=z, E=z.copy(), B=z.copy(), nu=nu, sigma=sigma)


def _check_same_lattice(a: SpectralField, b: SpectralField) -> None:
    if not a.lattice.same_as(b.lattice):
        raise LatticeMismatchError(
            f"lattice mismatch: ({a.lattice.n}, L={a.lattice.L}) vs ({b.lattice.n}, L={b.lattice.L})"
        )


# ---------------------------------------------------------------------------
# Hermitian symmetry and construction helpers
# ---------------------------------------------------------------------------

def _conjugate_reflect(c: np.ndarray) -> np.ndarray:
    """conj(c(-m)) in fftn layout; works on (..., n, n, n) arrays."""
    rev = c[..., ::-1, ::-1, ::-1]
    rev = np.roll(rev, shift=1, axis=(-3, -2, -1))
    return np.conj(rev)


@lru_cache(maxsize=32)
def _nyquist_free_mask(n: int) -> np.ndarray:
    ax = _mode_axes(n) != -(n // 2)
    return ax[:, None, None] & ax[None, :, None] & ax[None, None, :]


def hermitian_symmetrize(coeffs: np.ndarray, zero_mean: bool = True) -> np.ndarray:
    """Project coefficients onto the realizable set.

    Averages with the reflected conjugate, empties the Nyquist planes and
    (by default) the zero mode.  Idempotent.
    """
    n = coeffs.shape[-1]
    out = 0.5 * (coeffs + _conjugate_reflect(coeffs))
    out = out * _nyquist_free_mask(n)
    if zero_mean:
        out[..., 0, 0, 0] = 0.0
    return out


def hermitian_defect(f: SpectralField) -> float:
    """Relative departure from Hermitian symmetry (0 for realizable fields)."""
    c = f.coeffs
    scale = np.max(np.abs(c)) or 1.0
    return float(np.max(np.abs(c - _conjugate_reflect(c))) / scale)


def single_mode_field(lattice: FrequencyLattice, m: tuple[int, int, int],
                      amplitude) -> SpectralField:
    """Field with coefficient ``amplitude`` at mode m and conj(amplitude) at -m."""
    n = lattice.n
    if all(int(v) % n == 0 for v in m):
        raise ZeroModeError("single_mode_field: the zero mode is excluded")
    if any(int(v) % n == n // 2 for v in m):
        raise ValueError("single_mode_field: Nyquist modes are excluded")
    c = np.zeros((3, n, n, n), dtype=np.complex128)
    amp = np.asarray(amplitude, dtype=np.complex128)
    i, j, k = (int(v) % n for v in m)
    i2, j2, k2 = ((-int(v)) % n for v in m)
    c[:, i, j, k] = amp
    c[:, i2, j2, k2] = np.conj(amp)
    return SpectralField(lattice, c)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def to_physical(f: SpectralField) -> np.ndarray:
    """Physical samples, shape (3, n, n, n), real part of the inverse DFT."""
    n = f.lattice.n
    phys = np.fft.ifftn(f.coeffs, axes=(1, 2, 3)) * (n ** 3)
    return np.ascontiguousarray(phys.real)


def from_physical(lattice: FrequencyLattice, samples: np.ndarray,
                  zero_mean: bool = True) -> SpectralField:
    """Forward transform with the 1/n^3 normalization; zero mode discarded."""
    n = lattice.n
    c = np.fft.fftn(np.asarray(samples, dtype=np.float64), axes=(1, 2, 3)) / (n ** 3)
    if zero_mean:
        c[..., 0, 0, 0] = 0.0
    return SpectralField(lattice, c)


def transform_roundtrip(f: SpectralField) -> SpectralField:
    """Inverse then forward transform; identity up to round-off for realizable fields."""
    return from_physical(f.lattice, to_physical(f), zero_mean=False)


# ---------------------------------------------------------------------------
# Differential operators: per-mode symbol multiplication
# ---------------------------------------------------------------------------

def curl(f: SpectralField) -> SpectralField:
    xi = f.lattice.xi
    c = f.coeffs
    out = np.empty_like(c)
    out[0] = 1j * (xi[1] * c[2] - xi[2] * c[1])
    out[1] = 1j * (xi[2] * c[0] - xi[0] * c[2])
    out[2] = 1j * (xi[0] * c[1] - xi[1] * c[0])
    return SpectralField(f.lattice, out)


def divergence(f: SpectralField) -> np.ndarray:
    """Scalar coefficient array of div f, shape (n, n, n)."""
    xi = f.lattice.xi
    return 1j * np.einsum("c...,c...->...", xi, f.coeffs)


def gradient_of_scalar(lattice: FrequencyLattice, scalar_coeffs: np.ndarray) -> SpectralField:
    return SpectralField(lattice, 1j * lattice.xi * scalar_coeffs[None, ...])


def laplacian(f: SpectralField) -> SpectralField:
    return SpectralField(f.lattice, -f.lattice.xi_sq * f.coeffs)


def leray_project(f: SpectralField, return_gradient_part: bool = False):
    """Orthogonal projection onto divergence-free fields, per mode
    P = I - xi xi^T / |xi|^2.  Requires an empty zero mode.
    """
    c = f.coeffs
    if abs(c[0, 0, 0, 0]) + abs(c[1, 0, 0, 0]) + abs(c[2, 0, 0, 0]) > 0:
        raise ZeroModeError("leray_project: zero-mode coefficient must vanish")
    lat = f.lattice
    xi_dot = np.einsum("c...,c...->...", lat.xi, c)
    grad = lat.xi * (xi_dot * lat.inv_xi_sq)[None, ...]
    sol = SpectralField(lat, c - grad)
    if return_gradient_part:
        return sol, SpectralField(lat, grad)
    return sol


# ---------------------------------------------------------------------------
# Dealiased pointwise products
# ---------------------------------------------------------------------------

def _truncate(f: SpectralField, rule: str) -> SpectralField:
    if rule == "none":
        return f
    return SpectralField(f.lattice, f.coeffs * f.lattice.dealias_mask(rule))


def _physical_pair(a: SpectralField, b: SpectralField, rule: str):
    _check_same_lattice(a, b)
    return to_physical(_truncate(a, rule)), to_physical(_truncate(b, rule))


def _forward_vector(lattice: FrequencyLattice, phys: np.ndarray, rule: str) -> SpectralField:
    out = from_physical(lattice, phys, zero_mean=True)
    return _truncate(out, rule)


def pointwise_product(a: SpectralField, b: SpectralField, kind: str,
                      rule: str = "two_thirds"):
    """Spectral coefficients of a physical-space product of two fields.

    kind: 'cross' (a x b), 'tensor-divergence' (div(a (x) b)) or 'dot' (a . b,
    returned as a scalar coefficient array).  The output is truncated to the
    dealias-safe band of ``rule`` and its zero mode is discarded.
    """
    pa, pb = _physical_pair(a, b, rule)
    if kind == "cross":
        return _forward_vector(a.lattice, _cross_phys(pa, pb), rule)
    if kind == "dot":
        dot = np.einsum("c...,c...->...", pa, pb)
        n = a.lattice.n
        c = np.fft.fftn(dot) / (n ** 3)
        c[0, 0, 0] = 0.0
        return c * a.lattice.dealias_mask(rule)
    if kind == "tensor-divergence":
        lat = a.lattice
        out = np.zeros((3, lat.n, lat.n, lat.n), dtype=np.complex128)
        for i in range(3):
            for j in range(3):
                cij = np.fft.fftn(pa[i] * pb[j]) / (lat.n ** 3)
                out[i] += 1j * lat.xi[j] * cij
        out[:, 0, 0, 0] = 0.0
        return _truncate(SpectralField(lat, out), rule)
    raise ValueError(f"unknown product kind {kind!r}")


def _cross_phys(pa: np.ndarray, pb: np.ndarray) -> np.ndarray:
    out = np.empty_like(pa)
    out[0] = pa[1] * pb[2] - pa[2] * pb[1]
    out[1] = pa[2] * pb[0] - pa[0] * pb[2]
    out[2] = pa[0] * pb[1] - pa[1] * pb[0]
    return out


def cross_product(a: SpectralField, b: SpectralField, rule: str = "two_thirds") -> SpectralField:
    return pointwise_product(a, b, "cross", rule)


def triple_cross_chain(u: SpectralField, b1: SpectralField, b2: SpectralField) -> SpectralField:
    """(u x b1) x b2 as two quadratic products, 1/2-rule truncation applied once.

    The inputs are truncated to the half band up front; the intermediate
    product is then exact on the grid and the final output is restricted to
    the half band, which the aliased images of the cubic term cannot reach.
    """
    _check_same_lattice(u, b1)
    _check_same_lattice(u, b2)
    lat = u.lattice
    pu = to_physical(_truncate(u, "half"))
    pb1 = to_physical(_truncate(b1, "half"))
    pb2 = to_physical(_truncate(b2, "half"))
    w = _cross_phys(pu, pb1)          # spectrum fits the grid: 2*Khalf < n/2
    out = _cross_phys(w, pb2)
    return _forward_vector(lat, out, "half")


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def l2_norm(f: SpectralField) -> float:
    """L^2 norm over the box; equals sqrt(L^3 sum |coeffs|^2) by Parseval."""
    return float(np.sqrt(f.lattice.L ** 3 * np.sum(np.abs(f.coeffs) ** 2)))


def h_dot_norm(f: SpectralField, s: float) -> float:
    """Modewise homogeneous Sobolev norm sqrt(L^3 sum |xi|^{2s} |coeffs|^2)."""
    w = np.where(f.lattice.nonzero, f.lattice.xi_sq, 1.0) ** s
    w = np.where(f.lattice.nonzero, w, 0.0)
    return float(np.sqrt(f.lattice.L ** 3 * np.sum(w * np.abs(f.coeffs) ** 2)))


def linf_norm(f: SpectralField) -> float:
    """Max over physical samples of the Euclidean vector magnitude."""
    p = to_physical(f)
    return float(np.sqrt(np.max(np.einsum("c...,c...->...", p, p))))


def physical_l2_norm(lattice: FrequencyLattice, samples: np.ndarray) -> float:
    """Grid quadrature of the L^2 norm, (L/n)^3 sum |samples|^2."""
    h3 = (lattice.L / lattice.n) ** 3
    return float(np.sqrt(h3 * np.sum(np.asarray(samples) ** 2)))


def max_divergence(f: SpectralField) -> float:
    """max_m |xi . f_hat| relative to the coefficient scale."""
    d = np.abs(divergence(f))
    scale = np.sqrt(np.sum(np.abs(f.coeffs) ** 2)) or 1.0
    return float(np.max(d) / scale)
