"""Per-frequency spectral decomposition and exact semigroup of the damped
Maxwell operator.

At each wavevector xi the linear Maxwell block acts on pairs (e, b) with
xi . b = 0 as

    L(xi) (e, b) = (-sigma e + i xi x b,  -i xi x e).

Its eigenvalues are lambda_0 = -sigma on the gradient (irrotational-e)
direction and the roots of  lambda^2 + sigma lambda + |xi|^2 = 0,

    lambda_pm = (-sigma +- sqrt(sigma^2 - 4 |xi|^2)) / 2,

which collide in a Jordan block exactly at |xi| = sigma/2.  For complex roots
lambda_plus takes the +i branch.  The transverse eigenvectors are

    lambda_pm :  (e, (-i/lambda_pm) xi x e)   for any e with xi . e = 0,

equivalently (with the roles of the two roots swapped) ((-i/lambda_mp) xi x b, b).
Any admissible pair decomposes as

    (E, B) = (grad part, 0) + (e0, (-i/lambda_-) xi x e0)
                            + ((-i/lambda_-) xi x b0, b0),

and the semigroup multiplies the three parts by exp(-sigma t), exp(t lambda_-)
and exp(t lambda_+) respectively.  The closed-form solve for (e0, b0) divides
by (lambda_- - lambda_+); within ``DEGENERACY_THRESHOLD`` of the Jordan point
that cancellation is catastrophic, so those modes fall back on a dense
matrix exponential of the 6 x 6 generator (scaling and squaring).

Everything here uses the normalized operator sigma = 1 unless a caller (the
time integrator) passes the resistivity through explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from math import factorial

from scipy.linalg import expm

from .spectral import FrequencyLattice, SpectralField

__all__ = [
    "DEGENERACY_THRESHOLD",
    "DegenerateModeError",
    "ModeDecomposition",
    "LambdaBoundReport",
    "SemigroupCache",
    "eigen_pair",
    "generator_matrix",
    "mode_decompose",
    "recompose",
    "semigroup_apply",
    "duhamel_magnetic",
    "verify_lambda_bounds",
    "propagate_fields",
    "apply_phi_fields",
    "phi1",
    "phi2",
]

DEGENERACY_THRESHOLD = 1e-6


class DegenerateModeError(ValueError):
    """Eigenbasis decomposition refused near the Jordan point |xi| = sigma/2."""


def eigen_pair(xi_norm, sigma: float = 1.0):
    """Both roots of lambda^2 + sigma*lambda + |xi|^2 = 0.

    lambda_plus is the root of larger real part when both are real and takes
    the +i branch otherwise.  Vectorized over ``xi_norm``.
    """
    r = np.asarray(xi_norm, dtype=np.float64)
    disc = np.sqrt(sigma * sigma - 4.0 * r * r + 0j)  # principal root: +i branch
    lam_plus = 0.5 * (-sigma + disc)
    lam_minus = 0.5 * (-sigma - disc)
    if np.ndim(xi_norm) == 0:
        return complex(lam_plus), complex(lam_minus)
    return lam_plus, lam_minus


def _cross_matrix(xi: np.ndarray) -> np.ndarray:
    x, y, z = xi
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def generator_matrix(xi, sigma: float = 1.0) -> np.ndarray:
    """Dense 6x6 generator of the damped Maxwell mode at wavevector xi."""
    X = _cross_matrix(np.asarray(xi, dtype=np.float64))
    M = np.zeros((6, 6), dtype=np.complex128)
    M[:3, :3] = -sigma * np.eye(3)
    M[:3, 3:] = 1j * X
    M[3:, :3] = -1j * X
    return M


def is_degenerate(xi_norm, sigma: float = 1.0):
    r = np.asarray(xi_norm, dtype=np.float64)
    return np.abs(sigma * sigma - 4.0 * r * r) < DEGENERACY_THRESHOLD * sigma * sigma


@dataclass(frozen=True)
class ModeDecomposition:
    """Eigen-coordinates of one (E, B) mode: gradient part plus (e0, b0)."""

    xi: np.ndarray
    grad_part: np.ndarray
    e0: np.ndarray
    b0: np.ndarray
    lambda_plus: complex
    lambda_minus: complex


def mode_decompose(E_hat, B_hat, xi, sigma: float = 1.0,
                   div_tol: float = 1e-9) -> ModeDecomposition:
    """Closed-form eigen decomposition of an admissible (E, B) mode pair.

    Requires xi != 0 and xi . B = 0; refuses modes inside the degeneracy
    window, where the caller must use the direct exponential path.
    """
    xi = np.asarray(xi, dtype=np.float64)
    E_hat = np.asarray(E_hat, dtype=np.complex128)
    B_hat = np.asarray(B_hat, dtype=np.complex128)
    r2 = float(xi @ xi)
    if r2 == 0.0:
        raise ValueError("mode_decompose: xi must be nonzero")
    scale = np.linalg.norm(B_hat)
    if scale > 0 and abs(xi @ B_hat) > div_tol * np.sqrt(r2) * scale:
        raise ValueError("mode_decompose: B mode must be divergence-free")
    if is_degenerate(np.sqrt(r2), sigma):
        raise DegenerateModeError(
            f"|xi|^2 = {r2:.3e} within {DEGENERACY_THRESHOLD} of the Jordan point")
    lam_p, lam_m = eigen_pair(np.sqrt(r2), sigma)
    grad = xi * (xi @ E_hat) / r2
    E_sigma = E_hat - grad
    e0 = (lam_m * E_sigma + 1j * np.cross(xi, B_hat)) / (lam_m - lam_p)
    b0 = B_hat + (1j / lam_m) * np.cross(xi, e0)
    return ModeDecomposition(xi=xi, grad_part=grad, e0=e0, b0=b0,
                             lambda_plus=lam_p, lambda_minus=lam_m)


def recompose(dec: ModeDecomposition) -> tuple[np.ndarray, np.ndarray]:
    E = dec.grad_part + dec.e0 + (-1j / dec.lambda_minus) * np.cross(dec.xi, dec.b0)
    B = (-1j / dec.lambda_minus) * np.cross(dec.xi, dec.e0) + dec.b0
    return E, B


def semigroup_apply(E_hat, B_hat, xi, t: float, sigma: float = 1.0):
    """Exact linear evolution of one damped Maxwell mode over time t >= 0."""
    if t < 0:
        raise ValueError("semigroup_apply: t must be nonnegative")
    xi = np.asarray(xi, dtype=np.float64)
    r2 = float(xi @ xi)
    if r2 == 0.0:
        return np.exp(-sigma * t) * np.asarray(E_hat, complex), np.asarray(B_hat, complex).copy()
    if is_degenerate(np.sqrt(r2), sigma):
        P = expm(t * generator_matrix(xi, sigma))
        v = np.concatenate([np.asarray(E_hat, complex), np.asarray(B_hat, complex)])
        out = P @ v
        return out[:3], out[3:]
    dec = mode_decompose(E_hat, B_hat, xi, sigma)
    fg = np.exp(-sigma * t)
    fm = np.exp(t * dec.lambda_minus)
    fp = np.exp(t * dec.lambda_plus)
    E = fg * dec.grad_part + fm * dec.e0 \
        + fp * (-1j / dec.lambda_minus) * np.cross(xi, dec.b0)
    B = fm * (-1j / dec.lambda_minus) * np.cross(xi, dec.e0) + fp * dec.b0
    return E, B


def duhamel_magnetic(b0_init, B_hat_init, e_series: np.ndarray, xi, t: float,
                     sigma: float = 1.0):
    """Magnetic representation formula with trapezoid forcing quadrature.

    B(t) = e^{t lam_-} B^0 + (e^{t lam_+} - e^{t lam_-}) b^0
           + (i/lam_-) int_0^t (e^{(t-tau) lam_+} - e^{(t-tau) lam_-}) xi x e dtau,

    where ``e_series`` holds samples of the transverse forcing eigenpart e(tau)
    on the uniform grid tau_j = j t / (len - 1).
    """
    xi = np.asarray(xi, dtype=np.float64)
    r = float(np.linalg.norm(xi))
    if r == 0.0:
        raise ValueError("duhamel_magnetic: xi must be nonzero")
    if is_degenerate(r, sigma):
        raise DegenerateModeError("duhamel_magnetic: use the direct exponential path")
    lam_p, lam_m = eigen_pair(r, sigma)
    B0 = np.asarray(B_hat_init, dtype=np.complex128)
    b0 = np.asarray(b0_init, dtype=np.complex128)
    out = np.exp(t * lam_m) * B0 + (np.exp(t * lam_p) - np.exp(t * lam_m)) * b0
    e_series = np.asarray(e_series, dtype=np.complex128)
    if t > 0 and e_series.size and np.any(e_series):
        ns = e_series.shape[0]
        taus = np.linspace(0.0, t, ns)
        kern = np.exp((t - taus) * lam_p) - np.exp((t - taus) * lam_m)
        integrand = kern[:, None] * np.cross(np.broadcast_to(xi, (ns, 3)), e_series)
        out = out + (1j / lam_m) * np.trapezoid(integrand, taus, axis=0)
    return out


# ---------------------------------------------------------------------------
# Eigenvalue bounds (normalized operator)
# ---------------------------------------------------------------------------

@dataclass
class LambdaBoundReport:
    """Worst-case violations of the eigenvalue inequalities over a lattice."""

    shells: np.ndarray                 # unique |xi| values, sorted
    lam_plus: np.ndarray
    lam_minus: np.ndarray
    violation: np.ndarray              # per shell, max over all checked bounds
    eigenbasis_condition: np.ndarray   # measured non-normality, asserted nowhere
    max_violation: float = field(init=False)

    def __post_init__(self):
        self.max_violation = float(self.violation.max()) if self.violation.size else 0.0


def _bound_violations(r: np.ndarray) -> np.ndarray:
    lam_p, lam_m = eigen_pair(r)
    v = np.zeros((10, len(r)))
    low = r <= 0.5
    lp, lm, rl = lam_p[low].real, lam_m[low].real, r[low]
    # ordering chain on [0, 1/2]
    v[0, low] = -1.0 - lm
    v[1, low] = lm - (-0.5)
    v[2, low] = -0.5 - (-rl)
    v[3, low] = -rl - (-2 * rl ** 2)
    v[4, low] = -2 * rl ** 2 - lp
    v[5, low] = lp - (-rl ** 2)
    # bracket for (lam_- - lam_+)/lam_-
    s = np.sqrt(np.maximum(1.0 - 4.0 * rl ** 2, 0.0))
    ratio = (lm - lp) / lm
    v[6, low] = s - ratio
    v[7, low] = ratio - 2.0 * s
    high = r >= 0.5
    lph, lmh, rh = lam_p[high], lam_m[high], r[high]
    v[8, high] = np.maximum(np.abs(lph.real + 0.5), np.abs(lmh.real + 0.5))
    v[9, high] = np.maximum(np.abs(np.abs(lph) - rh), np.abs(np.abs(lmh) - rh))
    # modulus identity |(lam_- - lam_+)/lam_-| = 2 sqrt(1 - 1/(4 r^2))
    extra = np.zeros(len(r))
    expect = 2.0 * np.sqrt(np.maximum(1.0 - 1.0 / (4.0 * rh ** 2), 0.0))
    extra[high] = np.abs(np.abs((lmh - lph) / lmh) - expect)
    return np.maximum(v.max(axis=0), extra)


def _eigenbasis_condition(r: np.ndarray) -> np.ndarray:
    """Condition number of the eigenvector matrix of the 2x2 polarization
    block, a measured proxy for the operator's non-normality."""
    out = np.full(len(r), np.inf)
    lam_p, lam_m = eigen_pair(r)
    for i, (rr, lp, lm) in enumerate(zip(r, lam_p, lam_m)):
        if abs(lp - lm) < 1e-12:
            continue
        # block d/dt (e, b) = [[-1, -i r], [-i r, 0]] (e, b) in a transverse frame
        V = np.array([[lp / (-1j * rr), lm / (-1j * rr)], [1.0, 1.0]])
        out[i] = np.linalg.cond(V)
    return out


def verify_lambda_bounds(lattice: FrequencyLattice) -> LambdaBoundReport:
    """Check the ordering, bracket and modulus identities at every lattice shell."""
    r = np.unique(lattice.xi_norm[lattice.nonzero])
    lam_p, lam_m = eigen_pair(r)
    return LambdaBoundReport(
        shells=r, lam_plus=lam_p, lam_minus=lam_m,
        violation=np.maximum(_bound_violations(r), 0.0),
        eigenbasis_condition=_eigenbasis_condition(r),
    )


# ---------------------------------------------------------------------------
# Whole-lattice application (vectorized eigen path + dense degenerate modes)
# ---------------------------------------------------------------------------

def _cross_field(xi: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = np.empty_like(v)
    out[0] = xi[1] * v[2] - xi[2] * v[1]
    out[1] = xi[2] * v[0] - xi[0] * v[2]
    out[2] = xi[0] * v[1] - xi[1] * v[0]
    return out


def phi1(z: np.ndarray) -> np.ndarray:
    """(e^z - 1)/z, stable near z = 0 (value 1)."""
    z = np.asarray(z, dtype=np.complex128)
    small = np.abs(z) < 1e-2
    zs = np.where(small, 0.0, z)
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = (np.exp(zs) - 1.0) / np.where(small, 1.0, zs)
    series = 1.0 + z / 2 + z ** 2 / 6 + z ** 3 / 24 + z ** 4 / 120 + z ** 5 / 720 + z ** 6 / 5040
    return np.where(small, series, direct)


def phi2(z: np.ndarray) -> np.ndarray:
    """(e^z - 1 - z)/z^2, stable near z = 0 (value 1/2)."""
    z = np.asarray(z, dtype=np.complex128)
    small = np.abs(z) < 0.1
    zs = np.where(small, 1.0, z)
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = (np.exp(zs) - 1.0 - zs) / zs ** 2
    series = sum(z ** k / float(factorial(k + 2)) for k in range(9))
    return np.where(small, series, direct)


class _EigenArrays:
    """Precomputed per-mode eigen data for a lattice (shared by propagators)."""

    def __init__(self, lattice: FrequencyLattice, sigma: float = 1.0):
        self.lattice = lattice
        self.sigma = float(sigma)
        r = lattice.xi_norm
        self.lam_p, self.lam_m = eigen_pair(r, sigma)
        self.degenerate = is_degenerate(r, sigma) & lattice.nonzero
        self.deg_idx = np.argwhere(self.degenerate)
        self.ok = lattice.nonzero & ~self.degenerate

    def decompose(self, Ec: np.ndarray, Bc: np.ndarray):
        lat = self.lattice
        xi = lat.xi
        xi_dot_E = np.einsum("cxyz,cxyz->xyz", xi, Ec)
        grad = xi * (xi_dot_E * lat.inv_xi_sq)[None]
        E_sig = Ec - grad
        denom = np.where(self.ok, self.lam_m - self.lam_p, 1.0)
        e0 = (self.lam_m * E_sig + 1j * _cross_field(xi, Bc)) / denom
        b0 = Bc + (1j / np.where(self.ok, self.lam_m, 1.0)) * _cross_field(xi, e0)
        return grad, e0, b0

    def assemble(self, fgrad, fminus, fplus, grad, e0, b0):
        lat = self.lattice
        xi = lat.xi
        inv_lm = -1j / np.where(self.ok, self.lam_m, 1.0)
        E = fgrad * grad + fminus * e0 + fplus * (inv_lm * _cross_field(xi, b0))
        B = fminus * (inv_lm * _cross_field(xi, e0)) + fplus * b0
        return E, B

    def apply_scalar_function(self, Ec, Bc, f):
        """(E, B) -> f(L)(E, B) for a scalar function applied per eigenvalue.

        ``f`` maps complex eigenvalue arrays to complex arrays; degenerate
        modes are patched afterwards by the caller.
        """
        grad, e0, b0 = self.decompose(Ec, Bc)
        fgrad = f(np.full(self.lattice.xi_sq.shape, -self.sigma, dtype=np.complex128))
        fm = f(self.lam_m)
        fp = f(self.lam_p)
        E, B = self.assemble(fgrad, fm, fp, grad, e0, b0)
        keep = self.ok
        E = np.where(keep[None], E, 0.0)
        B = np.where(keep[None], B, 0.0)
        return E, B


_EIGEN_CACHE: dict = {}


def _eigen_arrays(lattice: FrequencyLattice, sigma: float) -> _EigenArrays:
    key = (lattice.n, lattice.L, float(sigma))
    arr = _EIGEN_CACHE.get(key)
    if arr is None:
        arr = _EigenArrays(lattice, sigma)
        _EIGEN_CACHE[key] = arr
    return arr


def _patch_degenerate(arr: _EigenArrays, Ec_in, Bc_in, E_out, B_out, matfun):
    """Overwrite degenerate-mode outputs with a dense matrix function."""
    for (i, j, k) in arr.deg_idx:
        xi = arr.lattice.xi[:, i, j, k]
        P = matfun(generator_matrix(xi, arr.sigma))
        v = np.concatenate([Ec_in[:, i, j, k], Bc_in[:, i, j, k]])
        out = P @ v
        E_out[:, i, j, k] = out[:3]
        B_out[:, i, j, k] = out[3:]


def propagate_fields(E: SpectralField, B: SpectralField, t: float,
                     sigma: float = 1.0) -> tuple[SpectralField, SpectralField]:
    """Apply the exact Maxwell semigroup to whole fields at once."""
    arr = _eigen_arrays(E.lattice, sigma)
    Eo, Bo = arr.apply_scalar_function(E.coeffs, B.coeffs, lambda lam: np.exp(t * lam))
    if len(arr.deg_idx):
        _patch_degenerate(arr, E.coeffs, B.coeffs, Eo, Bo, lambda M: expm(t * M))
    return SpectralField(E.lattice, Eo), SpectralField(B.lattice, Bo)


def apply_phi_fields(E: SpectralField, B: SpectralField, dt: float, order: int,
                     sigma: float = 1.0) -> tuple[SpectralField, SpectralField]:
    """Apply phi_order(dt * L) to an (E, B) pair; used by the ETD schemes."""
    if order not in (1, 2):
        raise ValueError("only phi_1 and phi_2 are needed")
    arr = _eigen_arrays(E.lattice, sigma)
    fn = phi1 if order == 1 else phi2
    Eo, Bo = arr.apply_scalar_function(E.coeffs, B.coeffs, lambda lam: fn(dt * lam))
    if len(arr.deg_idx):
        _patch_degenerate(arr, E.coeffs, B.coeffs, Eo, Bo,
                          lambda M: _phi_dense(M, dt, order))
    return SpectralField(E.lattice, Eo), SpectralField(B.lattice, Bo)


def _phi_dense(M: np.ndarray, dt: float, order: int) -> np.ndarray:
    """phi_order(dt M) for a small dense matrix, by the augmented expm trick:
    expm([[dtM, I, 0], [0, 0, I], [0, 0, 0]]) has phi_k(dtM) in its top blocks.
    """
    m = M.shape[0]
    aug = np.zeros((m + order * m, m + order * m), dtype=np.complex128)
    aug[:m, :m] = dt * M
    for blk in range(order):
        r0 = blk * m
        aug[r0:r0 + m, r0 + m:r0 + 2 * m] = np.eye(m)
    P = expm(aug)
    return P[:m, order * m:(order + 1) * m]


@dataclass
class SemigroupCache:
    """Propagator entries for a fixed step, built once then read-only."""

    lattice: FrequencyLattice
    dt: float
    sigma: float = 1.0

    def __post_init__(self):
        arr = _eigen_arrays(self.lattice, self.sigma)
        self.fgrad = np.exp(-self.sigma * self.dt)
        self.fminus = np.exp(self.dt * arr.lam_m)
        self.fplus = np.exp(self.dt * arr.lam_p)
        self.degenerate_flags = arr.degenerate
        self.deg_propagators = [
            expm(self.dt * generator_matrix(self.lattice.xi[:, i, j, k], self.sigma))
            for (i, j, k) in arr.deg_idx
        ]
        self._arr = arr

    def apply(self, E: SpectralField, B: SpectralField):
        arr = self._arr
        grad, e0, b0 = arr.decompose(E.coeffs, B.coeffs)
        Eo, Bo = arr.assemble(self.fgrad, self.fminus, self.fplus, grad, e0, b0)
        Eo = np.where(arr.ok[None], Eo, 0.0)
        Bo = np.where(arr.ok[None], Bo, 0.0)
        for P, (i, j, k) in zip(self.deg_propagators, arr.deg_idx):
            v = np.concatenate([E.coeffs[:, i, j, k], B.coeffs[:, i, j, k]])
            out = P @ v
            Eo[:, i, j, k] = out[:3]
            Bo[:, i, j, k] = out[3:]
        return SpectralField(self.lattice, Eo), SpectralField(self.lattice, Bo)
