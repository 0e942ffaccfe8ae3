"""Time-periodic solves, the Picard fixed point, and the resonance constants.

A T-periodic trajectory is stored as a time-Fourier series: a map from the
integer time mode k in [-K, K] to a spatial coefficient field, with the
reality constraint  c_{-k}(-m) = conj(c_k(m)).  The linearized system

    dt u - Lap u = F,   dt E - curl B + E = G,   dt B + curl E = H,  div B = 0

is solved exactly per (k, xi) by the explicit formulas (omega_k = 2 pi k / T,
D = |xi|^2 - omega_k^2 + i omega_k):

    U_k     = F_k / (|xi|^2 + i omega_k)
    B_k     = ((1 + i omega_k) H_k - i xi x G_k) / D
    E_k,sig = (i xi x H_k + i omega_k G_k,sig) / D
    E_k,grad= G_k,grad / (1 + i omega_k)

The denominator D never vanishes for k != 0 because |Im D| = omega_k; this
lower bound is asserted at solve time.  The nonlinear problem is solved by
Picard iteration from zero: each sweep assembles the forcing

    F_n = P(-div(U (x) U) + E x B + (U x B) x B + F_ext)
    G_n = -U x B + G_ext
    H_n = H_ext

by collocation on N_t = 4K + 1 equispaced times (alias-free for the cubic
term) and applies the linear solve.  Convergence is monitored in the
discrete periodic norm

    Xtilde = Linf_t B^{1/2}_{2,(inf,1)}(u) + L2_t B^{3/2}_{2,(inf,1)}(u)
             + Linf_t H^{1/2}(E) + Linf_t H^{1/2}(B)

with per-block time norms taken over the collocation samples.

The resonance constants A_T, B_T, C_T, D_T are the frequency-sup of time-mode
sums; they are evaluated by direct summation over 1 <= |k| <= K plus analytic
tail estimates, with closed-form cotangent sums available as oracles.  The
related suprema alpha0 = sup_t sum_k t/(t^2+k^2) and
beta0 = sup_t sum_k (t+k^2)/(k^2+(t-k^2)^2) are taken over a grid refined
near the square integers where the beta summand peaks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import dyadic as dy
from . import spectral as sp
from .spectral import FrequencyLattice, SpectralField
from .synth import random_field

__all__ = [
    "PeriodicProfile",
    "PicardReport",
    "ResonanceConstants",
    "linear_periodic_solve",
    "linear_solve_residual",
    "assemble_picard_forcing",
    "picard_fixed_point",
    "xtilde_norm",
    "resonance_constants",
    "alpha_beta_sup",
    "default_t_grid",
    "alpha_sum_closed_form",
    "d_constant_closed_form",
    "random_forcing",
]


@dataclass
class PeriodicProfile:
    """Time-Fourier representation of a T-periodic field trajectory.

    ``coeffs`` has shape (2K+1, 3, n, n, n); slot j holds time mode
    k = j - K.  ``n_t`` is the collocation count used for nonlinear work.
    """

    lattice: FrequencyLattice
    T: float
    K: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("period T must be positive")
        if self.K < 0:
            raise ValueError("time cutoff K must be nonnegative")
        n = self.lattice.n
        if self.coeffs.shape != (2 * self.K + 1, 3, n, n, n):
            raise ValueError(
                f"expected coeffs shape {(2 * self.K + 1, 3, n, n, n)}, got {self.coeffs.shape}")

    # -- basic accessors -----------------------------------------------------

    @property
    def n_t(self) -> int:
        return 4 * self.K + 1

    @property
    def k_values(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def mode(self, k: int) -> SpectralField:
        return SpectralField(self.lattice, self.coeffs[k + self.K])

    def time_mean(self) -> SpectralField:
        return self.mode(0)

    @staticmethod
    def zero(lattice: FrequencyLattice, T: float, K: int) -> "PeriodicProfile":
        n = lattice.n
        return PeriodicProfile(lattice, T, K,
                               np.zeros((2 * K + 1, 3, n, n, n), np.complex128))

    def copy(self) -> "PeriodicProfile":
        return PeriodicProfile(self.lattice, self.T, self.K, self.coeffs.copy())

    def __add__(self, other: "PeriodicProfile") -> "PeriodicProfile":
        self._check_compatible(other)
        return PeriodicProfile(self.lattice, self.T, self.K, self.coeffs + other.coeffs)

    def __sub__(self, other: "PeriodicProfile") -> "PeriodicProfile":
        self._check_compatible(other)
        return PeriodicProfile(self.lattice, self.T, self.K, self.coeffs - other.coeffs)

    def __mul__(self, c) -> "PeriodicProfile":
        return PeriodicProfile(self.lattice, self.T, self.K, self.coeffs * c)

    __rmul__ = __mul__

    def _check_compatible(self, other: "PeriodicProfile") -> None:
        if not self.lattice.same_as(other.lattice) or self.T != other.T or self.K != other.K:
            raise ValueError("profiles differ in lattice, period or cutoff")

    # -- reality and evaluation ----------------------------------------------

    def symmetrized(self) -> "PeriodicProfile":
        """Project onto real trajectories: c_{-k}(-m) = conj(c_k(m))."""
        flipped = self.coeffs[::-1]
        mirrored = np.conj(
            np.roll(flipped[..., ::-1, ::-1, ::-1], 1, axis=(-3, -2, -1)))
        return PeriodicProfile(self.lattice, self.T, self.K,
                               0.5 * (self.coeffs + mirrored))

    def reality_defect(self) -> float:
        scale = np.max(np.abs(self.coeffs)) or 1.0
        return float(np.max(np.abs(self.coeffs - self.symmetrized().coeffs)) / scale)

    def at_time(self, t: float) -> SpectralField:
        """Exact time-Fourier summation (no interpolation)."""
        phases = np.exp(2j * np.pi * self.k_values * (t / self.T))
        return SpectralField(self.lattice,
                             np.einsum("k,kcxyz->cxyz", phases, self.coeffs))

    def collocation_times(self, n_t: int | None = None) -> np.ndarray:
        n_t = n_t or self.n_t
        return np.arange(n_t) * (self.T / n_t)

    def to_collocation(self, n_t: int | None = None) -> np.ndarray:
        """Samples at the collocation times, shape (n_t, 3, n, n, n)."""
        n_t = n_t or self.n_t
        if n_t < 2 * self.K + 1:
            raise ValueError("collocation grid cannot represent the profile")
        padded = np.zeros((n_t,) + self.coeffs.shape[1:], dtype=np.complex128)
        for k in self.k_values:
            padded[k % n_t] += self.coeffs[k + self.K]
        return np.fft.ifft(padded, axis=0) * n_t

    @classmethod
    def from_collocation(cls, lattice: FrequencyLattice, T: float, K: int,
                         samples: np.ndarray) -> "PeriodicProfile":
        """Time-DFT of collocation samples, truncated to |k| <= K.

        The sample count must be at least 4K + 1 so that cubic nonlinearities
        of a K-limited profile cannot alias into the retained band.
        """
        n_t = samples.shape[0]
        if n_t < 4 * K + 1:
            raise ValueError(
                f"n_t = {n_t} < 4K+1 = {4 * K + 1}: time aliasing refused")
        hat = np.fft.fft(samples, axis=0) / n_t
        out = np.empty((2 * K + 1,) + samples.shape[1:], dtype=np.complex128)
        for k in range(-K, K + 1):
            out[k + K] = hat[k % n_t]
        return cls(lattice, T, K, out)

    # -- discrete norms --------------------------------------------------------

    def block_norm_table(self, partition: dy.DyadicPartition | None = None) -> np.ndarray:
        """(n_t, n_blocks) instantaneous block L^2 norms at collocation times."""
        if partition is None:
            partition = dy.build_partition(self.lattice)
        samples = self.to_collocation()
        power = np.sum(np.abs(samples) ** 2, axis=1)  # (n_t, n, n, n)
        vol = self.lattice.L ** 3
        return np.sqrt(vol * np.einsum("qxyz,txyz->tq", partition.weights ** 2, power))


def xtilde_norm(U: PeriodicProfile, E: PeriodicProfile, B: PeriodicProfile) -> float:
    """Discrete periodic solution norm used by the Picard iteration."""
    part = dy.build_partition(U.lattice)
    qs = part.qs
    bu = U.block_norm_table(part)
    be = E.block_norm_table(part)
    bb = B.block_norm_table(part)
    linf_u = bu.max(axis=0)
    l2_u = np.sqrt(U.T * np.mean(bu ** 2, axis=0))
    spec_half = dy.HybridBesovSpec(0.5, 0.5, 2, np.inf, 1)
    spec_three_half = dy.HybridBesovSpec(1.5, 1.5, 2, np.inf, 1)
    spec_sob = dy.HybridBesovSpec(0.0, 0.5, 2, 2, 2)
    out = dy.hybrid_aggregate(qs, linf_u, spec_half)
    out += dy.hybrid_aggregate(qs, l2_u, spec_three_half)
    out += dy.hybrid_aggregate(qs, be.max(axis=0), spec_sob)
    out += dy.hybrid_aggregate(qs, bb.max(axis=0), spec_sob)
    return float(out)


# ---------------------------------------------------------------------------
# Linear periodic solve
# ---------------------------------------------------------------------------

def linear_periodic_solve(F: PeriodicProfile, G: PeriodicProfile, H: PeriodicProfile,
                          div_tol: float = 1e-10):
    """Exact per-(k, xi) solve of the linearized periodic system.

    H must be divergence-free; all inputs must have zero spatial mean (the
    SpectralField discipline guarantees this).  Returns (U, E, B).
    """
    F._check_compatible(G)
    F._check_compatible(H)
    for k in H.k_values:
        d = sp.max_divergence(H.mode(k))
        if d > div_tol:
            raise ValueError(f"H time mode {k} is not divergence-free (defect {d:.2e})")
    lat = F.lattice
    T, K = F.T, F.K
    xi = lat.xi
    xi_sq = lat.xi_sq
    U = PeriodicProfile.zero(lat, T, K)
    E = PeriodicProfile.zero(lat, T, K)
    B = PeriodicProfile.zero(lat, T, K)
    for k in range(-K, K + 1):
        om = 2.0 * np.pi * k / T
        Fk = F.coeffs[k + K]
        Gk = G.coeffs[k + K]
        Hk = H.coeffs[k + K]
        heat_den = xi_sq + 1j * om
        with np.errstate(invalid="ignore", divide="ignore"):
            Uk = np.where(lat.nonzero[None], Fk / heat_den, 0.0)
        D = xi_sq - om * om + 1j * om
        if k != 0:
            # the imaginary part bounds |D| away from zero
            assert np.min(np.abs(D[lat.nonzero])) >= abs(om) * (1 - 1e-12)
        xi_cross_G = _cross(xi, Gk)
        xi_cross_H = _cross(xi, Hk)
        with np.errstate(invalid="ignore", divide="ignore"):
            Bk = np.where(lat.nonzero[None],
                          ((1 + 1j * om) * Hk - 1j * xi_cross_G) / D, 0.0)
            # split G into irrotational and solenoidal parts
            xi_dot_G = np.einsum("cxyz,cxyz->xyz", xi, Gk)
            G_grad = xi * (xi_dot_G * lat.inv_xi_sq)[None]
            G_sig = Gk - G_grad
            Ek_sig = np.where(lat.nonzero[None],
                              (1j * xi_cross_H + 1j * om * G_sig) / D, 0.0)
            Ek_grad = G_grad / (1 + 1j * om)
        U.coeffs[k + K] = Uk
        E.coeffs[k + K] = Ek_sig + Ek_grad
        B.coeffs[k + K] = Bk
    return U, E, B


def linear_solve_residual(U: PeriodicProfile, E: PeriodicProfile, B: PeriodicProfile,
                          F: PeriodicProfile, G: PeriodicProfile, H: PeriodicProfile) -> float:
    """Relative discrete residual of the linearized system over all (k, xi)."""
    lat = U.lattice
    T, K = U.T, U.K
    xi = lat.xi
    num = 0.0
    den = 0.0
    for k in range(-K, K + 1):
        om = 2.0 * np.pi * k / T
        Uk, Ek, Bk = U.coeffs[k + K], E.coeffs[k + K], B.coeffs[k + K]
        Fk, Gk, Hk = F.coeffs[k + K], G.coeffs[k + K], H.coeffs[k + K]
        r_u = 1j * om * Uk + lat.xi_sq * Uk - Fk
        r_e = 1j * om * Ek - 1j * _cross(xi, Bk) + Ek - Gk
        r_b = 1j * om * Bk + 1j * _cross(xi, Ek) - Hk
        num += np.sum(np.abs(r_u) ** 2) + np.sum(np.abs(r_e) ** 2) + np.sum(np.abs(r_b) ** 2)
        den += np.sum(np.abs(Fk) ** 2) + np.sum(np.abs(Gk) ** 2) + np.sum(np.abs(Hk) ** 2)
    return float(np.sqrt(num / den)) if den > 0 else float(np.sqrt(num))


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty_like(b)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


# ---------------------------------------------------------------------------
# Picard iteration
# ---------------------------------------------------------------------------

def assemble_picard_forcing(U: PeriodicProfile, E: PeriodicProfile, B: PeriodicProfile,
                            external: tuple[PeriodicProfile, PeriodicProfile, PeriodicProfile]):
    """Nonlinear forcing triple (F_n, G_n, H_n) for the next Picard sweep.

    Products are evaluated at the 4K+1 collocation times with the standard
    dealiasing (2/3 rule for quadratic terms, half-rule chain for the cubic
    term) and transformed back to time modes |k| <= K.
    """
    F_ext, G_ext, H_ext = external
    U._check_compatible(F_ext)
    lat, T, K = U.lattice, U.T, U.K
    n_t = U.n_t
    su = U.to_collocation()
    se = E.to_collocation()
    sb = B.to_collocation()
    f_samples = np.empty_like(su)
    g_samples = np.empty_like(su)
    for j in range(n_t):
        uj = SpectralField(lat, su[j])
        ej = SpectralField(lat, se[j])
        bj = SpectralField(lat, sb[j])
        conv = sp.pointwise_product(uj, uj, "tensor-divergence")
        exb = sp.pointwise_product(ej, bj, "cross")
        uxbxb = sp.triple_cross_chain(uj, bj, bj)
        f_nl = sp.leray_project(SpectralField(lat, -conv.coeffs + exb.coeffs + uxbxb.coeffs))
        f_samples[j] = f_nl.coeffs
        g_samples[j] = -sp.pointwise_product(uj, bj, "cross").coeffs
    F_n = PeriodicProfile.from_collocation(lat, T, K, f_samples)
    G_n = PeriodicProfile.from_collocation(lat, T, K, g_samples)
    F_tot = F_n + _leray_profile(F_ext)
    G_tot = G_n + G_ext
    return F_tot.symmetrized(), G_tot.symmetrized(), H_ext.copy()


def _leray_profile(F: PeriodicProfile) -> PeriodicProfile:
    out = F.copy()
    for k in F.k_values:
        out.coeffs[k + F.K] = sp.leray_project(F.mode(k)).coeffs
    return out


@dataclass
class PicardReport:
    iterates: int
    diff_norms: list[float]
    converged: bool
    final_residual: float
    solution_norm: float
    forcing_norm: float


def picard_fixed_point(external, tol: float = 1e-10, max_iter: int = 100):
    """Iterate Gamma_{n+1} = solve(assemble(Gamma_n)) from Gamma_0 = 0.

    Stops when the relative Xtilde distance between successive iterates drops
    below ``tol``.  Returns ((U, E, B), PicardReport); a run that exhausts
    ``max_iter`` is reported with converged = False.
    """
    F_ext, G_ext, H_ext = external
    lat, T, K = F_ext.lattice, F_ext.T, F_ext.K
    U = PeriodicProfile.zero(lat, T, K)
    E = PeriodicProfile.zero(lat, T, K)
    B = PeriodicProfile.zero(lat, T, K)
    forcing_norm = xtilde_norm(F_ext, G_ext, H_ext)
    diffs: list[float] = []
    converged = False
    blew_up = False
    it = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for it in range(1, max_iter + 1):
            F_n, G_n, H_n = assemble_picard_forcing(U, E, B, external)
            U1, E1, B1 = linear_periodic_solve(F_n, G_n, H_n)
            ref = xtilde_norm(U1, E1, B1)
            if not np.isfinite(ref):
                blew_up = True
                diffs.append(np.inf)
                break
            diff = xtilde_norm(U1 - U, E1 - E, B1 - B)
            rel = diff / ref if ref > 0 else 0.0
            diffs.append(rel)
            U, E, B = U1, E1, B1
            if rel < tol:
                converged = True
                break
    if blew_up:
        return (U, E, B), PicardReport(
            iterates=it, diff_norms=diffs, converged=False,
            final_residual=np.inf, solution_norm=xtilde_norm(U, E, B),
            forcing_norm=forcing_norm)
    # full nonlinear residual: one more assemble/solve sweep
    F_n, G_n, H_n = assemble_picard_forcing(U, E, B, external)
    U2, E2, B2 = linear_periodic_solve(F_n, G_n, H_n)
    sol_norm = xtilde_norm(U, E, B)
    resid = xtilde_norm(U2 - U, E2 - E, B2 - B) / sol_norm if sol_norm > 0 else 0.0
    report = PicardReport(iterates=it, diff_norms=diffs, converged=converged,
                          final_residual=resid, solution_norm=sol_norm,
                          forcing_norm=forcing_norm)
    return (U, E, B), report


# ---------------------------------------------------------------------------
# Resonance constants
# ---------------------------------------------------------------------------

@dataclass
class ResonanceConstants:
    T: float
    K: int
    A: float
    B: float
    C: float
    D: float
    tail_bounds: dict = field(default_factory=dict)
    grid_description: str = ""
    alpha0: float | None = None
    beta0: float | None = None

    def as_dict(self) -> dict:
        out = {"T": self.T, "K": self.K, "A_T": self.A, "B_T": self.B,
               "C_T": self.C, "D_T": self.D, "tail_bounds": self.tail_bounds,
               "grid": self.grid_description}
        if self.alpha0 is not None:
            out["alpha0"] = self.alpha0
        if self.beta0 is not None:
            out["beta0"] = self.beta0
        return out


def alpha_sum_closed_form(t) -> np.ndarray:
    """sum_{k>=1} t/(t^2+k^2) = (pi coth(pi t) - 1/t)/2, the cotangent oracle."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    out[pos] = 0.5 * (np.pi / np.tanh(np.pi * tp) - 1.0 / tp)
    return out if out.ndim else float(out)


def d_constant_closed_form(T: float) -> float:
    """D_T = (1/T) sum_{k != 0} 1/(1 + (2 pi k / T)^2) in closed form."""
    c = 2.0 * np.pi / T
    a = 1.0 / c
    # sum_{k>=1} 1/(1+c^2 k^2) = (pi a coth(pi a) - 1)/2 with a = 1/c
    s = (np.pi * a / np.tanh(np.pi * a) - 1.0) / 2.0
    return float(2.0 * s / T)


def resonance_constants(T: float, lattice: FrequencyLattice, K: int = 512,
                        with_alpha_beta: bool = False) -> ResonanceConstants:
    """Truncated mode sums with tail estimates, sup over lattice shells."""
    if K < 1:
        raise ValueError("K must be >= 1")
    x = np.unique(lattice.xi_sq[lattice.nonzero])  # shells of |xi|^2
    c = 2.0 * np.pi / T

    # A: summand x/(x^2 + c^2 k^2); tail via the exact antiderivative
    ks = np.arange(1, K + 1, dtype=np.float64)
    chunks = 262144
    sumA = np.zeros_like(x)
    sumB = np.zeros_like(x)
    sumC = np.zeros_like(x)
    for lo in range(0, K, chunks):
        kk = ks[lo:lo + chunks]
        om2 = (c * kk) ** 2
        sumA += np.sum(x[:, None] / (x[:, None] ** 2 + om2[None, :]), axis=1)
        den = (x[:, None] - om2[None, :]) ** 2 + om2[None, :]
        sumB += np.sum((1.0 + x[:, None] + om2[None, :]) / den, axis=1)
        sumC += np.sum((x[:, None] + om2[None, :]) / den, axis=1)
    tailA = (1.0 / c) * (np.pi / 2 - np.arctan(c * (K + 0.5) / x))
    tailBC = np.array([_bc_tail(float(xx), c, K) for xx in x])
    A_vals = (2.0 / T) * (sumA + tailA)
    B_vals = (2.0 / T) * (sumB + tailBC)
    C_vals = (2.0 / T) * (sumC + tailBC)
    sumD = np.sum(1.0 / (1.0 + (c * ks) ** 2))
    tailD = (1.0 / c) * (np.pi / 2 - np.arctan(c * (K + 0.5)))
    D_val = (2.0 / T) * (sumD + tailD)
    out = ResonanceConstants(
        T=T, K=K,
        A=float(A_vals.max()), B=float(B_vals.max()),
        C=float(C_vals.max()), D=float(D_val),
        tail_bounds={
            "A": float(np.max((2.0 / T) * x / (x ** 2 + (c * K) ** 2))),
            "BC": float(np.max((2.0 / T) * tailBC)),
            "D": float((2.0 / T) / (1.0 + (c * K) ** 2)),
        },
        grid_description=f"sup over {len(x)} lattice shells, |k| <= {K}",
    )
    if with_alpha_beta:
        a0, b0 = alpha_beta_sup(default_t_grid(), K=min(K * 100, 10 ** 6))
        out.alpha0, out.beta0 = a0, b0
    return out


def _bc_tail(x: float, c: float, K: int) -> float:
    """Midpoint-integral tail of the B/C summand past k = K."""
    def integrand(s):
        w2 = (c * s) ** 2
        return (1.0 + x + w2) / ((x - w2) ** 2 + w2)
    val, _ = quad(integrand, K + 0.5, np.inf, limit=200)
    return val


def default_t_grid(t_max: float = 1e4, n_log: int = 200) -> np.ndarray:
    """Log-spaced grid plus clusters at m^2 +- {0, 1/4, 1/2} for integer m.

    The beta summand peaks where t is near a square integer, so the grid is
    refined there.
    """
    grid = [0.0]
    grid.extend(np.logspace(-2, np.log10(t_max), n_log))
    m_max = int(np.sqrt(t_max))
    for m in range(1, m_max + 1):
        for off in (0.0, 0.25, 0.5):
            for sgn in (1.0, -1.0):
                t = m * m + sgn * off
                if 0 < t <= t_max:
                    grid.append(t)
    return np.unique(np.array(grid))


def alpha_beta_sup(t_grid: np.ndarray, K: int = 10 ** 6):
    """Grid suprema of the truncated alpha and beta sums with tails added."""
    t_grid = np.asarray(t_grid, dtype=np.float64)
    alpha_best = 0.0
    beta_best = 0.0
    ks = None
    chunk = 10 ** 6
    for t in t_grid:
        if t == 0.0:
            continue  # both sums vanish at t = 0 except beta's k^2/k^2 terms
        a_sum = 0.0
        b_sum = 0.0
        for lo in range(1, K + 1, chunk):
            hi = min(lo + chunk - 1, K)
            ks = np.arange(lo, hi + 1, dtype=np.float64)
            a_sum += float(np.sum(t / (t * t + ks * ks)))
            k2 = ks * ks
            b_sum += float(np.sum((t + k2) / (k2 + (t - k2) ** 2)))
        a_sum += np.pi / 2 - np.arctan((K + 0.5) / t)       # exact-antiderivative tail
        if (K + 0.5) ** 2 > 2 * t:
            b_sum += _beta_tail(t, K)
        alpha_best = max(alpha_best, a_sum)
        beta_best = max(beta_best, b_sum)
    # t = 0 contributes sum 1/(1+k^2) to beta
    if np.any(t_grid == 0.0):
        beta_best = max(beta_best, float(alpha_sum_closed_form(1.0)))
    return alpha_best, beta_best


def _beta_tail(t: float, K: int) -> float:
    def integrand(s):
        s2 = s * s
        return (t + s2) / (s2 + (t - s2) ** 2)
    val, _ = quad(integrand, K + 0.5, np.inf, limit=100)
    return val


# ---------------------------------------------------------------------------
# Seeded periodic forcing for tests and experiments
# ---------------------------------------------------------------------------

def random_forcing(lattice: FrequencyLattice, T: float, K: int, seed: int,
                   amplitude: float = 1.0, slope: float = 3.0):
    """Seeded smooth (F, G, H) periodic forcing triple.

    Spatial shapes follow the |m|^{-slope} law; time modes decay like
    (1+|k|)^{-2}.  H is divergence-free.  The triple is scaled so its
    Xtilde norm equals ``amplitude``.
    """
    profs = []
    for comp in range(3):
        prof = PeriodicProfile.zero(lattice, T, K)
        for k in range(-K, K + 1):
            f = random_field(lattice, slope, seed=seed * 97 + 13 * comp + k + 50,
                             divergence_free=(comp == 2))
            prof.coeffs[k + K] = f.coeffs / (1.0 + abs(k)) ** 2
        profs.append(prof.symmetrized())
    F, G, H = profs
    H = _leray_profile(H)
    scale = amplitude / max(xtilde_norm(F, G, H), 1e-300)
    return F * scale, G * scale, H * scale
