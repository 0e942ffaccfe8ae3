"""Littlewood-Paley blocks, Bony paraproduct, hybrid Besov and windowed-decay norms.

The dyadic partition is built from an explicit C^infinity cutoff: with the
smoothstep  s(x) = f(x) / (f(x) + f(1-x)),  f(x) = exp(-1/x) for x > 0,
define  chi(r) = s((4/3 - r) / (4/3 - 3/4))  (equal to 1 for r <= 3/4 and to 0
for r >= 4/3) and the annulus profile  phi(xi) = chi(|xi|/2) - chi(|xi|).
Then sum_q phi(2^{-q} xi) telescopes to 1 at every xi != 0, and profiles two
or more octaves apart have disjoint supports.

On a finite lattice the block index q is clamped to the representable band
[q_min, q_max]; all spectral mass below q_min is absorbed into block q_min
(the cumulative low-pass), so the reconstruction sum is exact.

Hybrid norms treat low blocks (q <= 0) and high blocks (q > 0) with separate
regularity exponents and summabilities:

    ||phi||  =  ( sum_{q<=0} (2^{q s1} ||D_q phi||_p)^{q1} )^{1/q1}
              + ( sum_{q>0}  (2^{q s2} ||D_q phi||_p)^{q2} )^{1/q2}

with max replacing the sum when q_i = infinity.  The inhomogeneous H^s norm
is realized as the (0, s) hybrid with p = q1 = q2 = 2.

Trajectory norms combine these with (t+1)^{(1-eps)/2}-weighted suprema of
per-block instantaneous or unit-window L^2-in-time norms ("averaged decay").
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import spectral as sp
from .spectral import FrequencyLattice, SpectralField

__all__ = [
    "DyadicPartition",
    "BlockDecomposition",
    "HybridBesovSpec",
    "DecayTrace",
    "build_partition",
    "block_decompose",
    "block_l2_norms",
    "hybrid_norm",
    "hybrid_norm_field",
    "bony_split",
    "solution_norms",
    "SOLUTION_NORM_KINDS",
    "smoothstep",
    "chi_profile",
]

_PARTITION_CACHE: dict = {}


def smoothstep(x: np.ndarray) -> np.ndarray:
    """C^infinity transition from 0 (x <= 0) to 1 (x >= 1)."""
    x = np.asarray(x, dtype=np.float64)
    fx = np.zeros_like(x)
    f1x = np.zeros_like(x)
    pos = x > 0
    pos1 = (1.0 - x) > 0
    with np.errstate(over="ignore"):
        fx[pos] = np.exp(-1.0 / x[pos])
        f1x[pos1] = np.exp(-1.0 / (1.0 - x[pos1]))
    return fx / (fx + f1x)


def chi_profile(r: np.ndarray) -> np.ndarray:
    """Radial low-pass: 1 on [0, 3/4], 0 on [4/3, inf)."""
    return smoothstep((4.0 / 3.0 - np.asarray(r, dtype=np.float64)) / (4.0 / 3.0 - 3.0 / 4.0))


@dataclass(frozen=True)
class DyadicPartition:
    """Block weights w_q(|xi|) evaluated on a lattice, q in [q_min, q_max]."""

    lattice: FrequencyLattice
    q_min: int
    q_max: int
    weights: np.ndarray = field(repr=False)  # (n_blocks, n, n, n), float64

    @property
    def qs(self) -> np.ndarray:
        return np.arange(self.q_min, self.q_max + 1)

    @property
    def n_blocks(self) -> int:
        return self.q_max - self.q_min + 1

    def weight(self, q: int) -> np.ndarray:
        return self.weights[q - self.q_min]


def build_partition(lattice: FrequencyLattice) -> DyadicPartition:
    """Dyadic partition of unity on the lattice's nonzero modes.

    Raises a configuration error when the lattice is too coarse to host at
    least three blocks.
    """
    key = (lattice.n, lattice.L)
    cached = _PARTITION_CACHE.get(key)
    if cached is not None:
        return cached
    r = lattice.xi_norm
    nz = lattice.nonzero
    r_min = float(r[nz].min())
    r_max = float(r.max())
    # block q covers 3/4 * 2^q <= |xi| <= 8/3 * 2^q; q_min is the lowest block
    # whose annulus reaches the smallest lattice frequency
    q_min = int(np.floor(np.log2(3.0 * r_min / 8.0))) + 1
    q_max = int(np.ceil(np.log2(r_max * 4.0 / 3.0))) - 1
    while 0.75 * 2.0 ** q_max > r_max:
        q_max -= 1
    if q_max - q_min + 1 < 3:
        raise ValueError(
            f"lattice n={lattice.n}, L={lattice.L} too coarse: only "
            f"{q_max - q_min + 1} dyadic blocks representable (need >= 3)")
    qs = np.arange(q_min, q_max + 1)
    weights = np.empty((len(qs),) + r.shape, dtype=np.float64)
    for idx, q in enumerate(qs):
        hi = chi_profile(r / 2.0 ** (q + 1))
        if q == q_min:
            weights[idx] = hi  # cumulative low-pass absorbs everything below
        else:
            weights[idx] = hi - chi_profile(r / 2.0 ** q)
    weights[:, ~nz] = 0.0
    part = DyadicPartition(lattice=lattice, q_min=q_min, q_max=int(qs[-1]), weights=weights)
    _PARTITION_CACHE[key] = part
    return part


@dataclass(frozen=True)
class BlockDecomposition:
    """Per-block fields Delta_q phi with their L^2 and L^infinity norms."""

    partition: DyadicPartition
    blocks: np.ndarray = field(repr=False)  # (n_blocks, 3, n, n, n) complex
    l2: np.ndarray = field(repr=False)      # (n_blocks,)
    linf: np.ndarray = field(repr=False)    # (n_blocks,)

    @property
    def qs(self) -> np.ndarray:
        return self.partition.qs

    def block_field(self, q: int) -> SpectralField:
        return SpectralField(self.partition.lattice, self.blocks[q - self.partition.q_min])

    def reconstruct(self) -> SpectralField:
        return SpectralField(self.partition.lattice, self.blocks.sum(axis=0))


def block_decompose(f: SpectralField, partition: DyadicPartition | None = None,
                    with_linf: bool = True) -> BlockDecomposition:
    if partition is None:
        partition = build_partition(f.lattice)
    blocks = partition.weights[:, None] * f.coeffs[None]
    vol = f.lattice.L ** 3
    l2 = np.sqrt(vol * np.sum(np.abs(blocks) ** 2, axis=(1, 2, 3, 4)))
    if with_linf:
        linf = np.empty(partition.n_blocks)
        for i in range(partition.n_blocks):
            linf[i] = sp.linf_norm(SpectralField(f.lattice, blocks[i]))
    else:
        linf = np.zeros(partition.n_blocks)
    return BlockDecomposition(partition=partition, blocks=blocks, l2=l2, linf=linf)


def block_l2_norms(f: SpectralField, partition: DyadicPartition | None = None) -> np.ndarray:
    """Per-block L^2 norms without materializing the block fields."""
    if partition is None:
        partition = build_partition(f.lattice)
    power = np.sum(np.abs(f.coeffs) ** 2, axis=0)
    vol = f.lattice.L ** 3
    return np.sqrt(vol * np.einsum("qxyz,xyz->q", partition.weights ** 2, power))


@dataclass(frozen=True)
class HybridBesovSpec:
    """Exponents for the hybrid norm: (s1, q1) on blocks q <= 0, (s2, q2) above."""

    s1: float
    s2: float
    p: float = 2
    q1: float = 2
    q2: float = 2

    def __post_init__(self):
        if self.p not in (2, np.inf):
            raise ValueError(f"unsupported Lebesgue exponent p={self.p}; only 2 and inf")
        for q in (self.q1, self.q2):
            if q not in (1, 2, np.inf):
                raise ValueError(f"unsupported summability q={q}; only 1, 2, inf")


def _aggregate(weighted: np.ndarray, q: float) -> float:
    if len(weighted) == 0:
        return 0.0
    if q == np.inf:
        return float(np.max(weighted))
    return float(np.sum(weighted ** q) ** (1.0 / q))


def hybrid_aggregate(qs: np.ndarray, values: np.ndarray, spec: HybridBesovSpec) -> float:
    """Combine per-block values (already L^p norms) into the hybrid norm."""
    qs = np.asarray(qs)
    values = np.asarray(values, dtype=np.float64)
    low = qs <= 0
    wlow = 2.0 ** (qs[low] * spec.s1) * values[low]
    whigh = 2.0 ** (qs[~low] * spec.s2) * values[~low]
    return _aggregate(wlow, spec.q1) + _aggregate(whigh, spec.q2)


def hybrid_norm(decomp: BlockDecomposition, spec: HybridBesovSpec) -> float:
    values = decomp.l2 if spec.p == 2 else decomp.linf
    return hybrid_aggregate(decomp.qs, values, spec)


def hybrid_norm_field(f: SpectralField, spec: HybridBesovSpec,
                      partition: DyadicPartition | None = None) -> float:
    if spec.p == 2:
        if partition is None:
            partition = build_partition(f.lattice)
        return hybrid_aggregate(partition.qs, block_l2_norms(f, partition), spec)
    return hybrid_norm(block_decompose(f, partition), spec)


# ---------------------------------------------------------------------------
# Bony decomposition
# ---------------------------------------------------------------------------

def _combine(kind: str, a_phys: np.ndarray, b_phys: np.ndarray) -> np.ndarray:
    if kind == "componentwise":
        return a_phys * b_phys
    if kind == "cross":
        return np.stack([
            a_phys[1] * b_phys[2] - a_phys[2] * b_phys[1],
            a_phys[2] * b_phys[0] - a_phys[0] * b_phys[2],
            a_phys[0] * b_phys[1] - a_phys[1] * b_phys[0],
        ])
    if kind == "dot":
        return np.einsum("c...,c...->...", a_phys, b_phys)[None]
    raise ValueError(f"unknown bony product kind {kind!r}")


def bony_split(u: SpectralField, v: SpectralField, kind: str = "componentwise",
               rule: str = "two_thirds"):
    """Paraproduct decomposition  uv = T_u v + T_v u + R(u, v).

    T_u v = sum_q S_{q-1} u . Delta_q v   (low frequencies of u times blocks
    of v), R = sum_q Delta_q u . (Delta_{q-1} + Delta_q + Delta_{q+1}) v.
    The inputs are dealias-truncated first, so the three parts sum exactly to
    the dealiased product of ``pointwise_product``.
    """
    if not u.lattice.same_as(v.lattice):
        raise sp.LatticeMismatchError("bony_split: fields on different lattices")
    lat = u.lattice
    part = build_partition(lat)
    mask = lat.dealias_mask(rule)
    cu = u.coeffs * mask
    cv = v.coeffs * mask
    nq = part.n_blocks

    def phys_blocks(c):
        blocks = part.weights[:, None] * c[None]
        return np.fft.ifftn(blocks, axes=(2, 3, 4)).real * lat.n ** 3

    pu = phys_blocks(cu)
    pv = phys_blocks(cv)

    shape = _combine(kind, pu[0], pv[0]).shape
    t_uv = np.zeros(shape)
    t_vu = np.zeros(shape)
    rem = np.zeros(shape)

    run_u = np.zeros_like(pu[0])  # S_{q-1} u as q sweeps upward
    run_v = np.zeros_like(pv[0])
    for i in range(nq):
        if i >= 2:
            run_u += pu[i - 2]
            run_v += pv[i - 2]
        t_uv += _combine(kind, run_u, pv[i])
        t_vu += _combine(kind, pu[i], run_v)
        lo = max(i - 1, 0)
        hi = min(i + 1, nq - 1)
        tilde = pv[lo:hi + 1].sum(axis=0)
        rem += _combine(kind, pu[i], tilde)

    def back(phys):
        c = np.fft.fftn(phys, axes=tuple(range(1, phys.ndim))) / lat.n ** 3
        c[..., 0, 0, 0] = 0.0
        return c * mask

    return back(t_uv), back(t_vu), back(rem)


# ---------------------------------------------------------------------------
# Windowed decay traces and the solution/forcing norms
# ---------------------------------------------------------------------------

SOLUTION_NORM_KINDS = ("X1", "X2", "X3", "Y1", "Y2", "Xfull", "LinftyB")

# hybrid exponent tables used by the trajectory norms; epsilon enters at call
# time for the X1 low band and the Y1 band
_SUP_T_SPECS = {
    "X1": lambda eps: HybridBesovSpec(1.5 - eps, 0.5, 2, np.inf, 1),
    "X2": lambda eps: HybridBesovSpec(0.0, 0.5, 2, 2, 2),
    "X3": lambda eps: HybridBesovSpec(1.0, 0.5, 2, 2, 2),
    "LinftyB": lambda eps: HybridBesovSpec(0.5, 0.5, 2, np.inf, 1),
}
_WINDOW_SPECS = {
    "X1": lambda eps: HybridBesovSpec(1.5, 1.5, 2, np.inf, 1),
    "Y1": lambda eps: HybridBesovSpec(-0.5 - eps, -0.5, 2, np.inf, 1),
    "Y2": lambda eps: HybridBesovSpec(0.0, 0.5, 2, 2, 2),
}


@dataclass
class DecayTrace:
    """Per-block L^2 norms of a trajectory sampled on a time grid.

    ``sample_block_l2[j, i]`` is ||Delta_{qs[i]} phi(times[j])||_{L^2}.
    Windows are the unit intervals [n, n+1) in solver time units; window
    norms are formed by trapezoid quadrature on the stored samples.
    """

    qs: np.ndarray
    times: np.ndarray
    sample_block_l2: np.ndarray
    epsilon: float = 0.1

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.sample_block_l2 = np.asarray(self.sample_block_l2, dtype=np.float64)
        if self.sample_block_l2.shape != (len(self.times), len(self.qs)):
            raise ValueError("sample_block_l2 must have shape (n_times, n_blocks)")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if len(self.times) == 0:
            raise ValueError("empty trace")

    @property
    def n_windows(self) -> int:
        return max(int(np.floor(self.times[-1] + 1e-9)), 1)

    def window_l2(self) -> np.ndarray:
        """(n_windows, n_blocks) array of ||Delta_q phi||_{L^2(n, n+1)}."""
        out = np.zeros((self.n_windows, len(self.qs)))
        for n in range(self.n_windows):
            m = (self.times >= n - 1e-12) & (self.times <= n + 1 + 1e-12)
            if m.sum() < 2:
                idx = np.argmin(np.abs(self.times - (n + 0.5)))
                out[n] = self.sample_block_l2[idx]
                continue
            t = self.times[m]
            v = self.sample_block_l2[m] ** 2
            out[n] = np.sqrt(np.trapezoid(v, t, axis=0))
        return out

    def window_sup(self) -> np.ndarray:
        out = np.zeros((self.n_windows, len(self.qs)))
        for n in range(self.n_windows):
            m = (self.times >= n - 1e-12) & (self.times <= n + 1 + 1e-12)
            out[n] = self.sample_block_l2[m].max(axis=0)
        return out

    def aggregate_window_l2(self, spec: HybridBesovSpec) -> np.ndarray:
        """Hybrid-aggregated window norms, one scalar per window."""
        w = self.window_l2()
        return np.array([hybrid_aggregate(self.qs, w[n], spec) for n in range(len(w))])


def trace_from_fields(fields: Sequence[SpectralField], times: Sequence[float],
                      epsilon: float = 0.1,
                      partition: DyadicPartition | None = None) -> DecayTrace:
    if partition is None:
        partition = build_partition(fields[0].lattice)
    samples = np.stack([block_l2_norms(f, partition) for f in fields])
    return DecayTrace(qs=partition.qs, times=np.asarray(times, float),
                      sample_block_l2=samples, epsilon=epsilon)


def _weighted_sup_t(trace: DecayTrace, spec: HybridBesovSpec) -> float:
    w = (trace.times + 1.0) ** ((1.0 - trace.epsilon) / 2.0)
    per_block = np.max(w[:, None] * trace.sample_block_l2, axis=0)
    return hybrid_aggregate(trace.qs, per_block, spec)


def _weighted_sup_window(trace: DecayTrace, spec: HybridBesovSpec) -> float:
    wl2 = trace.window_l2()
    ns = np.arange(wl2.shape[0])
    w = (ns + 1.0) ** ((1.0 - trace.epsilon) / 2.0)
    per_block = np.max(w[:, None] * wl2, axis=0)
    return hybrid_aggregate(trace.qs, per_block, spec)


def _sup_t(trace: DecayTrace, spec: HybridBesovSpec) -> float:
    per_block = np.max(trace.sample_block_l2, axis=0)
    return hybrid_aggregate(trace.qs, per_block, spec)


def solution_norms(trace: DecayTrace, which: str) -> float:
    """Weighted-decay trajectory norms.

    X1      velocity norm: weighted sup-in-t over the (3/2-eps, 1/2) hybrid
            plus weighted sup of unit-window L^2 norms in the 3/2 hybrid
    X2      electric field: weighted sup-in-t of the inhomogeneous H^{1/2}
    X3      magnetic field: weighted sup-in-t of the (1, 1/2) hybrid
    Y1      force norm: weighted sup of window L^2 in the (-1/2-eps, -1/2)
            hybrid with summability (inf, 1)
    Y2      weighted sup of window L^2 in H^{1/2}
    LinftyB unweighted sup-in-t of the (1/2, 1/2) hybrid, summability (inf, 1)
    Xfull   X1 + LinftyB (the velocity component of the product space)
    """
    eps = trace.epsilon
    if which == "X1":
        return (_weighted_sup_t(trace, _SUP_T_SPECS["X1"](eps))
                + _weighted_sup_window(trace, _WINDOW_SPECS["X1"](eps)))
    if which in ("X2", "X3", "LinftyB"):
        fn = _sup_t if which == "LinftyB" else _weighted_sup_t
        return fn(trace, _SUP_T_SPECS[which](eps))
    if which in ("Y1", "Y2"):
        return _weighted_sup_window(trace, _WINDOW_SPECS[which](eps))
    if which == "Xfull":
        return solution_norms(trace, "X1") + solution_norms(trace, "LinftyB")
    raise ValueError(f"unknown norm kind {which!r}; options: {SOLUTION_NORM_KINDS}")
