"""Seeded synthetic fields with prescribed spectral slope.

Coefficients have modulus exactly |m|^{-a} (up to one global scale) and
uniformly random phases, antisymmetrized so the field is real.  Phases are
drawn once on a fixed universal mode cube |m_i| <= 24 and then restricted to
the target lattice, so the same seed produces the *same* function on every
grid that can represent it; refinement from 32^3 to 48^3 only adds new
high modes.  This is what makes the grid-refinement ratio checks of the
estimate harness meaningful.
"""

from __future__ import annotations

import numpy as np

from . import spectral as sp
from .spectral import FrequencyLattice, SpectralField

__all__ = ["random_field", "UNIVERSAL_MODE_CAP"]

UNIVERSAL_MODE_CAP = 24


def _universal_cube(seed: int, slope: float) -> np.ndarray:
    """(3, 49, 49, 49) coefficient cube over m in [-24, 24]^3, Hermitian."""
    M = UNIVERSAL_MODE_CAP
    side = 2 * M + 1
    rng = np.random.default_rng(np.random.SeedSequence([17707, int(seed)]))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=(3, side, side, side))
    # antisymmetric phase => coeff(-m) = conj(coeff(m))
    theta_rev = theta[:, ::-1, ::-1, ::-1]
    phase = np.exp(1j * (theta - theta_rev))
    ax = np.arange(-M, M + 1)
    mm = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"))
    m_norm = np.sqrt((mm.astype(float) ** 2).sum(axis=0))
    with np.errstate(divide="ignore"):
        radial = np.where(m_norm > 0, m_norm ** (-slope), 0.0)
    return radial[None] * phase


def random_field(lattice: FrequencyLattice, slope: float, seed: int,
                 divergence_free: bool = False) -> SpectralField:
    """Seeded random realizable field with |coeff(m)| = |m|^{-slope}."""
    if not 1.0 <= slope <= 5.0:
        raise ValueError(f"spectral slope must lie in [1, 5], got {slope}")
    cube = _universal_cube(int(seed), float(slope))
    M = UNIVERSAL_MODE_CAP
    n = lattice.n
    kmax = min(M, n // 2 - 1)
    c = np.zeros((3, n, n, n), dtype=np.complex128)
    sl_lat = np.r_[0:kmax + 1, n - kmax:n]          # fftn slots for |m| <= kmax
    sl_cube = np.r_[M:M + kmax + 1, M - kmax:M]     # matching cube slots
    c[np.ix_(range(3), sl_lat, sl_lat, sl_lat)] = \
        cube[np.ix_(range(3), sl_cube, sl_cube, sl_cube)]
    c[:, 0, 0, 0] = 0.0
    f = SpectralField(lattice, c)
    if divergence_free:
        f = sp.leray_project(f)
    return f
