"""Spectral core: transforms, symbols, Leray projection, dealiased products."""

import numpy as np
import pytest

from nsmx import spectral as sp
from conftest import random_hermitian_field


def rel(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


class TestLattice:
    def test_mode_range(self, lat16):
        assert lat16.m.min() == -8 and lat16.m.max() == 7
        assert np.isclose(lat16.xi_min, 1.0)
        assert np.isclose(lat16.xi_max, 8 * np.sqrt(3.0))

    def test_wavevector_span(self, lat16):
        nz = lat16.xi_norm[lat16.nonzero]
        assert np.isclose(nz.min(), lat16.xi_min)
        assert np.isclose(nz.max(), lat16.xi_max)

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            sp.make_lattice(7)
        with pytest.raises(ValueError):
            sp.make_lattice(4)
        with pytest.raises(ValueError):
            sp.make_lattice(16, L=32 * np.pi)

    def test_box_scaling(self):
        lat = sp.make_lattice(16, L=4 * np.pi)
        assert np.isclose(lat.xi_min, 0.5)


class TestRoundtrip:
    def test_single_mode(self, lat16):
        f = sp.single_mode_field(lat16, (1, 0, 0), (1.0, 0.0, 0.0))
        rt = sp.transform_roundtrip(f)
        assert rel(rt.coeffs, f.coeffs) < 1e-13

    def test_zero_field(self, lat16):
        z = sp.SpectralField.zero(lat16)
        assert np.all(sp.transform_roundtrip(z).coeffs == 0)

    def test_random_16_against_direct_dft_on_8(self, lat8):
        # oracle: evaluate the DFT sum directly on the 8^3 grid
        f = random_hermitian_field(lat8, seed=3)
        n = lat8.n
        x = np.arange(n) * (lat8.L / n)
        X = np.stack(np.meshgrid(x, x, x, indexing="ij"))
        direct = np.zeros((3, n, n, n))
        it = np.ndindex(n, n, n)
        ms = np.fft.fftfreq(n, 1.0 / n).astype(int)
        for i, j, k in it:
            amp = f.coeffs[:, i, j, k]
            if not np.any(amp):
                continue
            phase = np.exp(1j * ((2 * np.pi / lat8.L) *
                                 (ms[i] * X[0] + ms[j] * X[1] + ms[k] * X[2])))
            direct += (amp[:, None, None, None] * phase).real
        assert rel(direct, sp.to_physical(f)) < 1e-12
        rt = sp.transform_roundtrip(f)
        assert rel(rt.coeffs, f.coeffs) < 1e-12

    def test_physical_samples_real(self, rand_field16):
        n = rand_field16.lattice.n
        phys = np.fft.ifftn(rand_field16.coeffs, axes=(1, 2, 3)) * n ** 3
        assert np.max(np.abs(phys.imag)) / np.max(np.abs(phys.real)) < 1e-13


class TestDifferentialOps:
    def test_curl_of_sin_x3(self, lat16):
        # u = (sin x3, 0, 0) -> curl u = (0, cos x3, 0)
        u = sp.single_mode_field(lat16, (0, 0, 1), (-0.5j, 0, 0))
        cu = sp.to_physical(sp.curl(u))
        x3 = np.arange(16) * 2 * np.pi / 16
        assert np.max(np.abs(cu[1] - np.cos(x3)[None, None, :])) < 1e-13
        assert np.max(np.abs(cu[0])) < 1e-14 and np.max(np.abs(cu[2])) < 1e-14

    def test_divergence_of_curl_vanishes(self, rand_field16):
        d = sp.divergence(sp.curl(rand_field16))
        assert np.max(np.abs(d)) < 1e-14 * np.max(np.abs(rand_field16.coeffs)) * 100

    def test_curl_of_gradient_vanishes(self, lat16, rand_field16):
        scal = rand_field16.coeffs[0]
        g = sp.gradient_of_scalar(lat16, scal)
        c = sp.curl(g)
        assert np.max(np.abs(c.coeffs)) < 1e-13 * max(np.max(np.abs(scal)), 1.0) * 100

    def test_laplacian_symbol(self, lat16):
        f = sp.single_mode_field(lat16, (0, 2, 0), (0, 0, 1.0))  # |xi| = 2
        lf = sp.laplacian(f)
        assert rel(lf.coeffs, -4.0 * f.coeffs) < 1e-14


class TestLeray:
    def test_annihilates_gradients(self, lat16, rand_field16):
        g = sp.gradient_of_scalar(lat16, rand_field16.coeffs[0])
        p = sp.leray_project(g)
        assert np.max(np.abs(p.coeffs)) < 1e-13 * np.max(np.abs(g.coeffs) + 1e-300)

    def test_fixes_divergence_free(self, rand_field16):
        v = sp.leray_project(rand_field16)
        again = sp.leray_project(v)
        assert rel(again.coeffs, v.coeffs) < 1e-14

    def test_idempotent_and_orthogonal(self, rand_field16):
        p, grad = sp.leray_project(rand_field16, return_gradient_part=True)
        total = sp.l2_norm(rand_field16) ** 2
        split = sp.l2_norm(p) ** 2 + sp.l2_norm(grad) ** 2
        assert abs(split - total) / total < 1e-12
        assert sp.max_divergence(p) < 1e-13

    def test_rejects_nonzero_mean(self, lat16):
        c = np.zeros((3, 16, 16, 16), dtype=np.complex128)
        c[0, 0, 0, 0] = 1.0
        with pytest.raises(sp.ZeroModeError):
            sp.leray_project(sp.SpectralField(lat16, c))


def convolution_oracle(a, b):
    """O(n^6) circular convolution of coefficient arrays, restricted to the
    linear-convolution (alias-free) part on the dealiased band."""
    lat = a.lattice
    n = lat.n
    ms = np.fft.fftfreq(n, 1.0 / n).astype(int)
    kmax = int(np.ceil(n / 3)) - 1
    amask = lat.dealias_mask("two_thirds")
    ca = a.coeffs * amask
    cb = b.coeffs * amask
    out = np.zeros((3, 3, n, n, n), dtype=np.complex128)  # all component pairs
    nz = np.argwhere(np.any(ca != 0, axis=0))
    for (i, j, k) in nz:
        mi, mj, mk = ms[i], ms[j], ms[k]
        # target = m + p for every p in b's band, computed without wraparound
        for (p, q, r) in np.argwhere(np.any(cb != 0, axis=0)):
            ti, tj, tk = mi + ms[p], mj + ms[q], mk + ms[r]
            if max(abs(ti), abs(tj), abs(tk)) > kmax:
                continue
            out[:, :, ti % n, tj % n, tk % n] += np.multiply.outer(
                ca[:, i, j, k], cb[:, p, q, r])
    return out


class TestProducts:
    def test_zero_factor(self, lat16, rand_field16):
        z = sp.SpectralField.zero(lat16)
        p = sp.pointwise_product(z, rand_field16, "cross")
        assert np.all(p.coeffs == 0)

    def test_self_cross_vanishes(self, lat16):
        f = sp.single_mode_field(lat16, (1, 2, 0), (1.0, 0.5, 0.25j))
        p = sp.pointwise_product(f, f, "cross")
        assert np.max(np.abs(p.coeffs)) < 1e-14

    def test_cross_matches_convolution_oracle(self, lat8):
        a = random_hermitian_field(lat8, seed=10)
        b = random_hermitian_field(lat8, seed=11)
        conv = convolution_oracle(a, b)
        # cross product from the componentwise convolution table
        expect = np.stack([
            conv[1, 2] - conv[2, 1],
            conv[2, 0] - conv[0, 2],
            conv[0, 1] - conv[1, 0],
        ])
        expect[:, 0, 0, 0] = 0.0
        got = sp.pointwise_product(a, b, "cross").coeffs
        assert rel(got, expect) < 1e-12

    def test_tensor_divergence_matches_oracle(self, lat8):
        a = random_hermitian_field(lat8, seed=12)
        b = random_hermitian_field(lat8, seed=13)
        conv = convolution_oracle(a, b)
        lat = lat8
        expect = np.zeros((3,) + conv.shape[2:], dtype=np.complex128)
        for i in range(3):
            for j in range(3):
                expect[i] += 1j * lat.xi[j] * conv[i, j]
        expect[:, 0, 0, 0] = 0.0
        got = sp.pointwise_product(a, b, "tensor-divergence").coeffs
        assert rel(got, expect) < 1e-12

    def test_dot_matches_oracle(self, lat8):
        a = random_hermitian_field(lat8, seed=14)
        b = random_hermitian_field(lat8, seed=15)
        conv = convolution_oracle(a, b)
        expect = conv[0, 0] + conv[1, 1] + conv[2, 2]
        expect[0, 0, 0] = 0.0
        got = sp.pointwise_product(a, b, "dot")
        assert rel(got, expect) < 1e-12

    def test_lattice_mismatch_rejected(self, lat8, lat16):
        a = sp.SpectralField.zero(lat8)
        b = sp.SpectralField.zero(lat16)
        with pytest.raises(sp.LatticeMismatchError):
            sp.pointwise_product(a, b, "cross")

    def test_products_preserve_hermitian_symmetry(self, lat16):
        a = random_hermitian_field(lat16, seed=16)
        b = random_hermitian_field(lat16, seed=17)
        p = sp.pointwise_product(a, b, "cross")
        assert sp.hermitian_defect(p) < 1e-13
        t = sp.triple_cross_chain(a, b, b)
        assert sp.hermitian_defect(t) < 1e-13

    def test_chain_single_mode_against_triple_convolution(self, lat8):
        # low single modes: the half-band chain equals the exact cubic term
        u = sp.single_mode_field(lat8, (1, 0, 0), (0, 1.0, 0))
        b = sp.single_mode_field(lat8, (0, 1, 0), (0, 0, 1.0))
        chain = sp.triple_cross_chain(u, b, b)
        # oracle in physical space on the same grid (inputs are band-limited,
        # the cubic stays within the grid band for these modes)
        pu, pb = sp.to_physical(u), sp.to_physical(b)
        w = np.stack([pu[1] * pb[2] - pu[2] * pb[1],
                      pu[2] * pb[0] - pu[0] * pb[2],
                      pu[0] * pb[1] - pu[1] * pb[0]])
        out = np.stack([w[1] * pb[2] - w[2] * pb[1],
                        w[2] * pb[0] - w[0] * pb[2],
                        w[0] * pb[1] - w[1] * pb[0]])
        oracle = sp.from_physical(lat8, out).coeffs * lat8.dealias_mask("half")
        assert rel(chain.coeffs, oracle) < 1e-13


class TestParsevalSweep:
    def test_hundred_seeded_fields(self, lat16):
        for seed in range(100):
            f = random_hermitian_field(lat16, seed=seed)
            spec = sp.l2_norm(f)
            phys = sp.physical_l2_norm(lat16, sp.to_physical(f))
            assert abs(spec - phys) / spec < 1e-12
