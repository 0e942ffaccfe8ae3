"""Time-periodic linear solve, Picard fixed point, resonance constants."""

import numpy as np
import pytest

from nsmx import dyadic as dy, periodic as pd, spectral as sp
from conftest import random_hermitian_field

T2PI = 2 * np.pi


@pytest.fixture(scope="module")
def forcing16(lat16):
    return pd.random_forcing(lat16, T2PI, K=4, seed=3, amplitude=1.0)


class TestPeriodicProfile:
    def test_collocation_roundtrip(self, lat16, forcing16):
        F = forcing16[0]
        back = pd.PeriodicProfile.from_collocation(lat16, F.T, F.K, F.to_collocation())
        assert np.max(np.abs(back.coeffs - F.coeffs)) < 1e-14 * np.max(np.abs(F.coeffs))

    def test_at_time_matches_collocation(self, forcing16):
        F = forcing16[0]
        times = F.collocation_times()
        samples = F.to_collocation()
        for j in (0, 3, 7):
            direct = F.at_time(times[j]).coeffs
            assert np.max(np.abs(direct - samples[j])) < 1e-12 * np.max(np.abs(samples[j]))

    def test_reality(self, lat16, forcing16):
        for prof in forcing16:
            assert prof.reality_defect() < 1e-14
            samples = prof.to_collocation()
            for j in range(samples.shape[0]):
                assert sp.hermitian_defect(sp.SpectralField(prof.lattice, samples[j])) < 1e-13

    def test_time_aliasing_refused(self, lat16):
        K = 4
        samples = np.zeros((4 * K, 3, 16, 16, 16), dtype=complex)  # one short
        with pytest.raises(ValueError, match="aliasing"):
            pd.PeriodicProfile.from_collocation(lat16, T2PI, K, samples)

    def test_time_mean_is_mode_zero(self, forcing16):
        F = forcing16[0]
        n_t = F.n_t
        mean = F.to_collocation().mean(axis=0)
        assert np.max(np.abs(mean - F.time_mean().coeffs)) < 1e-13 * max(
            np.max(np.abs(mean)), 1e-300)
        del n_t


class TestLinearSolve:
    def test_single_mode_substitution(self, lat16):
        # T = 2 pi, k = 1, |xi|^2 = 1: U_1 = F_1 / (1 + i) = F_1 (1 - i)/2
        K = 2
        F = pd.PeriodicProfile.zero(lat16, T2PI, K)
        G = pd.PeriodicProfile.zero(lat16, T2PI, K)
        H = pd.PeriodicProfile.zero(lat16, T2PI, K)
        f = sp.single_mode_field(lat16, (1, 0, 0), (0, 1.0, 0))
        F.coeffs[1 + K] = f.coeffs
        F = F.symmetrized()
        U, _, _ = pd.linear_periodic_solve(F, G, H)
        got = U.coeffs[1 + K][1, 1, 0, 0]
        expect = F.coeffs[1 + K][1, 1, 0, 0] * (1 - 1j) / 2
        assert abs(got - expect) < 1e-14

    def test_time_independent_force_gives_inverse_laplacian(self, lat16):
        K = 2
        f0 = random_hermitian_field(lat16, seed=8)
        F = pd.PeriodicProfile.zero(lat16, T2PI, K)
        F.coeffs[K] = f0.coeffs
        G = pd.PeriodicProfile.zero(lat16, T2PI, K)
        H = pd.PeriodicProfile.zero(lat16, T2PI, K)
        U, _, _ = pd.linear_periodic_solve(F, G, H)
        inv = np.where(lat16.nonzero, lat16.inv_xi_sq, 0.0)
        expect = f0.coeffs * inv[None]
        assert np.max(np.abs(U.coeffs[K] - expect)) < 1e-14 * np.max(np.abs(expect))
        for k in range(-K, K + 1):
            if k != 0:
                assert np.max(np.abs(U.coeffs[k + K])) == 0.0

    def test_seeded_solves_residual_and_divergence(self, lat16):
        for seed in range(20):
            F, G, H = pd.random_forcing(lat16, T2PI, K=4, seed=seed, amplitude=1.0)
            U, E, B = pd.linear_periodic_solve(F, G, H)
            assert pd.linear_solve_residual(U, E, B, F, G, H) < 1e-10
            for k in B.k_values:
                assert sp.max_divergence(B.mode(k)) < 1e-13

    def test_linearity(self, lat16):
        F1, G1, H1 = pd.random_forcing(lat16, T2PI, K=3, seed=31, amplitude=1.0)
        F2, G2, H2 = pd.random_forcing(lat16, T2PI, K=3, seed=32, amplitude=0.5)
        sep = [a.coeffs + b.coeffs for (a, b) in zip(
            pd.linear_periodic_solve(F1, G1, H1), pd.linear_periodic_solve(F2, G2, H2))]
        joint = pd.linear_periodic_solve(F1 + F2, G1 + G2, H1 + H2)
        for a, b in zip(sep, joint):
            assert np.max(np.abs(a - b.coeffs)) < 1e-13 * max(np.max(np.abs(a)), 1e-300)

    def test_nondivfree_H_rejected(self, lat16):
        K = 1
        F = pd.PeriodicProfile.zero(lat16, T2PI, K)
        G = pd.PeriodicProfile.zero(lat16, T2PI, K)
        H = pd.PeriodicProfile.zero(lat16, T2PI, K)
        H.coeffs[K] = random_hermitian_field(lat16, seed=2).coeffs
        with pytest.raises(ValueError, match="divergence-free"):
            pd.linear_periodic_solve(F, G, H)

    def test_E_split_matches_direct_ampere_inversion(self, lat16, forcing16):
        # E from the sigma/grad split equals (G + i xi x B)/(1 + i omega)
        F, G, H = forcing16
        U, E, B = pd.linear_periodic_solve(F, G, H)
        lat = lat16
        for k in E.k_values:
            om = 2 * np.pi * k / E.T
            xi_cross_B = np.stack([
                lat.xi[1] * B.coeffs[k + B.K][2] - lat.xi[2] * B.coeffs[k + B.K][1],
                lat.xi[2] * B.coeffs[k + B.K][0] - lat.xi[0] * B.coeffs[k + B.K][2],
                lat.xi[0] * B.coeffs[k + B.K][1] - lat.xi[1] * B.coeffs[k + B.K][0],
            ])
            direct = (G.coeffs[k + G.K] + 1j * xi_cross_B) / (1 + 1j * om)
            direct[:, 0, 0, 0] = 0.0
            assert np.max(np.abs(E.coeffs[k + E.K] - direct)) < 1e-12 * max(
                np.max(np.abs(direct)), 1e-300)

    def test_energy_identity_of_fluctuations(self, lat16, forcing16):
        # exact spectral identity: d/dt (|E_f|^2 + |B_f|^2)_{H^s} / 2
        #   = <E_f, G_f>_{H^s} - |E_f|^2_{H^s} + <B_f, H_f>_{H^s},
        # and the Cauchy-Schwarz upper bound has the right sign
        F, G, H = forcing16
        U, E, B = pd.linear_periodic_solve(F, G, H)
        lat, T, K = lat16, E.T, E.K
        s = 0.75  # 1/2 + delta with delta = 1/4
        w = (1.0 + lat.xi_sq) ** s
        vol = lat.L ** 3

        def fluct(prof):
            out = prof.copy()
            out.coeffs[prof.K] = 0.0
            return out

        def ddt(prof):
            out = prof.copy()
            for k in prof.k_values:
                out.coeffs[k + prof.K] *= 2j * np.pi * k / T
            return out

        Ef, Bf, Gf, Hf = fluct(E), fluct(B), fluct(G), fluct(H)
        dEf, dBf = ddt(Ef), ddt(Bf)
        times = E.collocation_times()
        sE, sB = Ef.to_collocation(), Bf.to_collocation()
        sdE, sdB = dEf.to_collocation(), dBf.to_collocation()
        sG, sH = Gf.to_collocation(), Hf.to_collocation()

        def wdot(a, b):
            return vol * np.real(np.sum(w[None] * np.conj(a) * b))

        for j in range(len(times)):
            lhs = wdot(sE[j], sdE[j]) + wdot(sB[j], sdB[j])
            rhs = wdot(sE[j], sG[j]) - wdot(sE[j], sE[j]) + wdot(sB[j], sH[j])
            scale = abs(lhs) + abs(rhs) + 1e-300
            assert abs(lhs - rhs) < 1e-11 * scale
            bound = (np.sqrt(wdot(sE[j], sE[j]) * wdot(sG[j], sG[j]))
                     + np.sqrt(wdot(sB[j], sB[j]) * wdot(sH[j], sH[j])))
            assert lhs <= bound + 1e-11 * scale


class TestPicard:
    def test_zero_forces_zero_solution(self, lat16):
        K = 2
        zero = pd.PeriodicProfile.zero(lat16, T2PI, K)
        (U, E, B), rep = pd.picard_fixed_point((zero, zero.copy(), zero.copy()))
        assert rep.iterates == 1 and rep.converged
        assert np.all(U.coeffs == 0) and np.all(E.coeffs == 0) and np.all(B.coeffs == 0)

    def test_amplitude_scaling(self, lat16):
        # first iterate linear in the forcing; second-order correction ~ a^2
        amps = (2e-3, 1e-3)
        firsts, seconds = [], []
        for a in amps:
            F, G, H = pd.random_forcing(lat16, T2PI, K=3, seed=12, amplitude=a)
            zero = pd.PeriodicProfile.zero(lat16, T2PI, 3)
            g1 = pd.linear_periodic_solve(*pd.assemble_picard_forcing(
                zero, zero, zero, (F, G, H)))
            g2 = pd.linear_periodic_solve(*pd.assemble_picard_forcing(
                g1[0], g1[1], g1[2], (F, G, H)))
            firsts.append(pd.xtilde_norm(*g1))
            seconds.append(pd.xtilde_norm(g2[0] - g1[0], g2[1] - g1[1], g2[2] - g1[2]))
        assert np.isclose(firsts[0] / firsts[1], 2.0, rtol=1e-6)
        assert abs(seconds[0] / seconds[1] - 4.0) < 0.8  # 4 +- 20%

    def test_contraction_and_convergence_small_forcing(self, lat16):
        for seed in (0, 1, 2):
            F, G, H = pd.random_forcing(lat16, T2PI, K=3, seed=seed, amplitude=1.0)
            zero = pd.PeriodicProfile.zero(lat16, T2PI, 3)
            first = pd.linear_periodic_solve(*pd.assemble_picard_forcing(
                zero, zero, zero, (F, G, H)))
            scale = 5e-3 / pd.xtilde_norm(*first)
            ext = (F * scale, G * scale, H * scale)
            (U, E, B), rep = pd.picard_fixed_point(ext, tol=1e-10, max_iter=25)
            assert rep.converged and rep.iterates <= 25
            factors = [rep.diff_norms[i + 1] / rep.diff_norms[i]
                       for i in range(1, len(rep.diff_norms) - 1)]
            assert all(f < 0.5 for f in factors)
            assert rep.final_residual < 1e-9

    def test_divergence_report_for_large_forcing(self, lat16):
        F, G, H = pd.random_forcing(lat16, T2PI, K=2, seed=5, amplitude=2e4)
        (_, _, _), rep = pd.picard_fixed_point((F, G, H), tol=1e-10, max_iter=6)
        assert not rep.converged
        assert rep.iterates == 6


class TestResonanceConstants:
    def test_A_approaches_half_and_matches_cotangent_oracle(self, lat16):
        rc = pd.resonance_constants(T2PI, lat16, K=512)
        x_max = float(lat16.xi_sq.max())
        closed = (np.pi / np.tanh(np.pi * x_max) - 1.0 / x_max) / T2PI
        assert abs(rc.A - closed) < 1e-6
        assert 0.45 < rc.A < 0.5  # approaches the analytic limit 1/2 from below

    def test_D_closed_form(self, lat16):
        rc = pd.resonance_constants(T2PI, lat16, K=512)
        closed = pd.d_constant_closed_form(T2PI)
        assert abs(rc.D - closed) < 1e-8
        assert abs(closed - (np.pi / np.tanh(np.pi) - 1.0) / T2PI) < 1e-14
        assert abs(closed - 0.3427159935) < 1e-9

    def test_doubling_K_changes_less_than_tail_bound(self, lat16):
        rc1 = pd.resonance_constants(T2PI, lat16, K=256)
        rc2 = pd.resonance_constants(T2PI, lat16, K=512)
        assert abs(rc2.A - rc1.A) <= rc1.tail_bounds["A"]
        assert abs(rc2.B - rc1.B) <= rc1.tail_bounds["BC"]
        assert abs(rc2.C - rc1.C) <= rc1.tail_bounds["BC"]
        assert abs(rc2.D - rc1.D) <= rc1.tail_bounds["D"]

    def test_constants_nonnegative_finite(self, lat16):
        rc = pd.resonance_constants(4.0, lat16, K=128)
        for v in (rc.A, rc.B, rc.C, rc.D):
            assert np.isfinite(v) and v >= 0


class TestAlphaBeta:
    def test_alpha_zero_at_origin(self):
        a0, _ = pd.alpha_beta_sup(np.array([0.0]), K=100)
        assert a0 == 0.0

    def test_alpha_sup_near_pi_over_2(self):
        grid = pd.default_t_grid(1e4)
        a0, _ = pd.alpha_beta_sup(grid, K=10 ** 5)
        assert abs(a0 - np.pi / 2) < 1e-3
        assert a0 <= 3.5  # stated coarse bound

    def test_alpha_matches_cotangent_closed_form(self):
        for t in (0.5, 3.0, 40.0):
            a, _ = pd.alpha_beta_sup(np.array([t]), K=10 ** 6)
            assert abs(a - pd.alpha_sum_closed_form(t)) < 1e-9

    def test_beta_at_zero(self):
        # sum_k 1/(1+k^2) = (pi coth pi - 1)/2
        _, b = pd.alpha_beta_sup(np.array([0.0]), K=10 ** 4)
        expect = (np.pi / np.tanh(np.pi) - 1.0) / 2.0
        assert abs(b - expect) < 1e-4

    def test_beta_finite_below_paper_bound(self):
        grid = pd.default_t_grid(400.0)
        _, b0 = pd.alpha_beta_sup(grid, K=10 ** 4)
        bound = 16 * (3.5 + np.pi ** 2 / 6) + 5 + 8 * np.pi ** 2 / 25
        assert np.isfinite(b0)
        assert b0 <= bound

    def test_beta_peak_near_squares(self):
        # the summand peaks at t ~ k^2: the sup over the refined grid exceeds
        # the value at a generic midpoint
        _, b_sq = pd.alpha_beta_sup(np.array([25.0]), K=10 ** 4)
        _, b_mid = pd.alpha_beta_sup(np.array([20.5]), K=10 ** 4)
        assert b_sq > b_mid


class TestRandomForcing:
    def test_deterministic(self, lat16):
        a = pd.random_forcing(lat16, T2PI, K=2, seed=9, amplitude=1.0)
        b = pd.random_forcing(lat16, T2PI, K=2, seed=9, amplitude=1.0)
        for x, y in zip(a, b):
            assert np.array_equal(x.coeffs, y.coeffs)

    def test_normalized_amplitude(self, lat16):
        F, G, H = pd.random_forcing(lat16, T2PI, K=2, seed=9, amplitude=0.25)
        assert np.isclose(pd.xtilde_norm(F, G, H), 0.25, rtol=1e-10)
