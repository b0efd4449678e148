import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from collapse_sim.two_photon import (DensityKind, FinalStateRule, JointDensity,
                                     OrthogonalProjectionError, Polarization, PolarizationState,
                                     TwoPhotonAmplitude, density_correlated, density_factorized,
                                     density_grid, energy_residual_sd, energy_sum_residual,
                                     entangled_pair_state, final_state, marginal_idler,
                                     marginal_signal, mean_energy, outcome_probability,
                                     project_polarization)

from oracles import gaussian_box_grid, trap

H, V = Polarization.H, Polarization.V
A0 = TwoPhotonAmplitude()
A_SHIFT = TwoPhotonAmplitude(delta=3e13)


def grid_moments(a, density):
    ws, wi = gaussian_box_grid(a)
    S, I = np.meshgrid(ws, wi, indexing="ij")
    p = density(a, S, I)
    m_s = trap(p, wi, axis=1)
    m_i = trap(p, ws, axis=0)
    return ws, wi, p, m_s, m_i


def rel(a, b):
    return abs(a - b) / abs(b)


class TestPolarization:
    def test_pair_state(self):
        s = entangled_pair_state()
        r = 1 / math.sqrt(2)
        assert s.amplitude(V, H) == pytest.approx(r, rel=1e-15)
        assert s.amplitude(H, V) == pytest.approx(r, rel=1e-15)
        assert s.amplitude(H, H) == 0 and s.amplitude(V, V) == 0
        assert s.normalized

    def test_project_mode1_V(self):
        out = project_polarization(entangled_pair_state(), 1, V)
        assert out.post_state == PolarizationState.product(V, H)
        assert out.probability == pytest.approx(0.5, rel=1e-15)
        assert out.post_state.normalized

    def test_project_mode2_V(self):
        out = project_polarization(entangled_pair_state(), 2, V)
        assert out.post_state == PolarizationState.product(H, V)
        assert out.probability == pytest.approx(0.5, rel=1e-15)

    def test_idempotent(self):
        s = PolarizationState.product(V, H)
        out = project_polarization(s, 2, H)
        assert out.post_state == s and out.probability == 1.0

    def test_orthogonal(self):
        with pytest.raises(OrthogonalProjectionError):
            project_polarization(PolarizationState.product(V, H), 1, H)
        assert outcome_probability(PolarizationState.product(V, H), 1, H) == 0.0

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            project_polarization(entangled_pair_state(), 3, H)

    def test_partner_is_orthogonal(self):
        s = entangled_pair_state()
        for mode, other in ((1, 2), (2, 1)):
            for pol in (H, V):
                post = project_polarization(s, mode, pol).post_state
                assert outcome_probability(post, other, pol.orthogonal) == pytest.approx(1.0)

    def test_merge_and_label(self):
        s = PolarizationState(((0.5, H, V), (0.5, H, V), (0.0, V, V)))
        assert s.terms == ((1.0 + 0j, H, V),)
        assert "|H>1|V>2" in s.label

    def test_zero_vector(self):
        with pytest.raises(ValueError):
            PolarizationState(()).normalize()

    coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)

    @given(st.lists(st.tuples(coeff, st.sampled_from([H, V]), st.sampled_from([H, V])),
                    min_size=1, max_size=4))
    def test_completeness(self, terms):
        s = PolarizationState(tuple(terms))
        if s.norm2 < 1e-6:
            return
        s = s.normalize()
        assert s.normalized
        for mode in (1, 2):
            total = outcome_probability(s, mode, H) + outcome_probability(s, mode, V)
            assert total == pytest.approx(1.0, rel=1e-12)


class TestFinalState:
    def test_outcomes(self):
        f = final_state(H, H, "outcomes")
        assert f.state == PolarizationState.product(H, H)
        assert f.rule is FinalStateRule.OUTCOMES

    def test_priorities(self):
        assert final_state(V, V, "d1-priority").state == PolarizationState.product(V, H)
        assert final_state(V, V, "d2-priority").state == PolarizationState.product(H, V)

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            final_state(H, V, "majority")


class TestAmplitude:
    @pytest.mark.parametrize("kw", [dict(sigma_sum=0.0), dict(omega_p=1e14),
                                    dict(delta=math.inf), dict(sigma_diff=-1.0)])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            TwoPhotonAmplitude(**kw)

    def test_truncation_negligible(self):
        assert A0.positivity_truncation_bound() < 1e-15

    def test_peak(self):
        ws, wi = A_SHIFT.mean_signal, A_SHIFT.mean_idler
        assert density_correlated(A_SHIFT, ws, wi) == pytest.approx(A_SHIFT.normalizer, rel=1e-15)
        assert density_correlated(A_SHIFT, ws + 1e11, wi) < A_SHIFT.normalizer

    def test_exchange_symmetry(self):
        ws = np.array([1.19e15, 1.2e15, 1.215e15])
        wi = np.array([1.21e15, 1.205e15, 1.18e15])
        np.testing.assert_allclose(density_correlated(A0, ws, wi),
                                   density_correlated(A0, wi, ws), rtol=1e-14)


class TestGridOracle:
    @pytest.mark.parametrize("a", [A0, A_SHIFT], ids=["delta0", "delta3e13"])
    @pytest.mark.parametrize("fn", [density_correlated, density_factorized], ids=["p", "pN"])
    def test_normalization(self, a, fn):
        ws, wi, p, m_s, _ = grid_moments(a, fn)
        assert abs(trap(m_s, ws) - 1.0) <= 1e-6

    @pytest.mark.parametrize("a", [A0, A_SHIFT], ids=["delta0", "delta3e13"])
    def test_marginals_and_means(self, a):
        ws, wi, _, ms_p, mi_p = grid_moments(a, density_correlated)
        _, _, _, ms_n, mi_n = grid_moments(a, density_factorized)
        peak = marginal_signal(a, a.mean_signal)
        assert np.max(np.abs(ms_p - ms_n)) <= 1e-6 * peak
        assert np.max(np.abs(mi_p - mi_n)) <= 1e-6 * peak
        assert np.max(np.abs(ms_p - marginal_signal(a, ws))) <= 1e-6 * peak
        assert np.max(np.abs(mi_p - marginal_idler(a, wi))) <= 1e-6 * peak
        for m_s, m_i in ((ms_p, mi_p), (ms_n, mi_n)):
            assert rel(trap(ws * m_s, ws), a.mean_signal) <= 1e-6
            assert rel(trap(wi * m_i, wi), a.mean_idler) <= 1e-6

    @pytest.mark.parametrize("kind,fn", [(DensityKind.CORRELATED, density_correlated),
                                         (DensityKind.FACTORIZED, density_factorized)])
    def test_sum_variance(self, kind, fn):
        ws, wi, p, _, _ = grid_moments(A0, fn)
        S, I = np.meshgrid(ws, wi, indexing="ij")
        r = S + I - A0.omega_p
        var = trap(trap(r * r * p, wi, axis=1), ws)
        # the correlated density is narrow along u, so a denser grid is needed there
        tol = 2e-2 if kind is DensityKind.CORRELATED else 1e-6
        assert rel(math.sqrt(var), energy_residual_sd(A0, kind)) <= tol

    def test_sum_variance_rotated_grid(self):
        # integrate the correlated density in (u, w) where both widths are resolved
        u = np.linspace(-8, 8, 2001) * A0.sigma_sum
        w = np.linspace(-8, 8, 2001) * A0.sigma_diff
        U, W = np.meshgrid(u, w, indexing="ij")
        ws, wi = (A0.omega_p + U + W) / 2, (A0.omega_p + U - W) / 2
        p = density_correlated(A0, ws, wi) / 2  # Jacobian of (u, w) -> (ws, wi)
        assert abs(trap(trap(p, w, axis=1), u) - 1) <= 1e-6
        var = trap(trap(U * U * p, w, axis=1), u)
        assert rel(math.sqrt(var), A0.sigma_sum) <= 1e-6


class TestSeparability:
    def test_rank_one(self):
        _, _, p, p_n = density_grid(A0, n=25, half_width=2.0)
        sv_n = np.linalg.svd(p_n / p_n.max(), compute_uv=False)
        sv_p = np.linalg.svd(p / p.max(), compute_uv=False)
        assert sv_n[1] <= 1e-12 * sv_n[0]
        assert sv_p[1] > 1e-3 * sv_p[0]

    def test_cross_products(self):
        ws = A0.mean_signal + np.array([-1e13, 4e12])
        wi = A0.mean_idler + np.array([3e12, -6e12])
        for fn, equal in ((density_factorized, True), (density_correlated, False)):
            lhs = fn(A0, ws[0], wi[0]) * fn(A0, ws[1], wi[1])
            rhs = fn(A0, ws[0], wi[1]) * fn(A0, ws[1], wi[0])
            assert bool(abs(lhs - rhs) <= 1e-12 * max(lhs, rhs)) is equal

    def test_pointwise_differ(self):
        assert density_correlated(A0, 1.2e15, 1.2e15) != density_factorized(A0, 1.2e15, 1.2e15)


class TestEnergy:
    def test_mean_energy_delta0(self):
        for kind in DensityKind:
            ms, mi, e = mean_energy(JointDensity(kind, A0))
            assert ms == mi == A0.omega_p / 2 and e == A0.omega_p

    def test_mean_energy_shift(self):
        ms, mi, e = mean_energy(JointDensity(DensityKind.FACTORIZED, A_SHIFT))
        assert ms - mi == pytest.approx(3e13, rel=1e-12)
        assert e == pytest.approx(A_SHIFT.omega_p, rel=1e-15)

    def test_residual(self):
        assert energy_sum_residual(1.2e15, 1.2e15, A0) == 0.0
        r = energy_sum_residual(np.array([1.2e15, 1.3e15]), np.array([1.2e15, 1.2e15]), A0)
        np.testing.assert_array_equal(r, [0.0, 1e14])

    def test_widths(self):
        assert JointDensity(DensityKind.CORRELATED, A0).sum_sd == 1e12
        assert JointDensity(DensityKind.FACTORIZED, A0).sum_sd == pytest.approx(
            math.sqrt((1e24 + 4e26) / 2), rel=1e-15)
        assert JointDensity(DensityKind.FACTORIZED, A0).sum_sd == pytest.approx(1.42e13, rel=5e-3)

    def test_density_callable(self):
        d = JointDensity("factorized", A0)
        assert d(1.2e15, 1.2e15) == density_factorized(A0, 1.2e15, 1.2e15)
