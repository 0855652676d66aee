"""Slope/gradient sensitivity matrices, scores, and their identities."""

import numpy as np
import pytest

from sensyn import (InputDomainError, Model, RngStream, SpectralDecomposition,
                    Uniform, analytic_anova, c_as_from_gradients,
                    dgsm_from_gradients, estimate_c_as, estimate_c_gas,
                    finite_slope, gradient_matrix, indicator_upper_sobol,
                    make_example1, make_example2, make_linear,
                    make_quadratic_normal, rank, scores, subspace_analysis,
                    sym_eig)


class TestFiniteSlope:
    def test_linear_exact_slope(self):
        model = make_linear([1.0, 2.0, 3.0])
        d = finite_slope(model, np.array([0.9, 0.1, 0.6]),
                         np.array([0.2, 0.8, 0.3]), RngStream(0))
        np.testing.assert_allclose(d, [1.0, 2.0, 3.0], atol=1e-12)

    def test_indicator_unchanged_component(self):
        model = make_example2()
        theta = model.reference_direction
        z = theta.copy()  # theta.z = 1 > 0
        v = theta + 0.5   # moving any single coordinate up keeps theta.z > 0
        mask = theta > 0.0
        d = finite_slope(model, v, z, RngStream(1))
        assert np.all(d[mask] == 0.0)

    def test_quadratic_midpoint_slope(self):
        # f = z1**2: slope between 0.2 and 0.8 is the derivative at 0.5
        model = make_quadratic_normal([[2.0]], [0.0])
        d = finite_slope(model, np.array([0.8]), np.array([0.2]), RngStream(2))
        assert d[0] == pytest.approx(1.0, abs=1e-12)

    def test_coincident_coordinate_resampled(self):
        model = make_linear([1.0, 2.0])
        z = np.array([0.5, 0.5])
        d = finite_slope(model, z.copy(), z, RngStream(3))
        np.testing.assert_allclose(d, [1.0, 2.0], atol=1e-12)


class TestSlopeMatrix:
    def test_linear_rank_one_exact(self):
        c = np.array([1.0, 2.0, 3.0])
        matrix = estimate_c_gas(make_linear(c), 64, 2, RngStream(4))
        np.testing.assert_allclose(matrix, np.outer(c, c), atol=1e-12)
        spec = sym_eig(matrix)
        assert spec.eigenvalues[0] == pytest.approx(c @ c, rel=1e-12)
        np.testing.assert_allclose(spec.eigenvectors[:, 0], c / np.linalg.norm(c),
                                   atol=1e-8)

    def test_constant_model_zero_matrix(self):
        model = Model(label="const", family="custom",
                      marginals=(Uniform(0.0, 1.0),) * 3,
                      eval_fn=lambda x: np.full(len(x), 7.0))
        matrix = estimate_c_gas(model, 50, 1, RngStream(5))
        np.testing.assert_array_equal(matrix, np.zeros((3, 3)))

    def test_indicator_leading_eigenvector_alignment(self):
        model = make_example2()
        result = subspace_analysis(model, "GAS", RngStream(6), n=10_000)
        u1 = result.spectrum.eigenvectors[:, 0]
        assert abs(u1 @ model.reference_direction) >= 0.99

    def test_indicator_diagonal_ranking(self):
        model = make_example2()
        matrix = estimate_c_gas(model, 10_000, 1, RngStream(7))
        exact = indicator_upper_sobol(model.reference_direction)
        got = rank(np.diag(matrix))[:3]
        np.testing.assert_array_equal(got, rank(exact)[:3])

    def test_quadratic_diagonal_unbiased_with_window(self):
        matrix = estimate_c_gas(
            make_quadratic_normal(np.diag([2.0, 0.0]), [0.0, 1.0]),
            100_000, 1, RngStream(8))
        np.testing.assert_allclose(np.diag(matrix), [2.0, 1.0], rtol=0.02)

    def test_example1_full_rank_scores_match_analytic_ranking(self):
        model = make_example1()
        oracle = analytic_anova(model)
        matrix = estimate_c_gas(model, 10_000, 1, RngStream(9))
        np.testing.assert_array_equal(rank(np.diag(matrix)), rank(oracle.upper))

    def test_noise_cancels_in_slopes(self):
        noisy = estimate_c_gas(make_example1(noise_scale=1.0), 500, 1, RngStream(10))
        clean = estimate_c_gas(make_example1(noise_scale=0.0), 500, 1, RngStream(10))
        np.testing.assert_allclose(noisy, clean, atol=1e-12)

    def test_psd_within_tolerance(self):
        matrix = estimate_c_gas(make_example2(), 2_000, 1, RngStream(11))
        spec = sym_eig(matrix)
        assert np.all(spec.eigenvalues >= -1e-10 * spec.eigenvalues[0])

    def test_deterministic(self):
        a = estimate_c_gas(make_example1(), 500, 1, RngStream(12))
        b = estimate_c_gas(make_example1(), 500, 1, RngStream(12))
        np.testing.assert_array_equal(a, b)

    def test_window_domain(self):
        with pytest.raises(InputDomainError):
            estimate_c_gas(make_example1(), 10, 1, RngStream(0), slope_window=0.95)


class TestGradientMatrix:
    def test_linear_rank_one(self):
        c = np.array([1.0, 2.0, 3.0])
        matrix = estimate_c_as(make_linear(c), 100, 1e-3, RngStream(13))
        np.testing.assert_allclose(matrix, np.outer(c, c), atol=1e-9)

    def test_bilinear_moments(self):
        model = Model(label="xy", family="custom",
                      marginals=(Uniform(0.0, 1.0), Uniform(0.0, 1.0)),
                      eval_fn=lambda x: x[:, 0] * x[:, 1])
        matrix = estimate_c_as(model, 200_000, 1e-3, RngStream(14))
        np.testing.assert_allclose(np.diag(matrix), [1.0 / 3.0, 1.0 / 3.0],
                                   rtol=0.02)
        assert matrix[0, 1] == pytest.approx(0.25, rel=0.02)

    def test_noise_inflates_diagonal(self):
        matrix = estimate_c_as(make_example1(noise_scale=1.0), 2_000, 1e-3,
                               RngStream(15))
        np.testing.assert_allclose(np.diag(matrix), 2e6, rtol=0.33)


class TestScores:
    def test_rank_one_full_attribution(self):
        c = np.array([1.0, 2.0, 3.0])
        spec = sym_eig(estimate_c_gas(make_linear(c), 64, 1, RngStream(16)))
        np.testing.assert_allclose(scores(spec, 1), c**2, atol=1e-10)

    def test_full_rank_equals_diagonal(self):
        matrix = estimate_c_gas(make_example1(), 1_000, 1, RngStream(17))
        spec = sym_eig(matrix)
        np.testing.assert_allclose(scores(spec, 10), np.diag(matrix), atol=1e-10)

    def test_identity_spectrum(self):
        spec = SpectralDecomposition(np.array([2.0, 1.0]), np.eye(2))
        np.testing.assert_allclose(scores(spec, 1), [2.0, 0.0])

    def test_monotone_in_m(self):
        spec = sym_eig(estimate_c_gas(make_example1(), 1_000, 1, RngStream(18)))
        prev = scores(spec, 1)
        for m in range(2, 11):
            cur = scores(spec, m)
            assert np.all(cur >= prev - 1e-12)
            prev = cur

    def test_m_domain(self):
        spec = SpectralDecomposition(np.array([1.0, 1.0]), np.eye(2))
        with pytest.raises(InputDomainError):
            scores(spec, 0)
        with pytest.raises(InputDomainError):
            scores(spec, 3)


class TestIdentities:
    def test_gradient_scores_full_rank_equal_dgsm(self):
        g = gradient_matrix(make_example1(), 2_000, 1e-3, RngStream(19))
        v = dgsm_from_gradients(g)
        spec = sym_eig(c_as_from_gradients(g))
        alpha_full = scores(spec, 10)
        np.testing.assert_allclose(alpha_full, v, atol=1e-10)
        for m in range(1, 10):
            assert np.all(scores(spec, m) <= v + 1e-10)

    def test_score_spill_bound(self):
        spec = sym_eig(estimate_c_gas(make_example1(), 2_000, 1, RngStream(20)))
        full = scores(spec, 10)
        for m in range(1, 10):
            capped = scores(spec, m) + spec.eigenvalues[m]
            assert np.all(capped >= full - 1e-10)

    def test_gas_equals_as_for_linear(self):
        c = np.array([2.0, -1.0, 0.5])
        model = make_linear(c, intervals=[(0.0, 1.0)] * 3)
        gas = estimate_c_gas(model, 128, 1, RngStream(21))
        as_ = estimate_c_as(model, 128, 1e-3, RngStream(22))
        np.testing.assert_allclose(gas, np.outer(c, c), atol=1e-12)
        np.testing.assert_allclose(as_, np.outer(c, c), atol=1e-9)


class TestSubspaceAnalysis:
    def test_selected_rank_and_kind(self):
        result = subspace_analysis(make_linear([1.0, 2.0, 3.0]), "GAS",
                                   RngStream(23), n=128)
        assert result.kind == "GAS"
        assert result.m_selected == 1  # exactly rank one
        np.testing.assert_allclose(result.scores(), [1.0, 4.0, 9.0], atol=1e-10)

    def test_unknown_kind(self):
        with pytest.raises(InputDomainError):
            subspace_analysis(make_example1(), "QAS", RngStream(0), n=16)
