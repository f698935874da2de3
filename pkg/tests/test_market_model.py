import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ddos_event_study.errors import DegenerateRegressorError, DomainError
from ddos_event_study.market_model import (
    AdditiveFit,
    MultiplicativeFit,
    fit_additive,
    fit_multiplicative,
    predict_additive,
    predict_multiplicative,
)

from conftest import aligned_from


def lstsq_oracle(x, y):
    design = np.column_stack([np.ones_like(x), x])
    (a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    return a, b


def standard_errors(x, residual_std):
    n = x.size
    sxx = ((x - x.mean()) ** 2).sum()
    return residual_std * math.sqrt(1 / n + x.mean() ** 2 / sxx), residual_std / math.sqrt(sxx)


class TestFitAdditive:
    def test_identity(self, rng):
        m = rng.normal(0, 0.01, 50)
        fit = fit_additive(aligned_from(m, m))
        assert fit.alpha_hat == 0.0
        assert fit.beta_hat == 1.0
        assert np.all(fit.residuals == 0.0)
        assert fit.residual_std == 0.0

    def test_three_points(self):
        # Exact line through 3 points: normal equations give the line itself.
        m = np.array([0.01, -0.01, 0.02])
        fit = fit_additive(aligned_from(0.002 + 1.5 * m, m))
        assert fit.alpha_hat == pytest.approx(0.002, abs=1e-15)
        assert fit.beta_hat == pytest.approx(1.5, abs=1e-13)
        assert fit.n_obs == 3

    def test_noisy_within_three_se(self, rng):
        m = rng.normal(0.0005, 0.01, 200)
        s = 0.001 + 1.2 * m + rng.normal(0, 0.01, 200)
        fit = fit_additive(aligned_from(s, m))
        se_a, se_b = standard_errors(m, fit.residual_std)
        assert abs(fit.alpha_hat - 0.001) < 3 * se_a
        assert abs(fit.beta_hat - 1.2) < 3 * se_b

    def test_matches_lstsq(self, rng):
        m = rng.normal(0, 0.012, 200)
        s = -0.0004 + 0.7 * m + rng.standard_t(3, 200) * 0.01
        fit = fit_additive(aligned_from(s, m))
        a, b = lstsq_oracle(m, s)
        assert fit.alpha_hat == pytest.approx(a, abs=1e-14)
        assert fit.beta_hat == pytest.approx(b, rel=1e-12)
        expected_std = math.sqrt(((s - a - b * m) ** 2).sum() / 198)
        assert fit.residual_std == pytest.approx(expected_std, rel=1e-12)

    def test_zero_variance_regressor(self):
        with pytest.raises(DegenerateRegressorError):
            fit_additive(aligned_from([0.01, 0.02, 0.03], [0.001] * 3))

    def test_too_few_rows(self):
        with pytest.raises(ValueError):
            fit_additive(aligned_from([0.01, 0.02], [0.0, 0.01]))

    @settings(max_examples=60)
    @given(
        arrays(np.float64, 30, elements=st.floats(-0.05, 0.05)),
        arrays(np.float64, 30, elements=st.floats(-0.05, 0.05)),
        st.floats(0.1, 10),
    )
    def test_residual_properties_and_scaling(self, m, s, c):
        if np.ptp(m) < 1e-4:
            return
        fit = fit_additive(aligned_from(s, m))
        n = fit.n_obs
        assert abs(fit.residuals.sum()) <= 1e-10 * n
        assert abs(fit.residuals @ m) <= 1e-10 * n
        scaled = fit_additive(aligned_from(c * s, m))
        assert scaled.alpha_hat == pytest.approx(c * fit.alpha_hat, abs=1e-12)
        assert scaled.beta_hat == pytest.approx(c * fit.beta_hat, abs=1e-9)

    def test_noiseless_recovery_ten_digits(self, rng):
        m = rng.normal(0, 0.01, 200)
        fit = fit_additive(aligned_from(0.00123 + 0.87654 * m, m))
        assert fit.alpha_hat == pytest.approx(0.00123, rel=1e-10)
        assert fit.beta_hat == pytest.approx(0.87654, rel=1e-10)


class TestFitMultiplicative:
    def test_identity(self, rng):
        m = rng.normal(0, 0.01, 50)
        fit = fit_multiplicative(aligned_from(m, m))
        assert fit.ln_alpha_hat == 0.0
        assert fit.beta_hat == 1.0
        assert fit.alpha_hat == 1.0
        assert np.all(fit.residuals == 0.0)

    def test_power_law_recovery(self, rng):
        m = rng.normal(0, 0.01, 200)
        s = 1.001 * (1 + m) ** 0.8 - 1
        fit = fit_multiplicative(aligned_from(s, m))
        assert fit.beta_hat == pytest.approx(0.8, rel=1e-10)
        assert fit.alpha_hat == pytest.approx(1.001, rel=1e-10)
        assert fit.ln_alpha_hat == pytest.approx(math.log(1.001), rel=1e-9)
        np.testing.assert_allclose(fit.residuals, 0.0, atol=1e-13)

    def test_ratio_identity(self, rng):
        m = rng.normal(0, 0.01, 200)
        s = 0.0003 + 1.1 * m + rng.normal(0, 0.015, 200)
        fit = fit_multiplicative(aligned_from(s, m))
        lhs = (1 + s).sum()
        rhs = fit.alpha_hat * ((1 + m) ** fit.beta_hat).sum()
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)
        assert fit.alpha_hat > 0
        assert abs(fit.log_residuals.sum()) <= 1e-10 * fit.n_obs

    def test_log_space_matches_lstsq(self, rng):
        m = rng.normal(0, 0.01, 200)
        s = rng.normal(0, 0.02, 200) + m
        fit = fit_multiplicative(aligned_from(s, m))
        a, b = lstsq_oracle(np.log1p(m), np.log1p(s))
        assert fit.ln_alpha_hat == pytest.approx(a, abs=1e-14)
        assert fit.beta_hat == pytest.approx(b, rel=1e-12)

    def test_zero_market_returns(self):
        with pytest.raises(DegenerateRegressorError):
            fit_multiplicative(aligned_from([0.01, -0.02, 0.03], [0.0, 0.0, 0.0]))


def additive(alpha, beta):
    return AdditiveFit(alpha, beta, np.zeros(3), 0.01, 3)


def multiplicative(alpha, beta):
    return MultiplicativeFit(math.log(alpha), beta, alpha, np.zeros(3), np.zeros(3), 3)


class TestPredict:
    def test_additive(self):
        assert predict_additive(additive(0, 1), 0.02) == 0.02
        assert predict_additive(additive(0.001, 1.2), 0.01) == pytest.approx(0.013, abs=1e-15)
        assert predict_additive(additive(0.5, 0), 123.0) == 0.5

    def test_multiplicative(self):
        assert predict_multiplicative(multiplicative(1, 1), 0.02) == pytest.approx(1.02, abs=1e-15)
        expected = 1.001 * math.exp(0.8 * math.log(1.01))
        assert predict_multiplicative(multiplicative(1.001, 0.8), 0.01) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(1.0090000, abs=1e-6)
        assert predict_multiplicative(multiplicative(1, 0), 0.37) == 1.0

    def test_multiplicative_domain(self):
        with pytest.raises(DomainError):
            predict_multiplicative(multiplicative(1, 1), -1.0)

    def test_vectorised(self):
        out = predict_multiplicative(multiplicative(1, 1), np.array([0.0, 0.1]))
        np.testing.assert_allclose(out, [1.0, 1.1])
