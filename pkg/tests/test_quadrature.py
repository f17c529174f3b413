"""The adaptive integrator and the half-line transform machinery."""

import math

import numpy as np
import pytest
from scipy.stats import gamma as gamma_dist

from ewensbayes.errors import DomainError, QuadratureError
from ewensbayes.quadrature import (
    ImproperLogIntegral,
    QuadratureConfig,
    adaptive_gauss_kronrod,
)

from oracles import trapezoid_log_integral


class TestConfig:
    def test_defaults(self):
        cfg = QuadratureConfig()
        assert cfg.rel_tol == 1e-10
        assert cfg.max_subdivisions == 200
        assert cfg.split_point == 1.0

    def test_validation(self):
        with pytest.raises(DomainError):
            QuadratureConfig(rel_tol=0.0)
        with pytest.raises(DomainError):
            QuadratureConfig(max_subdivisions=5)
        with pytest.raises(DomainError):
            QuadratureConfig(split_point=-1.0)


class TestAdaptiveGaussKronrod:
    def test_polynomial_exact(self):
        got = adaptive_gauss_kronrod(lambda x: x**6, 0.0, 2.0)
        assert got == pytest.approx(2.0**7 / 7.0, rel=1e-13)

    def test_sine(self):
        got = adaptive_gauss_kronrod(np.sin, 0.0, math.pi)
        assert got == pytest.approx(2.0, rel=1e-12)

    def test_seeded_narrow_spike(self):
        # a spike the default panels would miss entirely
        center, width = 3.5e-4, 4e-5
        f = lambda x: np.exp(-0.5 * ((x - center) / width) ** 2)
        blind = adaptive_gauss_kronrod(f, 0.0, 1.0)
        seeded = adaptive_gauss_kronrod(f, 0.0, 1.0, seeds=(center / 2, center, 3 * center))
        exact = width * math.sqrt(2 * math.pi)
        assert seeded == pytest.approx(exact, rel=1e-9)
        assert blind < exact  # documents why seeding exists

    def test_subdivision_limit_error(self):
        f = lambda x: np.abs(x) ** -0.95
        with pytest.raises(QuadratureError):
            adaptive_gauss_kronrod(f, 1e-14, 1.0, rel_tol=1e-13, max_subdivisions=12)


class TestImproperLogIntegral:
    def test_gamma_density_family(self):
        # integral beta^(a-1) e^(-b beta) = Gamma(a) / b^a
        for a, b in [(0.5, 1.0), (2.0, 0.25), (7.5, 3.0)]:
            li = ImproperLogIntegral(a - 1.0, lambda x, b=b: -b * np.asarray(x, float))
            expected = math.lgamma(a) - a * math.log(b)
            assert li.log_value == pytest.approx(expected, abs=1e-10)

    def test_quantiles_match_scipy_gamma(self):
        a, b = 3.0, 2.0
        li = ImproperLogIntegral(a - 1.0, lambda x: -b * np.asarray(x, float))
        for p in (0.025, 0.3, 0.5, 0.975):
            assert li.quantile(p) == pytest.approx(
                gamma_dist.ppf(p, a, scale=1.0 / b), rel=1e-8
            )

    def test_cdf_partial_consistency(self):
        li = ImproperLogIntegral(1.0, lambda x: -np.asarray(x, float))
        assert li.cdf(1e9) == pytest.approx(1.0, abs=1e-9)
        assert li.cdf(0.0) == 0.0
        mid = li.cdf(2.0)
        assert mid == pytest.approx(gamma_dist.cdf(2.0, 2.0), abs=1e-10)

    def test_tiny_left_exponent_pathology(self):
        # Gamma(0.001, 1): half the mass sits below 1e-300
        li = ImproperLogIntegral(-0.999, lambda x: -np.asarray(x, float))
        assert li.log_value == pytest.approx(math.lgamma(0.001), rel=1e-10)
        assert li.quantile(0.5) == pytest.approx(
            gamma_dist.ppf(0.5, 0.001), rel=1e-6
        )

    def test_heavy_tail_density(self):
        # beta^(-1/2)/(1+beta): integral pi, the half-line Cauchy in disguise
        li = ImproperLogIntegral(-0.5, lambda x: -np.log1p(np.asarray(x, float)))
        assert math.exp(li.log_value) == pytest.approx(math.pi, abs=1e-10)
        assert li.quantile(0.5) == pytest.approx(1.0, rel=1e-9)
        # quantile is tan^2(p*pi/2)
        assert li.quantile(0.9) == pytest.approx(math.tan(0.45 * math.pi) ** 2, rel=1e-8)

    def test_against_trapezoid_oracle(self):
        logf = lambda x: 3.0 * np.log(np.asarray(x, float)) - 2.0 * np.asarray(x, float)
        li = ImproperLogIntegral(3.0, lambda x: -2.0 * np.asarray(x, float))
        grid = np.geomspace(1e-8, 80.0, 400_001)
        oracle = trapezoid_log_integral(logf, grid)
        assert li.log_value == pytest.approx(oracle, abs=1e-6)

    def test_divergent_exponent_rejected(self):
        with pytest.raises(DomainError):
            ImproperLogIntegral(-1.0, lambda x: -np.asarray(x, float))

    def test_quantile_domain(self):
        li = ImproperLogIntegral(0.0, lambda x: -np.asarray(x, float))
        with pytest.raises(DomainError):
            li.quantile(0.0)
        with pytest.raises(DomainError):
            li.quantile(1.0)
