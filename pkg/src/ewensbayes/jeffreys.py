"""The default prior for the Ewens concentration parameter.

For a sample of size n >= 2 the prior density is proportional to

    sqrt( (1/beta) * sum_{j=1}^{n-1} j / (beta + j)^2 ),

the square root of the Fisher information.  It is proper (the normalizing
constant C(n) is finite, bounded by pi * sqrt(n(n-1)/2)), strictly
decreasing, log-convex, and so heavy-tailed that no moment exists, which is
why summaries are reported through the median and through induced
functionals: the distribution of the cluster count K and the moments of the
new-cluster probability eta = beta / (beta + n + 1).

All integrals run through :mod:`ewensbayes.quadrature`; results are memoized
per (n, config) because the mixture sampler re-reads them constantly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .quadrature import DEFAULT_QUADRATURE, ImproperLogIntegral, QuadratureConfig
from .special import stirling_log_row

__all__ = [
    "JeffreysPrior",
    "jeffreys_prior",
    "log_density_unnorm",
    "log_density_derivative",
    "normalizing_constant",
    "properness_bound",
    "cdf",
    "quantile",
    "median",
    "a_integral",
    "prior_k_pmf",
    "prior_k_mean",
    "prior_k_var",
    "discovery_moments",
]

# Above this, sum_j j/(beta+j)^2 is evaluated by its tail asymptote to dodge
# float overflow in (beta + j)^2; the switch point keeps the relative error
# of the asymptote below ~1e-90 for any n this package handles.
_ASYMPTOTIC_BETA = 1e100


def _check_n(n: int) -> int:
    if n < 2 or n != int(n):
        raise DomainError(f"the prior needs a sample size n >= 2, got {n!r}")
    return int(n)


def log_fisher_sum(beta, n: int):
    """ln sum_{j=1}^{n-1} j/(beta+j)^2, finite for any beta in [0, inf)."""
    beta = np.asarray(beta, dtype=float)
    js = np.arange(1, n)
    safe = np.minimum(beta, _ASYMPTOTIC_BETA)
    direct = np.log(np.sum(js / (safe[..., None] + js) ** 2, axis=-1))
    with np.errstate(divide="ignore"):
        tail = math.log(n * (n - 1) / 2.0) - 2.0 * np.log(beta)
    out = np.where(beta > _ASYMPTOTIC_BETA, tail, direct)
    return out if out.ndim else float(out)


def log_density_unnorm(beta, n: int):
    """ln of the unnormalized prior density, 0.5*ln[(1/beta) * S_n(beta)]."""
    n = _check_n(n)
    beta_arr = np.asarray(beta, dtype=float)
    if np.any(beta_arr <= 0.0):
        raise DomainError("log_density_unnorm requires beta > 0")
    out = 0.5 * (-np.log(beta_arr) + log_fisher_sum(beta_arr, n))
    return out if out.ndim else float(out)


def log_density_derivative(beta, n: int):
    """Closed-form d/dbeta of the log prior: -1/(2 beta) - S3/S2 < 0."""
    n = _check_n(n)
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0.0):
        raise DomainError("log_density_derivative requires beta > 0")
    js = np.arange(1, n)
    b = beta[..., None]
    s2 = np.sum(js / (b + js) ** 2, axis=-1)
    s3 = np.sum(js / (b + js) ** 3, axis=-1)
    out = -0.5 / beta - s3 / s2
    return out if out.ndim else float(out)


def properness_bound(n: int) -> float:
    """pi * sqrt(n(n-1)/2), an upper bound for C(n) that is tight at n=2."""
    n = _check_n(n)
    return math.pi * math.sqrt(n * (n - 1) / 2.0)


@lru_cache(maxsize=None)
def _prior_integral(n: int, config: QuadratureConfig) -> ImproperLogIntegral:
    # density = beta^(-1/2) * exp(0.5 * ln S_n(beta)); S_n(0) is finite.
    return ImproperLogIntegral(-0.5, lambda b: 0.5 * log_fisher_sum(b, n), config)


@dataclass(frozen=True)
class JeffreysPrior:
    """Normalized prior for a given sample size, with its quadrature handle."""

    n: int
    log_norm_const: float
    quad: QuadratureConfig
    _integral: ImproperLogIntegral = field(repr=False, compare=False, default=None)

    def log_density(self, beta):
        return log_density_unnorm(beta, self.n) - self.log_norm_const

    def density(self, beta):
        return np.exp(self.log_density(beta))

    def cdf(self, beta: float) -> float:
        return self._integral.cdf(float(beta))

    def quantile(self, p: float) -> float:
        return self._integral.quantile(float(p))

    def median(self) -> float:
        return self.quantile(0.5)


def jeffreys_prior(n: int, config: QuadratureConfig = DEFAULT_QUADRATURE) -> JeffreysPrior:
    n = _check_n(n)
    li = _prior_integral(n, config)
    return JeffreysPrior(n=n, log_norm_const=li.log_value, quad=config, _integral=li)


def normalizing_constant(n: int, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """C(n) = integral of the unnormalized density over (0, inf)."""
    n = _check_n(n)
    return math.exp(_prior_integral(n, config).log_value)


def cdf(beta: float, n: int, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    n = _check_n(n)
    return _prior_integral(n, config).cdf(float(beta))


def quantile(p: float, n: int, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    n = _check_n(n)
    return _prior_integral(n, config).quantile(float(p))


def median(n: int, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    return quantile(0.5, n, config)


@lru_cache(maxsize=None)
def a_integral(
    n: int, m: int, k: int, config: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """log A(n, m, k) = ln integral beta^k * G(beta)/G(beta+n) * pi_m(beta) dbeta.

    ``pi_m`` is the normalized prior for sample size m.  For n = 0 the
    integrand reduces to the prior itself and A = 1.  k = 0 with n >= 1 makes
    the integrand behave like beta^(-3/2) at the origin, which diverges.
    """
    m = _check_n(m)
    if n < 0:
        raise DomainError(f"a_integral requires n >= 0, got {n!r}")
    if not 0 <= k <= n and n > 0:
        raise DomainError(f"k must lie in [0, n], got k={k!r}, n={n!r}")
    if n == 0:
        if k != 0:
            raise DomainError("n = 0 admits only k = 0")
        return 0.0
    if k == 0:
        raise DomainError("A(n, m, 0) diverges at the origin for n >= 1")
    log_c = _prior_integral(m, config).log_value
    js = np.arange(1, n)

    def r(beta: np.ndarray) -> np.ndarray:
        b = np.asarray(beta, dtype=float)[..., None]
        ratio_rest = -np.sum(np.log(b + js), axis=-1)
        return ratio_rest + 0.5 * log_fisher_sum(beta, m) - log_c

    return ImproperLogIntegral(k - 1.5, r, config).log_value


@lru_cache(maxsize=None)
def _prior_k_log_pmf(n: int, config: QuadratureConfig) -> tuple[float, ...]:
    row = stirling_log_row(n)
    return tuple(
        row.log_value(k) + a_integral(n, n, k, config) for k in range(1, n + 1)
    )


def prior_k_pmf(n: int, config: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """Marginal prior pmf of the cluster count: Pr(K=k|n) = |s(n,k)| A(n,n,k)."""
    n = _check_n(n)
    return np.exp(np.array(_prior_k_log_pmf(n, config)))


def _weighted_prior_expectation(n, config, e_shift, extra):
    """integral w(beta) * pi_n(beta) dbeta for w = beta^e_shift * exp(extra)."""
    log_c = _prior_integral(n, config).log_value

    def r(beta: np.ndarray) -> np.ndarray:
        return 0.5 * log_fisher_sum(beta, n) + extra(beta) - log_c

    return math.exp(ImproperLogIntegral(-0.5 + e_shift, r, config).log_value)


def prior_k_mean(n: int, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """E[K | n] under the prior, as the integral of E[K | beta, n]."""
    n = _check_n(n)
    js = np.arange(1, n)

    def log_mean_k(beta):
        b = np.asarray(beta, dtype=float)[..., None]
        return np.log1p(np.sum(b / (b + js), axis=-1))

    return _weighted_prior_expectation(n, config, 0.0, log_mean_k)


def prior_k_var(n: int, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Var[K | n]: mean conditional variance plus variance of the conditional mean.

    The conditional variance integrand uses Var[K|beta,n] = beta * S_n(beta).
    """
    n = _check_n(n)
    js = np.arange(1, n)

    def log_mean_k(beta):
        b = np.asarray(beta, dtype=float)[..., None]
        return np.log1p(np.sum(b / (b + js), axis=-1))

    mean_cond_var = _weighted_prior_expectation(
        n, config, 1.0, lambda b: log_fisher_sum(b, n)
    )
    mean_sq = _weighted_prior_expectation(
        n, config, 0.0, lambda b: 2.0 * log_mean_k(b)
    )
    mean = prior_k_mean(n, config)
    return mean_cond_var + mean_sq - mean * mean


def discovery_moments(
    n: int, config: QuadratureConfig = DEFAULT_QUADRATURE
) -> tuple[float, float]:
    """Prior mean and variance of eta = beta / (beta + n + 1)."""
    n = _check_n(n)
    mean = _weighted_prior_expectation(
        n, config, 1.0, lambda b: -np.log(np.asarray(b, dtype=float) + n + 1.0)
    )
    second = _weighted_prior_expectation(
        n, config, 2.0, lambda b: -2.0 * np.log(np.asarray(b, dtype=float) + n + 1.0)
    )
    return mean, second - mean * mean
