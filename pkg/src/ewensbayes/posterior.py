"""Posterior inference for the concentration parameter given K clusters.

K is sufficient for beta, so every sampler and the deterministic quadrature
oracle work from (n, k).  Three routes are provided:

* random-walk Metropolis on log(beta), the all-purpose sampler;
* the Beta/Gamma augmentation sampler for Gamma priors, which needs no
  tuning parameter;
* normalized 1-D quadrature, used as the deterministic reference and as the
  fast fitting path in the coverage harness.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DomainError, InsufficientDrawsError
from .jeffreys import log_fisher_sum
from .med import Partition
from .quadrature import DEFAULT_QUADRATURE, ImproperLogIntegral, QuadratureConfig
from .special import log_gamma, log_gamma_ratio

__all__ = [
    "JeffreysPriorSpec",
    "GammaPriorSpec",
    "PriorSpec",
    "MCMCConfig",
    "Chain",
    "PosteriorSummary",
    "default_proposal_sd",
    "log_posterior_given_k",
    "metropolis_log_scale",
    "rw_mh_sample",
    "rw_mh_sample_partition",
    "escobar_west_sample",
    "quadrature_posterior_summary",
    "credible_interval",
    "batch_means_se",
]


@dataclass(frozen=True)
class JeffreysPriorSpec:
    """Default prior indexed by the sample size it will be paired with."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("Jeffreys prior needs n >= 2")


@dataclass(frozen=True)
class GammaPriorSpec:
    """Gamma(shape a, rate b) prior on beta."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0):
            raise DomainError("Gamma prior needs a > 0 and b > 0")


PriorSpec = Union[JeffreysPriorSpec, GammaPriorSpec]


def default_proposal_sd(n: int) -> float:
    """Gaussian step on ln(beta): 1.0 up to n=300, sqrt(0.05) beyond."""
    return 1.0 if n <= 300 else math.sqrt(0.05)


@dataclass(frozen=True)
class MCMCConfig:
    iterations: int = 100_000
    burn_in: int = 5_000
    proposal_sd: float | None = None  # None: pick by sample size
    seed: int = 0

    def __post_init__(self):
        if not self.iterations > self.burn_in >= 0:
            raise DomainError("need iterations > burn_in >= 0")
        if self.proposal_sd is not None and not self.proposal_sd > 0.0:
            raise DomainError("proposal_sd must be positive")


@dataclass(frozen=True)
class Chain:
    """Post burn-in draws of beta with the acceptance diagnostic."""

    draws: np.ndarray
    acceptance_rate: float
    config: MCMCConfig

    def __post_init__(self):
        if np.any(self.draws <= 0.0):
            raise DomainError("all chain draws must be positive")


def _check_nk(n: int, k: int):
    if n < 1 or not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n!r}, k={k!r}")


def _log_prior_unnorm(beta: float, prior: PriorSpec, n: int) -> float:
    if isinstance(prior, JeffreysPriorSpec):
        if prior.n != n:
            raise DomainError(
                f"Jeffreys prior index {prior.n} must equal the sample size {n}"
            )
        return 0.5 * (-math.log(beta) + log_fisher_sum(beta, n))
    return (
        prior.a * math.log(prior.b)
        - log_gamma(prior.a)
        + (prior.a - 1.0) * math.log(beta)
        - prior.b * beta
    )


def log_posterior_given_k(beta: float, n: int, k: int, prior: PriorSpec) -> float:
    """Unnormalized log posterior: k*ln(beta) + lnG(beta) - lnG(beta+n) + prior."""
    _check_nk(n, k)
    beta = float(beta)
    if not beta > 0.0:
        raise DomainError("log_posterior_given_k requires beta > 0")
    return (
        k * math.log(beta) + log_gamma_ratio(beta, n) + _log_prior_unnorm(beta, prior, n)
    )


def metropolis_log_scale(
    log_target: Callable[[float], float],
    cfg: MCMCConfig,
    beta0: float,
    proposal_sd: float,
) -> Chain:
    """Random-walk Metropolis on theta = ln(beta) for any target density of beta.

    The move theta' ~ Normal(theta, sd^2) targets f(e^theta) * e^theta, the
    extra e^theta being the Jacobian of the log transform.
    """
    rng = np.random.default_rng(cfg.seed)
    steps = rng.normal(0.0, proposal_sd, cfg.iterations)
    logu = np.log(rng.random(cfg.iterations))
    theta = math.log(beta0)
    current = log_target(math.exp(theta)) + theta
    draws = np.empty(cfg.iterations - cfg.burn_in)
    accepted = 0
    for i in range(cfg.iterations):
        prop = theta + steps[i]
        cand = log_target(math.exp(prop)) + prop
        if logu[i] < cand - current:
            theta, current = prop, cand
            accepted += 1
        if i >= cfg.burn_in:
            draws[i - cfg.burn_in] = math.exp(theta)
    rate = accepted / cfg.iterations
    if rate < 0.1 or rate > 0.9:
        warnings.warn(
            f"Metropolis acceptance rate {rate:.3f} outside [0.1, 0.9]; "
            "consider retuning proposal_sd",
            RuntimeWarning,
        )
    return Chain(draws=draws, acceptance_rate=rate, config=cfg)


def rw_mh_sample(n: int, k: int, prior: PriorSpec, cfg: MCMCConfig) -> Chain:
    """Metropolis chain for the posterior of beta given K = k out of n."""
    _check_nk(n, k)
    sd = cfg.proposal_sd if cfg.proposal_sd is not None else default_proposal_sd(n)
    beta0 = max(float(k), 1.0)
    return metropolis_log_scale(
        lambda b: log_posterior_given_k(b, n, k, prior), cfg, beta0, sd
    )


def rw_mh_sample_partition(p: Partition, prior: PriorSpec, cfg: MCMCConfig) -> Chain:
    """Same chain as ``rw_mh_sample`` run on a full partition.

    K carries all the information about beta, so the partition is reduced to
    (n, K) before sampling; draws are bitwise identical for matching seeds.
    """
    return rw_mh_sample(p.n, p.k, prior, cfg)


def escobar_west_sample(
    n: int, k: int, a: float, b: float, cfg: MCMCConfig
) -> Chain:
    """Augmented Gibbs sampler for a Gamma(a, b) prior; no tuning parameter.

    Alternates the exact conditionals eta | beta ~ Beta(beta+1, n) and
    beta | eta, k ~ w * Gamma(a+k, b - ln eta) + (1-w) * Gamma(a+k-1, b - ln eta)
    with odds w/(1-w) = (a+k-1) / (n * (b - ln eta)).
    """
    _check_nk(n, k)
    if not (a > 0.0 and b > 0.0):
        raise DomainError("escobar_west_sample needs a > 0 and b > 0")
    if not a + k - 1.0 > 0.0:
        raise DomainError("escobar_west_sample needs a + k - 1 > 0")
    rng = np.random.default_rng(cfg.seed)
    beta = a / b if a / b > 0 else 1.0
    draws = np.empty(cfg.iterations - cfg.burn_in)
    log_ak1 = math.log(a + k - 1.0)
    for i in range(cfg.iterations):
        eta = rng.beta(beta + 1.0, n)
        rate = b - math.log(eta)
        # Mixture weight in log space: b can be as small as 1e-3.
        log_odds = log_ak1 - math.log(n) - math.log(rate)
        w = 1.0 / (1.0 + math.exp(-log_odds))
        shape = a + k if rng.random() < w else a + k - 1.0
        beta = rng.gamma(shape, 1.0 / rate)
        # Tiny shapes can underflow to exactly 0; clamp to the smallest
        # positive float so downstream logs stay defined.
        if beta <= 0.0:
            beta = 5e-324
        if i >= cfg.burn_in:
            draws[i - cfg.burn_in] = beta
    return Chain(draws=draws, acceptance_rate=1.0, config=cfg)


@dataclass(frozen=True)
class PosteriorSummary:
    """Quadrature summary: means and equal-tail intervals for beta and eta."""

    mean_beta: float
    ci_beta: tuple[float, float]
    mean_eta: float
    ci_eta: tuple[float, float]
    level: float


def _posterior_integrand(n: int, k: int, prior: PriorSpec):
    """(left exponent, reduced log density) of the unnormalized posterior.

    The full log density is e_left*ln(beta) + r(beta) with r finite at 0,
    the form the improper-integral machinery needs.
    """
    js = np.arange(1, n)

    def log_ratio_rest(beta):
        b = np.asarray(beta, dtype=float)[..., None]
        return -np.sum(np.log(b + js), axis=-1)

    if isinstance(prior, JeffreysPriorSpec):
        if prior.n != n:
            raise DomainError(
                f"Jeffreys prior index {prior.n} must equal the sample size {n}"
            )
        e_left = k - 1.5

        def r(beta):
            return log_ratio_rest(beta) + 0.5 * log_fisher_sum(beta, n)

    else:
        a, b_rate = prior.a, prior.b
        e_left = k + a - 2.0

        def r(beta):
            arr = np.asarray(beta, dtype=float)
            return log_ratio_rest(arr) - b_rate * arr

    return e_left, r


def quadrature_posterior_summary(
    n: int,
    k: int,
    prior: PriorSpec,
    level: float = 0.95,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> PosteriorSummary:
    """Deterministic posterior summary by normalized 1-D quadrature.

    eta = beta / (beta + n + 1) summaries come from a change of variable;
    its interval is the monotone image of the beta interval.
    """
    _check_nk(n, k)
    if not 0.0 < level < 1.0:
        raise DomainError("credible level must lie in (0, 1)")
    e_left, r = _posterior_integrand(n, k, prior)
    norm = ImproperLogIntegral(e_left, r, config)
    mean_num = ImproperLogIntegral(e_left + 1.0, r, config)
    mean_beta = math.exp(mean_num.log_value - norm.log_value)

    def r_eta(beta):
        return r(beta) - np.log(np.asarray(beta, dtype=float) + n + 1.0)

    eta_num = ImproperLogIntegral(e_left + 1.0, r_eta, config)
    mean_eta = math.exp(eta_num.log_value - norm.log_value)

    alpha = 0.5 * (1.0 - level)
    lo = norm.quantile(alpha)
    hi = norm.quantile(1.0 - alpha)
    eta = lambda b: b / (b + n + 1.0)
    return PosteriorSummary(
        mean_beta=mean_beta,
        ci_beta=(lo, hi),
        mean_eta=mean_eta,
        ci_eta=(eta(lo), eta(hi)),
        level=level,
    )


def credible_interval(
    chain: Chain | np.ndarray, level: float, min_draws: int = 1000
) -> tuple[float, float]:
    """Equal-tail interval from empirical quantiles (linear interpolation).

    ``min_draws`` guards against summarizing a chain that is too short; pass
    0 to disable when summarizing raw draw arrays.
    """
    if not 0.0 < level < 1.0:
        raise DomainError("credible level must lie in (0, 1)")
    draws = chain.draws if isinstance(chain, Chain) else np.asarray(chain, dtype=float)
    if draws.size < min_draws:
        raise InsufficientDrawsError(
            f"{draws.size} draws retained, need at least {min_draws}"
        )
    alpha = 0.5 * (1.0 - level)
    lo, hi = np.quantile(draws, [alpha, 1.0 - alpha], method="linear")
    return float(lo), float(hi)


def batch_means_se(draws: np.ndarray, n_batches: int = 50) -> float:
    """Monte Carlo standard error of the mean by non-overlapping batch means."""
    draws = np.asarray(draws, dtype=float)
    if draws.size < 2 * n_batches:
        raise InsufficientDrawsError(
            f"{draws.size} draws cannot fill {n_batches} batches"
        )
    size = draws.size // n_batches
    batches = draws[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(np.std(batches, ddof=1) / math.sqrt(n_batches))
