"""Collapsed Gibbs sampling for a DP mixture of Poisson kernels.

Component means carry a conjugate Gamma base measure and are integrated out,
so a sweep only moves cluster labels.  Two variants of the concentration
parameter treatment are provided:

* ``gibbs_sweep_gamma``: beta keeps a Gamma(a, b) prior and is refreshed
  after each sweep by the Beta/Gamma augmentation step;
* ``gibbs_sweep_marginal_jeffreys``: beta is never instantiated; the label
  conditionals absorb it through ratios of the integrals
  A(n, n, k) / A(n-1, n, k) taken against the default prior for size n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InsufficientDrawsError
from .jeffreys import a_integral
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig

__all__ = [
    "PoissonGammaBase",
    "DpmmState",
    "AJeffreysCache",
    "build_a_cache",
    "log_marginal_new",
    "log_marginal_existing",
    "gibbs_sweep_gamma",
    "gibbs_sweep_marginal_jeffreys",
    "posterior_k_distribution",
    "DpmmRun",
    "run_dpmm",
]


@dataclass(frozen=True)
class PoissonGammaBase:
    """Gamma(shape, rate) base measure on the Poisson mean."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0.0 and self.rate > 0.0):
            raise DomainError("base measure needs shape > 0 and rate > 0")


def log_marginal_new(y: int, base: PoissonGammaBase) -> float:
    """ln p(y | G0): the Poisson-Gamma (negative binomial) marginal."""
    if y < 0 or y != int(y):
        raise DomainError(f"counts must be non-negative integers, got {y!r}")
    a0, b0 = base.shape, base.rate
    return (
        math.lgamma(a0 + y)
        - math.lgamma(a0)
        - math.lgamma(y + 1)
        + a0 * math.log(b0 / (b0 + 1.0))
        - y * math.log1p(b0)
    )


def log_marginal_existing(y: int, m: int, s: int, base: PoissonGammaBase) -> float:
    """ln p(y | cluster with m members summing to s, G0).

    Conjugacy turns this into the new-cluster marginal with the base updated
    to (shape + s, rate + m); (m, s) = (0, 0) therefore reduces to it.
    """
    if m < 0 or s < 0:
        raise DomainError("cluster statistics must be non-negative")
    return log_marginal_new(y, PoissonGammaBase(base.shape + s, base.rate + m))


@dataclass
class DpmmState:
    """Cluster labels plus per-cluster sufficient statistics.

    Labels stay contiguous in 0..K-1 (compacted after every removal);
    ``beta`` is present only in the Gamma-prior variant.
    """

    assignments: np.ndarray
    counts: list[int]
    sums: list[int]
    beta: float | None = None

    @classmethod
    def single_cluster(cls, data: np.ndarray, beta: float | None = None) -> "DpmmState":
        data = np.asarray(data)
        return cls(
            assignments=np.zeros(len(data), dtype=np.int64),
            counts=[int(len(data))],
            sums=[int(data.sum())],
            beta=beta,
        )

    @classmethod
    def from_assignments(
        cls, labels: np.ndarray, data: np.ndarray, beta: float | None = None
    ) -> "DpmmState":
        labels = np.asarray(labels, dtype=np.int64)
        k = int(labels.max()) + 1
        if sorted(set(labels.tolist())) != list(range(k)):
            raise DomainError("labels must be contiguous 0..K-1")
        counts = [int(np.sum(labels == c)) for c in range(k)]
        sums = [int(np.sum(np.asarray(data)[labels == c])) for c in range(k)]
        return cls(assignments=labels.copy(), counts=counts, sums=sums, beta=beta)

    @property
    def k(self) -> int:
        return len(self.counts)

    def check_consistency(self, data: np.ndarray) -> None:
        """Recompute the sufficient statistics from scratch; exact equality."""
        rebuilt = DpmmState.from_assignments(self.assignments, data)
        if rebuilt.counts != self.counts or rebuilt.sums != self.sums:
            raise AssertionError("sufficient statistics drifted from assignments")


class _PredictiveTables:
    """Integer-argument lookup tables for the Poisson-Gamma predictives.

    All cluster sums are bounded by sum(data), so gammaln and log(rate + m)
    can be tabulated once per run, keeping the per-item sweep cost to plain
    array arithmetic.
    """

    def __init__(self, base: PoissonGammaBase, data: np.ndarray):
        self.base = base
        y_max = int(data.max(initial=0))
        s_max = int(data.sum()) + y_max + 1
        n = len(data)
        self._lg = gammaln(base.shape + np.arange(s_max + 1, dtype=float))
        self._lg_y = gammaln(1.0 + np.arange(y_max + 1, dtype=float))
        m_grid = base.rate + np.arange(n + 2, dtype=float)
        self._log_rate = np.log(m_grid)
        self._log_rate1 = np.log1p(m_grid)

    def log_pred(self, y: int, counts: np.ndarray, sums: np.ndarray) -> np.ndarray:
        a = self.base.shape + sums
        return (
            self._lg[sums + y]
            - self._lg[sums]
            - self._lg_y[y]
            + a * (self._log_rate[counts] - self._log_rate1[counts])
            - y * self._log_rate1[counts]
        )

    def log_pred_new(self, y: int) -> float:
        return float(self.log_pred(y, np.array([0]), np.array([0]))[0])


@dataclass(frozen=True)
class AJeffreysCache:
    """log A(n, n, k) for k = 1..n and log A(n-1, n, k) for k = 1..n-1.

    A sweep removes one item before reassigning it, so the reduced-sample
    index K- ranges over 1..n-1 only.
    """

    n: int
    log_a_full: np.ndarray
    log_a_reduced: np.ndarray

    def ratio_existing(self, k_minus: int) -> float:
        """log of A(n, n, K-) / A(n-1, n, K-)."""
        self._check(k_minus)
        return float(self.log_a_full[k_minus - 1] - self.log_a_reduced[k_minus - 1])

    def ratio_new(self, k_minus: int) -> float:
        """log of A(n, n, K- + 1) / A(n-1, n, K-)."""
        self._check(k_minus)
        return float(self.log_a_full[k_minus] - self.log_a_reduced[k_minus - 1])

    def _check(self, k_minus: int) -> None:
        if not 1 <= k_minus <= self.n - 1:
            raise DomainError(f"cache miss: K-={k_minus} outside 1..{self.n - 1}")


def build_a_cache(n: int, config: QuadratureConfig = DEFAULT_QUADRATURE) -> AJeffreysCache:
    """Precompute the A-ratios the marginalized sweep reads at every step."""
    if n < 2:
        raise DomainError("the marginalized sampler needs n >= 2")
    full = np.array([a_integral(n, n, k, config) for k in range(1, n + 1)])
    reduced = np.array([a_integral(n - 1, n, k, config) for k in range(1, n)])
    return AJeffreysCache(n=n, log_a_full=full, log_a_reduced=reduced)


def _pick(logw: np.ndarray, rng: np.random.Generator) -> int:
    w = np.exp(logw - logw.max())
    total = w.sum()
    return int(np.searchsorted(np.cumsum(w), rng.random() * total, side="right"))


def _sweep(
    state: DpmmState,
    data: np.ndarray,
    tables: _PredictiveTables,
    log_weight_existing,
    log_weight_new,
    rng: np.random.Generator,
) -> None:
    """One reassignment pass; the weight callables close over the variant."""
    for i in range(len(data)):
        y = int(data[i])
        c = int(state.assignments[i])
        state.counts[c] -= 1
        state.sums[c] -= y
        if state.counts[c] == 0:
            state.counts.pop(c)
            state.sums.pop(c)
            state.assignments[state.assignments > c] -= 1
        state.assignments[i] = -1
        counts = np.asarray(state.counts, dtype=np.int64)
        sums = np.asarray(state.sums, dtype=np.int64)
        k_minus = len(counts)
        pred = tables.log_pred(y, counts, sums)
        logw = np.empty(k_minus + 1)
        logw[:k_minus] = np.log(counts) + log_weight_existing(k_minus) + pred
        logw[k_minus] = log_weight_new(k_minus) + tables.log_pred_new(y)
        choice = _pick(logw, rng)
        if choice == k_minus:
            state.counts.append(1)
            state.sums.append(y)
        else:
            state.counts[choice] += 1
            state.sums[choice] += y
        state.assignments[i] = choice


def gibbs_sweep_gamma(
    state: DpmmState,
    data: np.ndarray,
    base: PoissonGammaBase,
    a: float,
    b: float,
    rng: np.random.Generator,
    tables: _PredictiveTables | None = None,
) -> DpmmState:
    """One collapsed sweep at fixed beta, then the Beta/Gamma beta refresh."""
    if state.beta is None or not state.beta > 0.0:
        raise DomainError("the Gamma-prior sweep needs a positive current beta")
    data = np.asarray(data)
    n = len(data)
    tables = tables or _PredictiveTables(base, data)
    log_beta = math.log(state.beta)
    _sweep(state, data, tables, lambda km: 0.0, lambda km: log_beta, rng)
    # beta | K via the augmentation step (see posterior.escobar_west_sample).
    k = state.k
    eta = rng.beta(state.beta + 1.0, n)
    rate = b - math.log(eta)
    log_odds = math.log(a + k - 1.0) - math.log(n) - math.log(rate)
    w = 1.0 / (1.0 + math.exp(-log_odds))
    shape = a + k if rng.random() < w else a + k - 1.0
    state.beta = max(rng.gamma(shape, 1.0 / rate), 5e-324)
    return state


def gibbs_sweep_marginal_jeffreys(
    state: DpmmState,
    data: np.ndarray,
    base: PoissonGammaBase,
    a_cache: AJeffreysCache,
    rng: np.random.Generator,
    tables: _PredictiveTables | None = None,
) -> DpmmState:
    """One sweep with beta integrated out against the default prior.

    Existing-cluster weights carry A(n,n,K-)/A(n-1,n,K-); a new cluster
    carries A(n,n,K-+1)/A(n-1,n,K-).
    """
    data = np.asarray(data)
    n = len(data)
    if n == 1:
        return state  # a single item always sits in its own cluster
    if a_cache.n != n:
        raise DomainError(f"A-cache built for n={a_cache.n}, data has n={n}")
    tables = tables or _PredictiveTables(base, data)
    _sweep(state, data, tables, a_cache.ratio_existing, a_cache.ratio_new, rng)
    return state


def posterior_k_distribution(chain, n: int, min_sweeps: int = 1000) -> np.ndarray:
    """Empirical pmf of the cluster count over retained sweeps (index k-1)."""
    ks = np.array(
        [s.k if isinstance(s, DpmmState) else int(s) for s in chain], dtype=np.int64
    )
    if ks.size < min_sweeps:
        raise InsufficientDrawsError(f"{ks.size} sweeps retained, need {min_sweeps}")
    if np.any((ks < 1) | (ks > n)):
        raise DomainError("cluster counts outside 1..n")
    pmf = np.bincount(ks, minlength=n + 1)[1:].astype(float)
    return pmf / pmf.sum()


@dataclass(frozen=True)
class DpmmRun:
    """Retained cluster-count trace plus the final state of one chain."""

    k_trace: np.ndarray
    final_state: DpmmState
    n: int

    def k_pmf(self, min_sweeps: int = 1000) -> np.ndarray:
        return posterior_k_distribution(self.k_trace, self.n, min_sweeps)

    @property
    def mean_k(self) -> float:
        return float(self.k_trace.mean())


def run_dpmm(
    data,
    base: PoissonGammaBase,
    prior,
    sweeps: int = 10_000,
    burn_in: int = 2_000,
    seed: int = 0,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    a_cache: AJeffreysCache | None = None,
) -> DpmmRun:
    """Fit the mixture, starting from one all-in cluster.

    ``prior`` is a posterior.PriorSpec: a Gamma spec runs the augmented
    variant, a Jeffreys spec the marginalized one.
    """
    from .posterior import GammaPriorSpec, JeffreysPriorSpec

    data = np.asarray(data, dtype=np.int64)
    if len(data) == 0:
        raise DomainError("dpmm requires at least one observation")
    if np.any(data < 0):
        raise DomainError("dpmm counts must be non-negative")
    rng = np.random.default_rng(seed)
    tables = _PredictiveTables(base, data)
    marginal = isinstance(prior, JeffreysPriorSpec)
    if marginal:
        if prior.n != len(data):
            raise DomainError("Jeffreys prior index must equal the data size")
        cache = a_cache or build_a_cache(len(data), config)
        state = DpmmState.single_cluster(data)
    else:
        if not isinstance(prior, GammaPriorSpec):
            raise DomainError(f"unsupported prior {prior!r}")
        state = DpmmState.single_cluster(data, beta=prior.a / prior.b)
    k_trace = np.empty(sweeps, dtype=np.int64)
    for t in range(burn_in + sweeps):
        if marginal:
            gibbs_sweep_marginal_jeffreys(state, data, base, cache, rng, tables)
        else:
            gibbs_sweep_gamma(state, data, base, prior.a, prior.b, rng, tables)
        if t >= burn_in:
            k_trace[t - burn_in] = state.k
    return DpmmRun(k_trace=k_trace, final_state=state, n=len(data))
