"""The Ewens partition distribution: pmf, predictive rule, sampling, moments.

A sample of n items is partitioned into K clusters with sizes m_1..m_K.
The single concentration parameter beta interpolates between one giant
cluster (beta -> 0) and all singletons (beta -> infinity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidPartitionError
from .special import log_gamma_ratio, stirling_log_row

__all__ = [
    "Partition",
    "log_pmf_sizes",
    "log_pmf_config",
    "crp_predictive",
    "sample_partition",
    "expected_k",
    "variance_k",
    "fisher_information",
    "log_prob_k",
]

_BETA_MIN = 1e-300


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not beta >= _BETA_MIN or not math.isfinite(beta):
        raise DomainError(f"beta must be a positive finite real, got {beta!r}")
    return beta


@dataclass(frozen=True)
class Partition:
    """Cluster sizes of a partition of n items, kept sorted descending.

    The empty partition (n = 0) is allowed so the predictive rule can seat
    a first item.
    """

    n: int
    sizes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        sizes = tuple(int(m) for m in self.sizes)
        if any(m < 1 for m in sizes):
            raise InvalidPartitionError(f"cluster sizes must be >= 1, got {sizes!r}")
        if sum(sizes) != self.n:
            raise InvalidPartitionError(
                f"sizes {sizes!r} sum to {sum(sizes)}, expected n={self.n}"
            )
        object.__setattr__(self, "sizes", tuple(sorted(sizes, reverse=True)))

    @property
    def k(self) -> int:
        return len(self.sizes)

    def multiplicities(self) -> dict[int, int]:
        """r_j = number of clusters of size j; satisfies sum_j j*r_j = n."""
        out: dict[int, int] = {}
        for m in self.sizes:
            out[m] = out.get(m, 0) + 1
        return out


def log_pmf_sizes(p: Partition, beta: float) -> float:
    """ln p(K, m_1..m_K | beta) for consecutively labeled clusters."""
    beta = _check_beta(beta)
    if p.n < 1:
        raise InvalidPartitionError("pmf requires at least one item")
    return (
        log_gamma_ratio(beta, p.n)
        + p.k * math.log(beta)
        + sum(math.lgamma(m) for m in p.sizes)
    )


def log_pmf_config(n: int, r: dict[int, int], beta: float) -> float:
    """ln probability of the size-multiplicity configuration {r_j}.

    ``r`` maps cluster size j to its count r_j and must satisfy
    sum_j j*r_j = n.
    """
    beta = _check_beta(beta)
    if n < 1:
        raise InvalidPartitionError("configuration pmf requires n >= 1")
    items = [(int(j), int(rj)) for j, rj in r.items() if rj != 0]
    if any(j < 1 or rj < 0 for j, rj in items):
        raise InvalidPartitionError(f"invalid multiplicity vector {r!r}")
    if sum(j * rj for j, rj in items) != n:
        raise InvalidPartitionError(
            f"multiplicities {r!r} describe {sum(j * rj for j, rj in items)} items, expected {n}"
        )
    k = sum(rj for _, rj in items)
    out = log_gamma_ratio(beta, n) + math.lgamma(n + 1) + k * math.log(beta)
    for j, rj in items:
        out -= rj * math.log(j) + math.lgamma(rj + 1)
    return out


def crp_predictive(p: Partition, beta: float) -> np.ndarray:
    """Seating probabilities for item n+1: existing clusters, then a new one.

    Entry k < K is m_k / (beta + n); the last entry is beta / (beta + n).
    """
    beta = _check_beta(beta)
    denom = beta + p.n
    out = np.empty(p.k + 1)
    out[: p.k] = np.asarray(p.sizes, dtype=float) / denom
    out[p.k] = beta / denom
    return out


def sample_partition(n: int, beta: float, rng: np.random.Generator) -> Partition:
    """Draw a partition of n items by sequential seating.

    Item i starts a new cluster with probability beta/(beta+i); otherwise it
    joins the cluster of a uniformly chosen earlier item, which is exactly
    the size-proportional rule.
    """
    beta = _check_beta(beta)
    if n < 1:
        raise DomainError(f"sample_partition requires n >= 1, got {n!r}")
    u = rng.random(n) * (beta + np.arange(n))
    labels = np.empty(n, dtype=np.int64)
    sizes: list[int] = []
    for i in range(n):
        if u[i] >= i:
            labels[i] = len(sizes)
            sizes.append(1)
        else:
            lab = labels[int(u[i])]
            labels[i] = lab
            sizes[lab] += 1
    return Partition(n=n, sizes=tuple(sizes))


def expected_k(beta, n: int):
    """E[K | beta, n] = sum_{j=0}^{n-1} beta / (beta + j).  Vectorized in beta."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0.0):
        raise DomainError("expected_k requires beta > 0")
    if n < 1:
        raise DomainError("expected_k requires n >= 1")
    js = np.arange(n)
    out = np.sum(beta[..., None] / (beta[..., None] + js), axis=-1)
    return out if out.ndim else float(out)


def variance_k(beta, n: int):
    """Var[K | beta, n] = sum_{j=0}^{n-1} beta*j / (beta + j)^2.  Vectorized."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0.0):
        raise DomainError("variance_k requires beta > 0")
    if n < 1:
        raise DomainError("variance_k requires n >= 1")
    js = np.arange(n)
    b = beta[..., None]
    out = np.sum(b * js / (b + js) ** 2, axis=-1)
    return out if out.ndim else float(out)


def fisher_information(beta, n: int):
    """I(beta) = (1/beta) * sum_{j=1}^{n-1} j / (beta + j)^2.  Vectorized."""
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0.0):
        raise DomainError("fisher_information requires beta > 0")
    if n < 2:
        raise DomainError("fisher_information requires n >= 2")
    js = np.arange(1, n)
    b = beta[..., None]
    out = np.sum(js / (b + js) ** 2, axis=-1) / beta
    return out if out.ndim else float(out)


def log_prob_k(n: int, k: int, beta: float) -> float:
    """ln Pr(K = k | beta, n) via the unsigned Stirling weight."""
    beta = _check_beta(beta)
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, n], got k={k!r}, n={n!r}")
    row = stirling_log_row(n)
    return row.log_value(k) + k * math.log(beta) + log_gamma_ratio(beta, n)


def log_prob_k_row(n: int, beta: float) -> np.ndarray:
    """ln Pr(K = k | beta, n) for all k = 1..n at once."""
    beta = _check_beta(beta)
    row = stirling_log_row(n)
    ks = np.arange(1, n + 1)
    return row.log_values + ks * math.log(beta) + log_gamma_ratio(beta, n)
