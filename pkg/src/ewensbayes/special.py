"""Scalar special functions and log-scale Stirling-number tables.

Everything here is pure and overflow-safe: combinatorial quantities are
stored as natural logs so that rows for sample sizes in the thousands
remain representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "StirlingTable",
    "log_gamma",
    "log_gamma_ratio",
    "digamma",
    "trigamma",
    "stirling_log_row",
]

DEFAULT_MAX_STIRLING_N = 5000

# Bernoulli-number coefficients B_{2k} for the asymptotic psi expansions.
_BERNOULLI_2K = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
)

# Shift arguments upward until the asymptotic series is accurate.
_PSI_SHIFT = 8.0


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def log_gamma_ratio(beta, n: int):
    """ln Gamma(beta) - ln Gamma(beta + n) for integer n >= 0.

    Uses the telescoping product Gamma(beta + n) = Gamma(beta) * prod(beta + i),
    so the result is free of the cancellation that the difference of two
    lgamma calls suffers for large beta.  Vectorized over ``beta``.
    """
    if n < 0 or n != int(n):
        raise DomainError(f"log_gamma_ratio requires integer n >= 0, got {n!r}")
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0.0):
        raise DomainError("log_gamma_ratio requires beta > 0")
    if n == 0:
        out = np.zeros_like(beta)
        return out if out.ndim else float(out)
    out = -np.sum(np.log(beta[..., None] + np.arange(n)), axis=-1)
    return out if out.ndim else float(out)


def digamma(x: float) -> float:
    """psi(x) = d/dx ln Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"digamma requires x > 0, got {x!r}")
    # Recurrence psi(x) = psi(x+1) - 1/x until the asymptotic range.
    acc = 0.0
    while x < _PSI_SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    power = inv2
    for k, b2k in enumerate(_BERNOULLI_2K, start=1):
        series += b2k / (2 * k) * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - series


def trigamma(x: float) -> float:
    """psi'(x), the derivative of digamma, for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"trigamma requires x > 0, got {x!r}")
    # Recurrence psi'(x) = psi'(x+1) + 1/x^2.
    acc = 0.0
    while x < _PSI_SHIFT:
        acc += 1.0 / (x * x)
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = 0.0
    power = inv * inv2
    for b2k in _BERNOULLI_2K:
        series += b2k * power
        power *= inv2
    return acc + inv + 0.5 * inv2 + series


@dataclass(frozen=True)
class StirlingTable:
    """One row of unsigned Stirling numbers of the first kind, in logs.

    ``log_values[k - 1]`` holds ln|s(n, k)| for k = 1..n.  Rows satisfy
    sum_k |s(n,k)| beta^k = Gamma(beta + n) / Gamma(beta).
    """

    n: int
    log_values: np.ndarray

    def log_value(self, k: int) -> float:
        if not 1 <= k <= self.n:
            raise DomainError(f"k must lie in [1, {self.n}], got {k!r}")
        return float(self.log_values[k - 1])


# Rows built so far; row for n is at index n - 1.  Grown on demand.
_STIRLING_ROWS: list[np.ndarray] = [np.zeros(1)]


def stirling_log_row(n: int, max_n: int = DEFAULT_MAX_STIRLING_N) -> StirlingTable:
    """Row n of ln|s(n, k)|, built by the log-space triangle recurrence.

    |s(n+1, k)| = n |s(n, k)| + |s(n, k-1)| carried out with logaddexp per
    cell; |s(n, 0)| = 0 for n >= 1, |s(n, n)| = 1.
    """
    if n < 1 or n != int(n):
        raise DomainError(f"stirling_log_row requires n >= 1, got {n!r}")
    if n > max_n:
        raise DomainError(f"n={n} exceeds configured maximum {max_n}")
    while len(_STIRLING_ROWS) < n:
        m = len(_STIRLING_ROWS)  # previous row is for m items
        prev = _STIRLING_ROWS[-1]
        nxt = np.empty(m + 1)
        nxt[0] = math.log(m) + prev[0]
        if m > 1:
            nxt[1:m] = np.logaddexp(math.log(m) + prev[1:m], prev[0 : m - 1])
        nxt[m] = prev[m - 1]
        _STIRLING_ROWS.append(nxt)
    row = _STIRLING_ROWS[n - 1]
    return StirlingTable(n=n, log_values=row.copy())
