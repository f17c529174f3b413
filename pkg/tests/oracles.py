"""Independent oracles used to derive the expected values frozen in tests.

Everything here deliberately avoids the package's own computational paths:
series with Euler-Maclaurin tails for the psi functions, permutation
enumeration for Stirling numbers, set-partition enumeration for pmf checks,
plain trapezoid rules for integrals.
"""

import math
from itertools import permutations

import numpy as np


def harmonic_series_gamma(terms: int = 10_000) -> float:
    """Euler-Mascheroni constant: partial harmonic sum with an E-M tail."""
    n = terms
    partial = sum(1.0 / k for k in range(1, n + 1))
    return partial - math.log(n) - 0.5 / n + 1.0 / (12.0 * n * n) - 1.0 / (120.0 * n**4)


def zeta2_series(terms: int = 10_000) -> float:
    """sum 1/k^2 by partial sum plus Euler-Maclaurin tail: equals trigamma(1)."""
    n = terms
    partial = sum(1.0 / (k * k) for k in range(1, n + 1))
    return partial + 1.0 / n - 1.0 / (2.0 * n * n) + 1.0 / (6.0 * n**3) - 1.0 / (30.0 * n**5)


def stirling_by_cycle_count(n: int) -> list[int]:
    """|s(n, k)| as the number of permutations of n items with k cycles."""
    counts = [0] * (n + 1)
    for perm in permutations(range(n)):
        seen = [False] * n
        cycles = 0
        for start in range(n):
            if seen[start]:
                continue
            cycles += 1
            j = start
            while not seen[j]:
                seen[j] = True
                j = perm[j]
        counts[cycles] += 1
    return counts[1:]


def set_partitions(items: list):
    """All set partitions of ``items`` as lists of blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1 :]
        yield [[first]] + sub


def trapezoid_log_integral(logf, grid: np.ndarray) -> float:
    """ln of the trapezoid approximation of integral exp(logf) over grid."""
    vals = logf(grid)
    peak = float(np.max(vals))
    y = np.exp(vals - peak)
    return peak + math.log(np.trapezoid(y, grid))


def cauchy_half_line_draws(n_draws: int, seed: int) -> np.ndarray:
    """beta = nu^2 with nu standard Cauchy on (0, inf): the n=2 prior."""
    u = np.random.default_rng(seed).random(n_draws)
    nu = np.tan(0.5 * math.pi * u)
    return nu * nu
