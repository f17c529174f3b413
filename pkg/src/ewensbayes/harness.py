"""Experiment harness: coverage studies, mixture experiments, run manifests.

Every harness entry point is deterministic given its master seed.  Replicates
draw from independent streams keyed by (master seed, replicate index), so the
degree of parallelism never changes a result, and reduction happens in
replicate-index order.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .dpmm import AJeffreysCache, DpmmRun, PoissonGammaBase, run_dpmm
from .errors import DomainError
from .med import sample_partition
from .posterior import (
    GammaPriorSpec,
    JeffreysPriorSpec,
    MCMCConfig,
    PriorSpec,
    credible_interval,
    escobar_west_sample,
    quadrature_posterior_summary,
    rw_mh_sample,
)
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig

__all__ = [
    "RunManifest",
    "CoverageResult",
    "run_coverage",
    "simulate_negbin_counts",
    "simulate_poisson_counts",
    "dpmm_experiment",
]


@dataclass(frozen=True)
class RunManifest:
    """Provenance record emitted next to (or inside) every output file."""

    command: str
    parameters: dict
    seed: int
    tool_version: str = __version__
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CoverageResult:
    """One cell of the interval-calibration study."""

    beta_true: float
    n: int
    level: float
    prior: str
    replicates: int
    coverage: float
    mean_width: float
    sd_width: float
    failures: int = 0


def _prior_label(prior: PriorSpec) -> str:
    if isinstance(prior, JeffreysPriorSpec):
        return "jeffreys"
    return f"gamma({prior.a:g},{prior.b:g})"


def _fit_intervals(n, k, prior, levels, method, mcmc, rep_seed):
    """Equal-tail intervals for beta at each level, by the selected path."""
    if method == "quadrature":
        return [quadrature_posterior_summary(n, k, prior, level=lv).ci_beta for lv in levels]
    cfg = MCMCConfig(
        iterations=mcmc.iterations,
        burn_in=mcmc.burn_in,
        proposal_sd=mcmc.proposal_sd,
        seed=rep_seed,
    )
    if isinstance(prior, GammaPriorSpec):
        chain = escobar_west_sample(n, k, prior.a, prior.b, cfg)
    else:
        chain = rw_mh_sample(n, k, prior, cfg)
    return [credible_interval(chain, lv) for lv in levels]


def _coverage_replicate(args):
    (rep, beta_true, n, prior, levels, method, mcmc, master_seed) = args
    rng = np.random.default_rng([master_seed, rep])
    k = sample_partition(n, beta_true, rng).k
    rep_seed = int(np.random.SeedSequence([master_seed, rep, 1]).generate_state(1)[0])
    try:
        cis = _fit_intervals(n, k, prior, levels, method, mcmc, rep_seed)
    except Exception:
        return rep, None
    return rep, [(lo <= beta_true <= hi, hi - lo) for lo, hi in cis]


def run_coverage(
    beta_true: float,
    n: int,
    levels: tuple[float, ...],
    prior: PriorSpec,
    replicates: int,
    seed: int,
    method: str = "quadrature",
    mcmc: MCMCConfig = MCMCConfig(),
    jobs: int = 1,
) -> list[CoverageResult]:
    """Frequentist calibration of equal-tail intervals under repeated sampling.

    Each replicate draws a partition at ``beta_true``, keeps its cluster
    count, fits the posterior, and scores every requested level.  Failures
    are counted, not fatal.
    """
    if replicates < 1:
        raise DomainError("replicates must be >= 1")
    if method not in ("quadrature", "mcmc"):
        raise DomainError(f"unknown fit method {method!r}")
    tasks = [
        (rep, beta_true, n, prior, tuple(levels), method, mcmc, seed)
        for rep in range(replicates)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_coverage_replicate, tasks, chunksize=8))
    else:
        outcomes = [_coverage_replicate(t) for t in tasks]
    outcomes.sort(key=lambda pair: pair[0])  # reduce in replicate order

    results = []
    for idx, level in enumerate(levels):
        covered = 0
        widths = []
        failures = 0
        for _, rows in outcomes:
            if rows is None:
                failures += 1
                continue
            hit, width = rows[idx]
            covered += bool(hit)
            widths.append(width)
        scored = len(widths)
        widths = np.array(widths) if widths else np.zeros(1)
        results.append(
            CoverageResult(
                beta_true=beta_true,
                n=n,
                level=level,
                prior=_prior_label(prior),
                replicates=scored,
                coverage=covered / scored if scored else float("nan"),
                mean_width=float(widths.mean()),
                sd_width=float(widths.std(ddof=1)) if scored > 1 else 0.0,
                failures=failures,
            )
        )
    return results


def simulate_negbin_counts(n: int, seed: int, mean: float = 20.0, var: float = 220.0) -> np.ndarray:
    """Counts with the requested moments: size r = mean^2/(var-mean), p = r/(r+mean)."""
    if not var > mean > 0:
        raise DomainError("need var > mean > 0 for a negative binomial")
    r = mean * mean / (var - mean)
    p = r / (r + mean)
    return np.random.default_rng(seed).negative_binomial(r, p, size=n)


def simulate_poisson_counts(n: int, seed: int, mean: float = 20.0) -> np.ndarray:
    return np.random.default_rng(seed).poisson(mean, size=n)


def dpmm_experiment(
    data,
    base: PoissonGammaBase,
    prior: PriorSpec,
    sweeps: int = 10_000,
    burn_in: int = 2_000,
    seed: int = 0,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
    a_cache: AJeffreysCache | None = None,
) -> DpmmRun:
    """One mixture fit; thin wrapper so the CLI and tests share a door."""
    return run_dpmm(
        data, base, prior,
        sweeps=sweeps, burn_in=burn_in, seed=seed, config=config, a_cache=a_cache,
    )


class Stopwatch:
    """Context manager feeding RunManifest.wall_time_s."""

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self._t0
        return False
