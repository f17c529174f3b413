"""Command-line front end.

Subcommands: ``prior-summary``, ``posterior``, ``coverage``, ``dpmm``.  Every
command takes ``--seed`` (default: env EWENS_SEED, then 0), ``--out``,
``--format csv|json`` and ``--jobs``.  CSV bodies are byte-stable across
reruns with identical flags and seed; wall-clock time lives only in the
manifest, written as ``<out>.manifest.json`` or embedded in JSON output.

Exit codes: 0 success, 1 runtime or numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dpmm import PoissonGammaBase
from .errors import DomainError, InvalidPartitionError
from .harness import CoverageResult, RunManifest, Stopwatch, run_coverage
from .jeffreys import (
    discovery_moments,
    jeffreys_prior,
    median,
    normalizing_constant,
    prior_k_mean,
    prior_k_pmf,
    prior_k_var,
)
from .posterior import (
    GammaPriorSpec,
    JeffreysPriorSpec,
    MCMCConfig,
    credible_interval,
    escobar_west_sample,
    quadrature_posterior_summary,
    rw_mh_sample,
)

__all__ = ["main"]


class UsageError(Exception):
    """Bad arguments or malformed input data: exit code 2."""


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{float(x):.17g}"


def _emit(args, command: str, params: dict, columns: list[str], rows: list[tuple],
          wall_time: float, extras: dict | None = None) -> None:
    manifest = RunManifest(
        command=command,
        parameters={**params, **(extras or {})},
        seed=args.seed,
        wall_time_s=wall_time,
    )
    if args.format == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        body = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(body, newline="\n")
            Path(args.out + ".manifest.json").write_text(
                json.dumps(manifest.to_dict(), indent=2) + "\n"
            )
        else:
            sys.stdout.write(body)
    else:
        doc = {
            "manifest": manifest.to_dict(),
            "columns": columns,
            "rows": [[None if isinstance(v, float) and math.isnan(v) else v
                      for v in row] for row in rows],
        }
        text = json.dumps(doc, indent=2, default=float) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)


def _prior_from_args(args, n: int):
    if args.prior == "jeffreys":
        return JeffreysPriorSpec(n)
    return GammaPriorSpec(args.a, args.b)


def _read_counts(path: str) -> np.ndarray:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read data file {path!r}: {exc}") from exc
    values: list[int] = []
    bad: list[str] = []
    lines = raw.splitlines()
    start = 0
    stripped = [ln.strip() for ln in lines]
    nonblank = [i for i, ln in enumerate(stripped) if ln]
    if nonblank and stripped[nonblank[0]].lower() == "y":
        start = nonblank[0] + 1
    for i in range(start, len(lines)):
        text = stripped[i]
        if not text:
            continue
        try:
            v = int(text)
            if v < 0:
                raise ValueError
        except ValueError:
            bad.append(f"line {i + 1}: {lines[i]!r}")
            continue
        values.append(v)
    if bad:
        raise UsageError("malformed data rows: " + "; ".join(bad))
    if not values:
        raise UsageError(f"data file {path!r} contains no counts")
    return np.array(values, dtype=np.int64)


# ---------------------------------------------------------------- commands


def _cmd_prior_summary(args) -> None:
    n = args.n
    if n < 2:
        raise UsageError("prior-summary needs --n >= 2")
    with Stopwatch() as sw:
        if args.what == "density":
            prior = jeffreys_prior(n)
            grid = np.geomspace(1e-3, 100.0 * n, args.grid_points)
            dens = prior.density(grid)
            columns, rows = ["beta", "density"], list(zip(grid, dens))
            extras = {"norm_const": normalizing_constant(n)}
        elif args.what == "const":
            columns, rows = ["norm_const"], [(normalizing_constant(n),)]
            extras = {}
        elif args.what == "median":
            columns, rows = ["median"], [(median(n),)]
            extras = {}
        elif args.what == "kdist":
            pmf = prior_k_pmf(n)
            columns = ["k", "prob"]
            rows = [(k, pmf[k - 1]) for k in range(1, n + 1)]
            extras = {"sum": float(pmf.sum())}
        elif args.what == "kmoments":
            mean = prior_k_mean(n)
            var = prior_k_var(n)
            columns, rows = ["mean_k", "sd_k"], [(mean, math.sqrt(var))]
            extras = {}
        else:  # eta
            mean, var = discovery_moments(n)
            columns, rows = ["mean_eta", "var_eta"], [(mean, var)]
            extras = {}
    _emit(args, "prior-summary", {"n": n, "what": args.what}, columns, rows,
          sw.elapsed, extras)


def _cmd_posterior(args) -> None:
    n, k = args.n, args.k
    if not 1 <= k <= n:
        raise UsageError("posterior needs 1 <= --k <= --n")
    prior = _prior_from_args(args, n)
    with Stopwatch() as sw:
        if args.method == "quadrature":
            s = quadrature_posterior_summary(n, k, prior, level=args.level)
            row = (
                args.method, args.prior, n, k, args.level,
                s.mean_beta, s.ci_beta[0], s.ci_beta[1],
                s.mean_eta, s.ci_eta[0], s.ci_eta[1], float("nan"),
            )
        else:
            cfg = MCMCConfig(
                iterations=args.iterations,
                burn_in=args.burn_in,
                proposal_sd=args.proposal_sd,
                seed=args.seed,
            )
            if isinstance(prior, GammaPriorSpec):
                chain = escobar_west_sample(n, k, prior.a, prior.b, cfg)
            else:
                chain = rw_mh_sample(n, k, prior, cfg)
            lo, hi = credible_interval(chain, args.level)
            eta = chain.draws / (chain.draws + n + 1.0)
            row = (
                args.method, args.prior, n, k, args.level,
                float(chain.draws.mean()), lo, hi,
                float(eta.mean()), lo / (lo + n + 1.0), hi / (hi + n + 1.0),
                chain.acceptance_rate,
            )
    columns = [
        "method", "prior", "n", "k", "level",
        "mean_beta", "ci_lo_beta", "ci_hi_beta",
        "mean_eta", "ci_lo_eta", "ci_hi_eta", "acceptance_rate",
    ]
    params = {"n": n, "k": k, "prior": args.prior, "method": args.method,
              "level": args.level}
    if args.prior == "gamma":
        params.update(a=args.a, b=args.b)
    _emit(args, "posterior", params, columns, [row], sw.elapsed)


def _cmd_coverage(args) -> None:
    if args.replicates < 50:
        raise UsageError("coverage needs --replicates >= 50")
    levels = tuple(float(x) for x in args.levels.split(","))
    if not all(0.0 < lv < 1.0 for lv in levels):
        raise UsageError("levels must lie in (0, 1)")
    prior = _prior_from_args(args, args.n)
    with Stopwatch() as sw:
        results = run_coverage(
            beta_true=args.beta_true,
            n=args.n,
            levels=levels,
            prior=prior,
            replicates=args.replicates,
            seed=args.seed,
            method=args.method,
            jobs=args.jobs,
        )
    columns = ["beta_true", "n", "level", "prior", "replicates", "coverage",
               "mean_width", "sd_width", "failures"]
    rows = [
        (r.beta_true, r.n, r.level, r.prior, r.replicates, r.coverage,
         r.mean_width, r.sd_width, r.failures)
        for r in results
    ]
    params = {"beta_true": args.beta_true, "n": args.n, "levels": args.levels,
              "prior": args.prior, "replicates": args.replicates,
              "method": args.method}
    if args.prior == "gamma":
        params.update(a=args.a, b=args.b)
    _emit(args, "coverage", params, columns, rows, sw.elapsed)


def _cmd_dpmm(args) -> None:
    from .harness import dpmm_experiment

    data = _read_counts(args.data)
    n = len(data)
    base = PoissonGammaBase(args.shape, args.rate)
    prior = _prior_from_args(args, n)
    with Stopwatch() as sw:
        run = dpmm_experiment(
            data, base, prior,
            sweeps=args.sweeps, burn_in=args.burn_in, seed=args.seed,
        )
        pmf = run.k_pmf(min_sweeps=min(1000, args.sweeps))
    columns = ["k", "prob"]
    rows = [(k, pmf[k - 1]) for k in range(1, n + 1)]
    params = {"data": args.data, "n": n, "shape": args.shape, "rate": args.rate,
              "prior": args.prior, "sweeps": args.sweeps, "burn_in": args.burn_in}
    if args.prior == "gamma":
        params.update(a=args.a, b=args.b)
    _emit(args, "dpmm", params, columns, rows, sw.elapsed,
          extras={"mean_k": run.mean_k})


# ---------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser) -> None:
    default_seed = int(os.environ.get("EWENS_SEED", "0"))
    p.add_argument("--seed", type=int, default=default_seed,
                   help="master seed (default: $EWENS_SEED or 0)")
    p.add_argument("--out", type=str, default=None, help="output path")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")


def _add_prior_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--prior", choices=("jeffreys", "gamma"), default="jeffreys")
    p.add_argument("--a", type=float, default=0.001, help="gamma prior shape")
    p.add_argument("--b", type=float, default=0.001, help="gamma prior rate")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ewensbayes",
        description="Default Bayesian inference for the Ewens partition model",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prior-summary", help="prior functionals for one sample size")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--what", required=True,
                   choices=("density", "const", "median", "kdist", "kmoments", "eta"))
    p.add_argument("--grid-points", type=int, default=512)
    _add_common(p)
    p.set_defaults(func=_cmd_prior_summary)

    p = sub.add_parser("posterior", help="posterior of beta given K clusters")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_prior_flags(p)
    p.add_argument("--method", choices=("quadrature", "mcmc"), default="quadrature")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--iterations", type=int, default=100_000)
    p.add_argument("--burn-in", type=int, default=5_000)
    p.add_argument("--proposal-sd", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_posterior)

    p = sub.add_parser("coverage", help="frequentist calibration of intervals")
    p.add_argument("--beta-true", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--levels", type=str, default="0.9,0.95")
    p.add_argument("--replicates", type=int, default=200)
    _add_prior_flags(p)
    p.add_argument("--method", choices=("quadrature", "mcmc"), default="quadrature")
    _add_common(p)
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("dpmm", help="Poisson mixture fit to a count file")
    p.add_argument("--data", type=str, required=True)
    p.add_argument("--shape", type=float, default=2.0, help="base measure shape")
    p.add_argument("--rate", type=float, default=0.1, help="base measure rate")
    _add_prior_flags(p)
    p.add_argument("--sweeps", type=int, default=10_000)
    p.add_argument("--burn-in", type=int, default=2_000)
    _add_common(p)
    p.set_defaults(func=_cmd_dpmm)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, InvalidPartitionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical or runtime failure
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
