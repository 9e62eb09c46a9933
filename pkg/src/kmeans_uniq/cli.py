"""Command-line interface: one binary, subcommand per workflow.

Exit codes: 0 success, 2 usage/parameter error, 3 data/shape error,
4 numerical/infeasible error. Every stochastic subcommand requires --seed,
so every published number is reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import (DataError, InfeasibleError, KmuError, NumericError,
                     ParameterError, ShapeError, UnsupportedError)
from .harness import (ExperimentConfig, run_consistency, run_grid,
                      run_mc_grid, run_r_grid)
from .kmeans import Dataset, FitOptions, fit
from .limit_law import estimate_covariance, simulate_T
from .metrics import GH_MAX_POINTS, gromov_hausdorff_small, hausdorff
from .models import (FAMILIES, ModelSpec, population_catalog,
                     population_wcss_numeric, sample)
from .rng import RngStream
from .uniqueness import bootstrap_draws, decide

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _data_path(path: str) -> str:
    prefix = os.environ.get("KMU_DATA_DIR")
    if prefix and not os.path.isabs(path):
        return os.path.join(prefix, path)
    return path


def _load_dataset(args) -> Dataset:
    header = None
    if getattr(args, "header", False):
        header = True
    elif getattr(args, "no_header", False):
        header = False
    try:
        return Dataset.from_csv(_data_path(args.data), header=header)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read {args.data}: {exc}") from exc


def _model_spec(args) -> ModelSpec:
    return ModelSpec(family=args.model, dim=args.dim or 0, r=args.r)


def _emit(obj: dict, out: str | None, quiet: bool) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        if not quiet:
            print(f"wrote {out}", file=sys.stderr)
    else:
        print(text)


def _fit_options(args) -> FitOptions:
    return FitOptions(max_iters=args.max_iters, tol=args.tol)


def _add_data_flags(p):
    p.add_argument("--data", required=True, help="CSV dataset path")
    p.add_argument("--header", action="store_true", help="CSV has a header row")
    p.add_argument("--no-header", action="store_true", help="CSV has no header row")


def _add_fit_flags(p):
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, required=True)


def _add_model_flags(p, required=True):
    p.add_argument("--model", required=required, choices=FAMILIES)
    p.add_argument("--r", type=float, default=None, help="radius (UrC3k2 only)")
    p.add_argument("--dim", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kmu",
        description="Empirical k-means, WCSS and the bootstrap uniqueness test")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="multi-start k-means fit")
    _add_data_flags(p)
    _add_fit_flags(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("wcss", help="empirical WCSS of the best fit")
    _add_data_flags(p)
    _add_fit_flags(p)
    p.add_argument("--out", default=None)

    p = sub.add_parser("test-uniqueness", help="bootstrap test of k-means uniqueness")
    _add_data_flags(p)
    _add_fit_flags(p)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--no-warm-start", action="store_true")
    p.add_argument("--out", default=None)

    p = sub.add_parser("experiment", help="rejection-rate grid from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--parallelism", type=int, default=None)
    p.add_argument("--paper-scale", action="store_true",
                   help="restore full-scale protocol (200 replicates, B=1000)")

    p = sub.add_parser("r-grid", help="bootstrap test over the UrC3k2 radius grid")
    p.add_argument("--radii", required=True, help="comma-separated radii in [0, 1/2]")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--B", type=int, default=200)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="cells CSV path")
    p.add_argument("--detail-out", default=None)

    p = sub.add_parser("mc-grid", help="true Monte-Carlo radius grid (population WCSS)")
    p.add_argument("--radii", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--replicates", type=int, default=200)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("limit-sim", help="simulate the limiting WCSS variable")
    _add_model_flags(p)
    p.add_argument("--mc-n", type=float, default=1e6)
    p.add_argument("--n-sim", type=float, default=1e6)
    p.add_argument("--orbit-discretization", type=int, default=None)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("oracle", help="population catalogs, WCSS and set distances")
    osub = p.add_subparsers(dest="oracle_command", required=True)

    q = osub.add_parser("catalog", help="population k-means catalog")
    _add_model_flags(q)
    q.add_argument("--out", default=None)

    q = osub.add_parser("wcss", help="Monte-Carlo check of the catalog WCSS")
    _add_model_flags(q)
    q.add_argument("--n-mc", type=float, default=1e6)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--out", default=None)

    q = osub.add_parser("dist", help="Hausdorff / Gromov-Hausdorff between center sets")
    q.add_argument("--a", required=True, help="CSV or JSON file with the first set")
    q.add_argument("--b", required=True)
    q.add_argument("--out", default=None)

    q = osub.add_parser("sample", help="draw a dataset from a model")
    _add_model_flags(q)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--no-header", action="store_true")

    p = sub.add_parser("consistency", help="fitted center sets vs the population catalog")
    _add_model_flags(p)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--orbit-grid", type=int, default=3600)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="centers CSV path")

    return ap


def _load_centers(path: str) -> np.ndarray:
    path = _data_path(path)
    try:
        if path.endswith(".json"):
            with open(path) as fh:
                return np.asarray(json.load(fh), dtype=float)
        return Dataset.from_csv(path).values
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read centers from {path}: {exc}") from exc


def _catalog_json(spec: ModelSpec, orbit_preview: int = 8) -> dict:
    cat = population_catalog(spec)
    entries = []
    for e in cat.entries:
        if e.centers is not None:
            entries.append({"multiplicity_class": e.multiplicity_class,
                            "centers": e.centers.tolist()})
        else:
            import math as _m
            preview = [e.orbit(2 * _m.pi * t / orbit_preview).tolist()
                       for t in range(orbit_preview)]
            entries.append({"multiplicity_class": e.multiplicity_class,
                            "orbit_preview": preview})
    return {"model": spec.to_json(), "kind": cat.kind, "wcss": cat.wcss,
            "entries": entries, "meta": cat.meta}


def _cmd_fit(args, quiet, want_wcss_only=False) -> int:
    data = _load_dataset(args)
    f = fit(data, args.k, args.restarts, RngStream(args.seed), _fit_options(args))
    if want_wcss_only:
        obj = {"wcss": f.wcss, "k": args.k, "n": data.n, "d": data.d,
               "restarts": f.restarts_used, "seed": args.seed}
    else:
        obj = {"centers": f.centers.centers.tolist(), "wcss": f.wcss,
               "k": args.k, "n": data.n, "d": data.d,
               "restarts": f.restarts_used, "iterations": f.iterations,
               "converged": f.converged, "seed": args.seed}
    _emit(obj, args.out, quiet)
    return 0


def dispatch(argv) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    quiet = args.quiet

    if args.command == "fit":
        return _cmd_fit(args, quiet)
    if args.command == "wcss":
        return _cmd_fit(args, quiet, want_wcss_only=True)

    if args.command == "test-uniqueness":
        data = _load_dataset(args)
        draws = bootstrap_draws(data, args.k, args.B, args.restarts,
                                RngStream(args.seed), _fit_options(args),
                                warm_start=not args.no_warm_start)
        report = decide(draws, args.alpha)
        _emit(report.to_json(), args.out, quiet)
        return 0

    if args.command == "experiment":
        with open(_data_path(args.config)) as fh:
            cfg = ExperimentConfig.from_json(fh.read())
        if args.paper_scale:
            cfg = ExperimentConfig(
                models=cfg.models, sample_sizes=cfg.sample_sizes,
                replicates=200, B=1000, alpha=cfg.alpha, restarts=cfg.restarts,
                master_seed=cfg.master_seed,
                parallelism=args.parallelism or cfg.parallelism,
                record_times=cfg.record_times)
        elif args.parallelism:
            cfg = ExperimentConfig(
                models=cfg.models, sample_sizes=cfg.sample_sizes,
                replicates=cfg.replicates, B=cfg.B, alpha=cfg.alpha,
                restarts=cfg.restarts, master_seed=cfg.master_seed,
                parallelism=args.parallelism, record_times=cfg.record_times)
        os.makedirs(args.out_dir, exist_ok=True)
        run_grid(cfg, cells_path=os.path.join(args.out_dir, "cells.csv"),
                 detail_path=os.path.join(args.out_dir, "detail.csv"))
        if not quiet:
            print(f"wrote {args.out_dir}/cells.csv and detail.csv", file=sys.stderr)
        return 0

    if args.command == "r-grid":
        radii = [float(tok) for tok in args.radii.split(",") if tok]
        run_r_grid(radii, args.n, args.replicates, args.B, args.alpha,
                   args.seed, restarts=args.restarts,
                   cells_path=args.out, detail_path=args.detail_out)
        return 0

    if args.command == "mc-grid":
        radii = [float(tok) for tok in args.radii.split(",") if tok]
        run_mc_grid(radii, args.n, args.replicates, args.seed,
                    alpha=args.alpha, restarts=args.restarts, cells_path=args.out)
        return 0

    if args.command == "limit-sim":
        spec = _model_spec(args)
        cat = population_catalog(spec)
        stream = RngStream(args.seed)
        cov = estimate_covariance(spec, cat, int(args.mc_n), stream.child(0),
                                  orbit_discretization=args.orbit_discretization)
        summary = simulate_T(cov, int(args.n_sim), stream.child(1))
        obj = summary.to_json()
        obj.update({"model": spec.to_json(), "m": cov.m, "mc_n": cov.mc_n,
                    "approximate_orbit": cov.approximate_orbit, "seed": args.seed})
        _emit(obj, args.out, quiet)
        return 0

    if args.command == "oracle":
        if args.oracle_command == "catalog":
            _emit(_catalog_json(_model_spec(args)), args.out, quiet)
            return 0
        if args.oracle_command == "wcss":
            spec = _model_spec(args)
            value, se = population_wcss_numeric(spec, int(args.n_mc), RngStream(args.seed))
            if se != se:  # single-draw case: standard error undefined
                se = None
            cat = population_catalog(spec)
            _emit({"model": spec.to_json(), "mc_wcss": value, "se": se,
                   "catalog_wcss": cat.wcss, "n_mc": int(args.n_mc),
                   "seed": args.seed}, args.out, quiet)
            return 0
        if args.oracle_command == "dist":
            A = _load_centers(args.a)
            B = _load_centers(args.b)
            obj = {"hausdorff": hausdorff(A, B)}
            if A.shape[0] <= GH_MAX_POINTS and B.shape[0] <= GH_MAX_POINTS:
                obj["gromov_hausdorff"] = gromov_hausdorff_small(A, B)
            _emit(obj, args.out, quiet)
            return 0
        if args.oracle_command == "sample":
            spec = _model_spec(args)
            data = sample(spec, args.n, RngStream(args.seed))
            data.to_csv(args.out, header=not args.no_header)
            if not quiet:
                print(f"wrote {args.out}", file=sys.stderr)
            return 0

    if args.command == "consistency":
        spec = _model_spec(args)
        run_consistency(spec, args.samples, args.n, args.restarts, args.seed,
                        orbit_grid=args.orbit_grid, centers_path=args.out)
        if not quiet:
            print(f"wrote {args.out}", file=sys.stderr)
        return 0

    ap.error(f"unknown command {args.command!r}")
    return EXIT_USAGE


def main(argv=None) -> int:
    try:
        return dispatch(sys.argv[1:] if argv is None else argv)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ShapeError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (InfeasibleError, NumericError, UnsupportedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except KmuError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
