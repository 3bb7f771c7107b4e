"""Command-line interface: ``simulate``, ``fit`` and ``summarize``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings

import numpy as np

from . import elbmr, nbmr, pbmr
from .model import DataError, dispersed_init, load_csv, ols_init
from .sampler import InitializationError, read_chain_csv
from .simulate import ERROR_CASES, ScenarioSpec, generate
from .special import make_rng
from .summaries import format_table, summary_document
from .windows import RULES, sigma_from_rule, sigma_prior_interval


class UsageError(Exception):
    pass


def _pair(text: str, what: str):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 2:
        raise UsageError(f"{what} expects LO,HI")
    return parts


def _float_pair(text: str, what: str) -> tuple[float, float]:
    try:
        lo, hi = (float(s) for s in _pair(text, what))
    except ValueError:
        raise UsageError(f"{what} expects two numbers, got '{text}'") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modereg", description="posterior samplers for linear modal regression")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write a simulated dataset as CSV")
    sim.add_argument("--example", type=int, choices=(1, 2), required=True)
    sim.add_argument("--case", choices=ERROR_CASES)
    sim.add_argument("--alpha", type=float)
    sim.add_argument("--v", type=float)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True)

    fit = sub.add_parser("fit", help="sample the posterior of the mode-line coefficients")
    fit.add_argument("--data", required=True)
    fit.add_argument("--response", required=True)
    fit.add_argument("--no-intercept", action="store_true")
    fit.add_argument("--method", choices=("pbmr", "nbmr", "elbmr"), required=True)
    sig = fit.add_mutually_exclusive_group()
    sig.add_argument("--sigma", type=float)
    sig.add_argument("--sigma-rule", choices=RULES)
    sig.add_argument("--sigma-prior", help="LO,HI as numbers or rule names")
    fit.add_argument(
        "--scale-source",
        choices=("residuals", "response"),
        default="residuals",
        help="data the sigma rules are applied to",
    )
    fit.add_argument("--iters", type=int, default=10_000, help="kept iterations per chain")
    fit.add_argument("--burnin", type=int, default=10_000)
    fit.add_argument("--chains", type=int, help="default 2 for nbmr, 1 otherwise")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--truncation", type=int, default=30)
    fit.add_argument("--dp-d", type=float)
    fit.add_argument("--dp-m-prior", default="0.1,10")
    fit.add_argument("--out", required=True, help="output prefix")
    fit.add_argument("--table", action="store_true", help="print a summary table")

    summ = sub.add_parser("summarize", help="pool chain CSV dumps into a summary")
    summ.add_argument("chains", nargs="+")
    summ.add_argument("--method")
    summ.add_argument("--seed", type=int)
    summ.add_argument("--out", required=True)
    summ.add_argument("--table", action="store_true")
    return parser


def _write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def cmd_simulate(args) -> int:
    if args.example == 1:
        if args.alpha is not None or args.v is not None:
            raise UsageError("--alpha/--v apply to --example 2 only")
        if args.case is None:
            raise UsageError("--example 1 requires --case")
        spec = ScenarioSpec(1, args.n, error_case=args.case, seed=args.seed)
    else:
        if args.case is not None:
            raise UsageError("--case applies to --example 1 only")
        if args.alpha is None or args.v is None:
            raise UsageError("--example 2 requires --alpha and --v")
        spec = ScenarioSpec(2, args.n, alpha=args.alpha, v=args.v, seed=args.seed)
    data = generate(spec)
    cov_names = [f"x{j}" for j in range(1, data.p)]
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y", *cov_names])
        for yi, row in zip(data.y, data.X[:, 1:]):
            w.writerow([repr(float(yi))] + [repr(float(v)) for v in row])
    return 0


def _sigma_interval(args, data):
    if args.sigma_prior is None:
        return sigma_prior_interval(data, source=args.scale_source)
    lo, hi = _pair(args.sigma_prior, "--sigma-prior")
    if lo in RULES and hi in RULES:
        return sigma_prior_interval(data, lo, hi, source=args.scale_source)
    lo, hi = _float_pair(args.sigma_prior, "--sigma-prior")
    return lo, hi


def _fixed_sigma(args, data):
    if args.sigma is not None:
        return args.sigma
    if args.sigma_rule is not None:
        return sigma_from_rule(data, args.sigma_rule, source=args.scale_source)
    return None


def _run_one(args, data, c: int):
    seed = args.seed + c
    rng = make_rng(seed)
    init = dispersed_init(data, c, args.seed)
    if args.method == "pbmr":
        fixed = _fixed_sigma(args, data)
        sp = pbmr.Fixed(fixed) if fixed is not None else pbmr.UniformInterval(*_sigma_interval(args, data))
        prior = pbmr.PriorSpec.flat(data.p, sp)
        cfg = pbmr.default_config(data, prior, args.burnin, args.iters, init_beta=init)
        try:
            return pbmr.fit_pbmr(data, prior, cfg, rng, seed=seed)
        except InitializationError:
            if c == 0:
                raise
            cfg = pbmr.default_config(data, prior, args.burnin, args.iters)
            return pbmr.fit_pbmr(data, prior, cfg, rng, seed=seed)
    if args.method == "nbmr":
        hyper = nbmr.NBMRHyper(
            K=args.truncation, M_prior=_float_pair(args.dp_m_prior, "--dp-m-prior"), d=args.dp_d
        )
        d = nbmr.default_d(data) if args.dp_d is None else args.dp_d
        if np.max(np.abs(data.residuals(init))) >= d:
            init = ols_init(data)
        cfg = nbmr.nbmr_config(data, args.burnin, args.iters, init_beta=init)
        return nbmr.fit_nbmr(data, hyper, cfg, rng, seed=seed)
    sigma = _fixed_sigma(args, data)
    prior = pbmr.PriorSpec.flat(data.p, pbmr.Fixed(sigma))
    cfg = elbmr.elbmr_config(data, sigma, args.burnin, args.iters)
    cfg.init = init
    try:
        return elbmr.fit_elbmr(data, prior, sigma, cfg, rng, seed=seed)
    except InitializationError:
        if c == 0:
            raise
        cfg.init = ols_init(data)
        return elbmr.fit_elbmr(data, prior, sigma, cfg, rng, seed=seed)


def cmd_fit(args) -> int:
    if args.method == "elbmr" and args.sigma is None and args.sigma_rule is None:
        raise UsageError("elbmr requires --sigma or --sigma-rule")
    if args.method == "nbmr" and (args.sigma is not None or args.sigma_rule or args.sigma_prior):
        raise UsageError("sigma flags do not apply to nbmr; use --dp-d / --dp-m-prior")
    if args.iters < 1 or args.burnin < 0:
        raise UsageError("--iters must be positive and --burnin non-negative")
    n_chains = args.chains if args.chains is not None else (2 if args.method == "nbmr" else 1)
    if n_chains < 1:
        raise UsageError("--chains must be positive")
    data = load_csv(args.data, args.response, intercept=not args.no_intercept)

    tables, names = [], None
    for c in range(n_chains):
        chain = _run_one(args, data, c)
        chain.to_csv(f"{args.out}.chain{c}.csv")
        names, table = chain.columns()
        tables.append(table)
    doc = summary_document(tables, names, args.method, args.seed)
    _write_json(f"{args.out}.summary.json", doc)
    if args.table:
        print(format_table(doc))
    return 0


def cmd_summarize(args) -> int:
    names, tables = None, []
    for path in args.chains:
        cols, draws, _ = read_chain_csv(path)
        if names is None:
            names = cols
        elif cols != names:
            raise UsageError(f"{path}: columns {cols} do not match {names}")
        tables.append(draws)
    doc = summary_document(tables, names, args.method, args.seed)
    _write_json(args.out, doc)
    if args.table:
        print(format_table(doc))
    return 0


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "summarize": cmd_summarize}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except (UsageError, DataError, InitializationError, ValueError, OSError, RuntimeError) as exc:
        print(f"modereg {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
