"""Command-line front end.

    sumnorm norm --spec s.json --seq x.json
    sumnorm estimate --problem p.json
    sumnorm verify [--suite all|ID] [--config c.json]

A short table goes to stdout (the seed first); the full JSON goes to
``--output`` when given.  Exit status: 0 success, 1 failed check, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .nseq import NSeq
from .optim import DEFAULT_BUDGET, OptBudget
from .seqclass import ClassSpec, class_norm
from .spaces import FiniteSpace, InputError
from .summing import SummingProblem, estimate_lower
from .verify import CheckConfig, check, parse_property, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None


def _parse(path: str, what: str, fn):
    """Run a ``from_json`` parser, prefixing its diagnostic with the file name."""
    obj = _load(path)
    try:
        return fn(obj)
    except InputError as e:
        raise InputError(f"{path}: {e}") from None
    except (TypeError, ValueError, KeyError) as e:
        raise InputError(f"{path}: invalid {what}: {e}") from None


def _nseq(obj) -> NSeq:
    """An n-sequence object, or bare nested entries (vectors in ``l_2``)."""
    if isinstance(obj, list):
        import numpy as np

        arr = np.asarray(obj, dtype=float)
        if arr.ndim < 2:
            raise InputError("nseq: bare entries need at least one index axis and a vector axis")
        return NSeq(arr, FiniteSpace(arr.shape[-1], 2.0))
    return NSeq.from_json(obj)


def _budget(args, base: OptBudget) -> OptBudget:
    kw = {}
    if args.starts is not None:
        kw["starts"] = args.starts
    if args.iters is not None:
        kw["iterations"] = args.iters
    if args.tol is not None:
        kw["tolerance"] = args.tol
    if args.seed is not None:
        kw["seed"] = args.seed
    return replace(base, **kw) if kw else base


def _emit(args, table: str, payload: dict):
    print(table)
    if args.output:
        text = json.dumps(payload, sort_keys=True, indent=2)
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as e:
            raise InputError(f"{args.output}: {e.strerror}") from None


def cmd_norm(args) -> int:
    spec = _parse(args.spec, "class spec", ClassSpec.from_json)
    x = _parse(args.seq, "n-sequence", _nseq)
    budget = _budget(args, DEFAULT_BUDGET)
    res = class_norm(spec, x, budget)
    table = "\n".join([f"seed {budget.seed}", f"class  {spec}", f"space  {x.space!r}",
                       f"bounds {list(x.bounds)}", f"value  {res.value!r}", f"mode   {res.mode.value}",
                       f"converged {res.converged}"])
    _emit(args, table, {"seed": budget.seed, "spec": spec.to_json(), "result": res.to_json()})
    return EXIT_OK


def cmd_estimate(args) -> int:
    prob = _parse(args.problem, "problem", SummingProblem.from_json)
    search = _budget(args, prob.budget)
    seed = search.seed
    prob = replace(prob, budget=search, norm_budget=prob.norm_budget.with_seed(seed))
    est = estimate_lower(prob)
    table = "\n".join([f"seed {seed}", f"value  {est.value!r}", f"shape  {list(est.shape)}",
                       f"modes  {' '.join(m.value for m in est.modes)}",
                       f"certified {est.certified}", f"converged {est.converged}"])
    _emit(args, table, {"seed": seed, "estimate": est.to_json()})
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _parse(args.config, "config", CheckConfig.from_json) if args.config else CheckConfig()
    try:
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        budget = _budget(argparse.Namespace(starts=args.starts, iters=args.iters, tol=args.tol, seed=None),
                         cfg.budget)
        cfg = replace(cfg, budget=budget)
    except (TypeError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(str(e)) from None
    if args.suite.lower() == "all":
        report = run_suite(cfg)
    else:
        report = check(parse_property(args.suite), cfg)
    _emit(args, report.table(), report.to_json())
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    common.add_argument("--output", help="write the full JSON result to this path")
    common.add_argument("--starts", type=int, help="override optimizer restarts")
    common.add_argument("--iters", type=int, help="override optimizer iterations")
    common.add_argument("--tol", type=float, help="override optimizer tolerance")

    parser = argparse.ArgumentParser(prog="sumnorm", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("norm", parents=[common], help="evaluate a class norm")
    p.add_argument("--spec", required=True, help="class spec JSON")
    p.add_argument("--seq", required=True, help="n-sequence JSON")
    p.set_defaults(func=cmd_norm)
    p = sub.add_parser("estimate", parents=[common], help="lower-bound a summing norm")
    p.add_argument("--problem", required=True, help="summing problem JSON")
    p.set_defaults(func=cmd_estimate)
    p = sub.add_parser("verify", parents=[common], help="run property checks")
    p.add_argument("--suite", default="all", help="'all' or a property id")
    p.add_argument("--config", help="check config JSON")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "verify" and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
