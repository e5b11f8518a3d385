"""Command-line entry point.

Exit codes: 0 success, 1 usage or input error, 2 a theorem-backed verdict
failed.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import ff
from .block import ENUMERATION_GUARD
from .construction import (
    BRUTE_GUARD,
    ExpanderTrellisCode,
    all_messages,
    default_spec,
    ec_column_bound_check,
    ec_rate_degree_report,
    ec_theorem_main_report,
    ec_verify_claims,
    ec_witness_check,
    micro_spec,
    sample_messages,
)
from .conv import TRANSITION_GUARD, cc_bounds, cc_search_profile
from .errors import BudgetExceeded, InputParseError, TrellexError, VerdictFailure
from .expander import mixing_sweep, xg_complete, xg_gamma, xg_random_regular
from .io import load_block, load_construction, load_conv, load_graph, load_trellis
from .trellis import TrellisCode, number_json, tc_bounds, tc_example1
from .verify import verify_all

SCHEMA = 1


class UsageError(TrellexError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class VerdictExit(VerdictFailure):
    """A report was produced but at least one verdict is false."""

    def __init__(self, report):
        super().__init__("verdict failure")
        self.report = report


# -- output ---------------------------------------------------------------------


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Fraction):
        return number_json(x)
    return x


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(report: dict, fmt: str) -> str:
    report = _plain(dict(report, schema=SCHEMA))
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    rows = [(k, json.dumps(v) if isinstance(v, (list, bool)) or v is None else str(v))
            for k, v in _flatten(report)]
    if fmt == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(rows)
        return buf.getvalue().rstrip("\n")
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


# -- helpers ----------------------------------------------------------------------


def _parse_vector(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise InputParseError(f"bad vector {text!r}") from exc


def _need(args, name):
    if getattr(args, name, None) is None:
        raise UsageError(f"--{name.replace('_', '-')} is required")
    return getattr(args, name)


def _field_args(args) -> ff.FieldSpec:
    modulus = _parse_vector(args.modulus) if args.modulus else None
    return ff.make_field(args.p, args.e, modulus)


# -- field and block --------------------------------------------------------------


def cmd_field(args) -> dict:
    f = _field_args(args)
    if args.action == "make":
        return {"field": f.to_json(), "q": f.q, "generator": f.generator}
    a = f.element(_need(args, "a"))
    op = args.op
    if op in ("neg", "inv"):
        res = ff.ff_arith(a, None, op)
    else:
        res = ff.ff_arith(a, f.element(_need(args, "b")), op)
    return {"field": f.to_json(), "op": op, "a": int(a), "b": args.b, "result": int(res),
            "result_coeffs": res.coeffs}


def cmd_block(args) -> dict:
    code = load_block(_need(args, "spec"))
    out = {"n": code.n, "k": code.k, "rate": str(code.rate), "field": code.field.to_json()}
    if args.action == "stats":
        d = code.min_distance(guard=args.guard or ENUMERATION_GUARD)
        out.update(distance=d, relative_distance=str(Fraction(d, code.n)))
    else:
        word = _parse_vector(_need(args, "word"))
        out.update(word=word, contains=bool(code.contains(word)))
    return out


# -- convolutional -----------------------------------------------------------------


def cmd_conv(args) -> dict:
    guard = args.guard or TRANSITION_GUARD
    if args.action == "search":
        f = _field_args(args)
        res = cc_search_profile(_need(args, "n"), _need(args, "k"), _need(args, "m"), f,
                                budget=args.budget, seed=args.seed, reduced_only=args.reduced_only)
        out = {"generator": res.code.to_json(), "profile": list(res.profile), "evaluated": res.evaluated,
               "exhaustive": res.exhaustive, "chain_violations": len(res.chain_violations)}
        if res.chain_violations:
            raise VerdictExit(out)
        return out
    code = load_conv(_need(args, "spec"))
    if args.action == "stats":
        return code.stats()
    if args.action == "coldist":
        j = _need(args, "j")
        col = code.column_distances(j, guard=guard)
        return {"j": j, "column": col, "column_distance": col[j]}
    if args.action == "freedist":
        return {"free_distance": code.free_distance(), "catastrophic": code.catastrophic}
    prof = cc_bounds(code, horizon=args.j)
    return prof.to_json()


# -- trellis -------------------------------------------------------------------------


def cmd_trellis(args) -> dict:
    if args.action == "example1":
        q, M, n, j = (_need(args, x) for x in ("q", "M", "n", "j"))
        ex = tc_example1(q, M, n, j)
        rep = tc_bounds(ex.code, j, with_free=False, M=M)
        out = {
            "q": q, "M": M, "n": n, "j": j, "codebook_size": len(ex.codebook),
            "column_distance": rep.column[j], "column": rep.column,
            "analogue_column_bound": number_json(rep.analogue[j]), "analogue_int": rep.analogue_int[j],
            "trellis_column_bound": number_json(rep.column_bound[j]), "column_bound_int": rep.column_bound_int[j],
            "exceeds_convolutional_analogue": rep.column[j] > rep.analogue[j],
            "meets_column_bound_int": rep.column[j] == rep.column_bound_int[j],
            "log_q_M": number_json(rep.log_q_M), "verdicts": rep.verdicts,
        }
        if not (rep.ok and out["exceeds_convolutional_analogue"]):
            raise VerdictExit(out)
        return out
    g = load_trellis(_need(args, "spec"))
    t = TrellisCode(g, args.initial)
    base = {"flags": t.flags.__dict__, "states": g.num_states, "M": t.M, "q": t.q, "n": t.n,
            "degree_upper": number_json(t.degree_upper)}
    if args.action == "validate":
        return base
    if args.action == "coldist":
        j = _need(args, "j")
        col = t.column_distances(j)
        return dict(base, j=j, column=col, column_distance=col[j])
    if args.action == "freedist":
        return dict(base, free_distance=t.free_distance())
    rep = tc_bounds(t, _need(args, "j"), M=args.M)
    out = dict(base, bounds=rep.to_json())
    if not rep.ok:
        raise VerdictExit(out)
    return out


# -- graphs --------------------------------------------------------------------------


def cmd_graph(args) -> dict:
    if args.action == "gen":
        n = _need(args, "n")
        if args.type == "complete":
            g = xg_complete(n)
        else:
            g = xg_random_regular(n, _need(args, "delta"), args.seed)
        if args.out:
            Path(args.out).write_text(g.to_text())
        return {"n": g.n, "delta": g.delta, "edges": [[s + 1, t + 1] for s, t in g.edges], "out": args.out}
    g = load_graph(_need(args, "graph"))
    prof = xg_gamma(g)
    if args.action == "gamma":
        return dict(prof.to_json(), n=g.n)
    sweep = mixing_sweep(g, prof.gamma, args.trials, args.seed)
    out = dict(gamma=prof.gamma, n=g.n, delta=g.delta, **sweep)
    if sweep["failures"]:
        raise VerdictExit(out)
    return out


# -- construction ----------------------------------------------------------------------


def _construction(args):
    if args.spec:
        return load_construction(args.spec, args.seed)
    return (micro_spec() if args.instance == "micro" else default_spec()), None


def cmd_construct(args) -> dict:
    spec, override = _construction(args)
    if args.action == "report":
        rep = ec_theorem_main_report(spec, args.horizon, samples=args.samples, seed=args.seed,
                                     override_G0=override)
        if not rep["passed"]:
            raise VerdictExit(rep)
        return rep
    etc = ExpanderTrellisCode(spec, override_G0=override)
    out = {
        "dim_B": etc.k, "dim_lower_bound": spec.dimension_lower_bound(),
        "length_B": etc.ic.length, "rank_G0": ff.rank(spec.field, etc.lifted.blocks[0]),
        "lifted_memory": etc.conv.memory, "lifted_nu": etc.conv.degree_upper,
        "packed_alphabet": etc.phi.target.q,
    }
    if args.action == "build":
        out["rate_degree"] = ec_rate_degree_report(etc).to_json()
        return out
    guard = args.guard or BRUTE_GUARD
    try:
        msgs = all_messages(etc.k, spec.field.q, args.horizon, guard=args.samples)
    except BudgetExceeded:
        msgs = sample_messages(etc.k, spec.field.q, args.horizon, args.samples, args.seed)
    out["claims"] = ec_verify_claims(etc, msgs).to_json()
    gamma = xg_gamma(spec.graph).gamma
    outer = spec.conv.column_distances(args.horizon)
    for x in msgs:
        if x[0].any():
            ec_witness_check(etc, x, gamma, outer)
    out["witness_checked"] = int(sum(1 for x in msgs if x[0].any()))
    col = ec_column_bound_check(etc, gamma, args.horizon, outer_column=outer)
    out["column_bound"] = [r.to_json() for r in col]
    out["guard"] = guard
    if not all(r.passed for r in col):
        raise VerdictExit(out)
    return out


def cmd_verify_all(args) -> dict:
    if args.fixtures_only and not args.fixtures:
        raise UsageError("--fixtures-only needs --fixtures")
    rep = verify_all(args.fixtures, seed=args.seed, builtin=not args.fixtures_only)
    if rep["exit_code"] == 2:
        raise VerdictExit(rep)
    if rep["exit_code"] == 1:
        raise _InputFailure(rep)
    return rep


class _InputFailure(TrellexError):
    def __init__(self, report):
        super().__init__("input errors in fixtures")
        self.report = report


# -- parser ------------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, defaults: bool):
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--format", choices=("json", "text", "csv"), default=d("json"))
    p.add_argument("--guard", type=int, default=d(None), help="enumeration / state guard")
    p.add_argument("--seed", type=int, default=d(7))
    p.add_argument("--threads", type=int, default=d(None),
                   help="worker threads (falls back to ECC_THREADS); results do not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trellex", description="Convolutional, trellis and expander-lifted codes.")
    _common(parser, True)
    common = _Parser(add_help=False)
    _common(common, False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("field", parents=[common], help="finite-field construction and arithmetic")
    p.add_argument("action", choices=("make", "arith"))
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--e", type=int, default=1)
    p.add_argument("--modulus", help="ascending coefficients, e.g. 1,1,1")
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--op", choices=("add", "sub", "mul", "div", "neg", "inv"), default="add")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("block", parents=[common], help="linear block codes")
    p.add_argument("action", choices=("stats", "contains"))
    p.add_argument("--spec")
    p.add_argument("--word", help="comma-separated element indices")
    p.set_defaults(func=cmd_block)

    p = sub.add_parser("conv", parents=[common], help="convolutional codes")
    p.add_argument("action", choices=("stats", "coldist", "freedist", "bounds", "search"))
    p.add_argument("--spec")
    p.add_argument("--j", "--horizon", dest="j", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--e", type=int, default=1)
    p.add_argument("--modulus")
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--reduced-only", action="store_true")
    p.set_defaults(func=cmd_conv)

    p = sub.add_parser("trellis", parents=[common], help="trellis codes")
    p.add_argument("action", choices=("validate", "coldist", "freedist", "bounds", "example1"))
    p.add_argument("--spec", help="trellis file")
    p.add_argument("--initial", type=int, default=0)
    p.add_argument("--j", "--horizon", dest="j", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--M", type=int)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_trellis)

    p = sub.add_parser("graph", parents=[common], help="bipartite expanders")
    p.add_argument("action", choices=("gen", "gamma", "mix"))
    p.add_argument("--type", choices=("complete", "random"), default="complete")
    p.add_argument("--n", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--graph", help="graph file")
    p.add_argument("--out", help="write the generated graph file here")
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("construct", parents=[common], help="expander-lifted trellis codes")
    p.add_argument("action", choices=("build", "verify", "report"))
    p.add_argument("--spec", help="construction spec JSON")
    p.add_argument("--instance", choices=("micro", "default"), default="default")
    p.add_argument("--horizon", "--j", dest="horizon", type=int, default=1)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify-all", parents=[common], help="run the full invariant battery")
    p.add_argument("--fixtures", help="directory of extra JSON fixtures")
    p.add_argument("--fixtures-only", action="store_true", help="skip the built-in checks")
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    fmt = "json"
    try:
        args = parser.parse_args(argv)
        fmt = args.format
        if args.threads is None:
            env = os.environ.get("ECC_THREADS")
            args.threads = int(env) if env and env.isdigit() else 1
        if args.threads < 1 or (args.guard is not None and args.guard < 1):
            raise UsageError("--threads and --guard must be positive")
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            report = args.func(args)
        print(render(report, fmt))
        return 0
    except VerdictExit as exc:
        print(render(exc.report, fmt))
        return 2
    except _InputFailure as exc:
        print(render(exc.report, fmt))
        return 1
    except VerdictFailure as exc:
        _error(exc, fmt)
        return 2
    except (TrellexError, ValueError, OSError) as exc:
        _error(exc, fmt)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def _error(exc: Exception, fmt: str):
    detail = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("witness", "decomposition"):
        if getattr(exc, attr, None) is not None:
            detail[attr] = getattr(exc, attr)
    print(render(detail, fmt), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
