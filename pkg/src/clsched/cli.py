"""Command-line interface.

Subcommands: gen, color, verify, simulate, bound, report.  Exit codes:
0 success, 1 invalid input or parameters, 2 verification failure.  All
randomness is seeded and the seed is echoed, so identical commands give
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bounds as bounds_mod
from .channel import (
    MODE_DETERMINISTIC,
    MODE_GAUSSIAN,
    random_trials,
    symbolic_verify,
)
from .coloring import check_coloring, tdma_coloring
from .errors import ClschedError, FormatError
from .expansion import expand
from .fileio import read_coloring, read_network, write_coloring, write_network
from .search import search_end_to_end, search_mcl, search_mil
from .topologies import (
    K22KPattern,
    gen_folded_single,
    gen_folded_two_layer,
    gen_k22k,
    gen_nested,
    gen_random,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VERIFY_FAILED = 2


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


# --- gen -----------------------------------------------------------------------

def _cmd_gen(args) -> int:
    if args.family == "folded-single":
        net = gen_folded_single(args.k, args.m)
    elif args.family == "folded-two-layer":
        net = gen_folded_two_layer(args.k, args.m)
    elif args.family == "k22k":
        pattern = (K22KPattern.full(args.k, args.m_layers)
                   if args.pattern == "full"
                   else K22KPattern.parallel(args.k, args.m_layers))
        net = gen_k22k(args.k, args.m_layers, pattern)
    elif args.family == "nested":
        net = gen_nested(args.l)
    else:
        sizes = [int(x) for x in args.layers.split(",")]
        net = gen_random(sizes, args.p, args.seed)
    write_network(net, args.output)
    print(f"wrote {args.output}: K={net.num_pairs}, "
          f"{net.num_layers} layers, {len(net.edges)} edges")
    return EXIT_OK


# --- color ---------------------------------------------------------------------

def _cmd_color(args) -> int:
    net = read_network(args.network)
    g = expand(net)
    if args.strategy == "tdma":
        assignment = tdma_coloring(g)
    elif args.strategy == "mil":
        assignment = search_mil(g)
    elif args.strategy == "e2e":
        assignment = search_end_to_end(g)
    elif args.strategy == "constructive":
        assignment = bounds_mod.constructive_coloring(net)
        if assignment is None:
            return _fail("no constructive schedule known for this network "
                         "(missing or unsupported family tag)", EXIT_INVALID)
    else:
        outcome = search_mcl(g, t_max=args.max_colors, budget=args.budget)
        if outcome.exhausted:
            print(f"search exhausted after {outcome.expansions} expansions; "
                  f"feasibility unknown from T={outcome.t_frontier}",
                  file=sys.stderr)
        if not outcome.found:
            return _fail("no coded-layer schedule found within limits",
                         EXIT_VERIFY_FAILED)
        assignment = outcome.assignment
    write_coloring(g, assignment, args.output)
    print(f"wrote {args.output}: strategy={args.strategy} T={assignment.num_colors}")
    return EXIT_OK


# --- verify ---------------------------------------------------------------------

def _verdict(flag: bool) -> str:
    return "pass" if flag else "FAIL"


def _cmd_verify(args) -> int:
    net = read_network(args.network)
    g = expand(net)
    assignment = read_coloring(args.coloring, g)
    report = check_coloring(g, assignment)
    modes = ([MODE_DETERMINISTIC, MODE_GAUSSIAN] if args.mode == "both"
             else [args.mode])
    symbolic = {mode: symbolic_verify(net, g, assignment, mode) for mode in modes}

    if args.format == "json":
        doc = {
            "T": assignment.num_colors,
            "checker": {
                "valid": report.valid,
                "independent_layer": report.is_independent_layer,
                "violations": [
                    {"condition": v.condition, "node": g.label(v.node),
                     "detail": v.detail}
                    for v in report.violations
                ],
            },
            "symbolic": {
                mode: {
                    "ok": rep.ok,
                    "failures": [
                        {"kind": f.kind, "node": g.label(f.node),
                         "detail": f.detail}
                        for f in rep.failures
                    ],
                }
                for mode, rep in symbolic.items()
            },
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"T={assignment.num_colors} "
              f"independent_layer={report.is_independent_layer}")
        failed = report.conditions_failed()
        for cond in ("C1", "C2", "C3", "C4", "C5", "C6"):
            print(f"  {cond}: {_verdict(cond not in failed)}")
        for v in report.violations:
            print(f"    [{v.condition}] {g.label(v.node)}: {v.detail}")
        for mode, rep in symbolic.items():
            print(f"  symbolic/{mode}: {_verdict(rep.ok)}")
            for f in rep.failures:
                print(f"    [{f.kind}] {f.detail}")
    ok = report.valid and all(rep.ok for rep in symbolic.values())
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


# --- simulate -------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    net = read_network(args.network)
    g = expand(net)
    assignment = read_coloring(args.coloring, g)
    report = random_trials(net, g, assignment, q=args.q,
                           trials=args.trials, seed=args.seed)
    print(f"seed={report.seed} trials={report.trials} q={args.q} "
          f"pass={report.trials - report.failures} fail={report.failures}")
    if not report.all_equal:
        trial, nodes = report.first_failure
        labels = ", ".join(g.label(n) for n in nodes[:5])
        print(f"first mismatch in trial {trial} at: {labels}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# --- bound / report ----------------------------------------------------------------

def _frac(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)


def _cmd_bound(args) -> int:
    net = read_network(args.network)
    result = bounds_mod.upper_bound(net)
    if args.format == "json":
        doc = {"alpha_upper": _frac(result.alpha_upper), "rule": result.rule}
        if result.witness is not None:
            doc["witness"] = {
                "cross": [result.witness.src_pair, result.witness.dst_pair],
                "v_star": net.name(result.witness.v_star),
                "high_edges": sorted(
                    [net.name(u), net.name(v)]
                    for u, v in result.witness.high_edges),
            }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"alpha_upper = {_frac(result.alpha_upper)}  (rule: {result.rule})")
        if result.witness is not None:
            w = result.witness
            print(f"witness: cross pair S{w.src_pair}->D{w.dst_pair}, "
                  f"decoder {net.name(w.v_star)}, "
                  f"{len(w.high_edges)} high-gain edges")
    return EXIT_OK


def _cmd_report(args) -> int:
    net = read_network(args.network)
    rep = bounds_mod.gain_report(net, search_budget=args.budget)
    if args.format == "json":
        doc = {
            "end_to_end": {"T": rep.t_e2e, "alpha": _frac(rep.alpha_e2e)},
            "mil": {"T": rep.t_mil, "alpha": _frac(rep.alpha_mil)},
            "mcl": {"T": rep.t_mcl, "alpha": _frac(rep.alpha_mcl),
                    "source": rep.mcl_source},
            "bound": {"alpha": _frac(rep.bound.alpha_upper),
                      "rule": rep.bound.rule},
            "ratio_mcl_over_mil": _frac(rep.ratio_mcl_over_mil),
            "tight": rep.tight,
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        rows = [
            ("scheme", "T", "alpha"),
            ("end-to-end", str(rep.t_e2e), _frac(rep.alpha_e2e)),
            ("MIL", str(rep.t_mil), _frac(rep.alpha_mil)),
            (f"MCL ({rep.mcl_source})", str(rep.t_mcl), _frac(rep.alpha_mcl)),
            ("upper bound", "-", _frac(rep.bound.alpha_upper)),
        ]
        widths = [max(len(row[i]) for row in rows) for i in range(3)]
        for row in rows:
            print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
        print(f"rule: {rep.bound.rule}   "
              f"MCL/MIL gain: {_frac(rep.ratio_mcl_over_mil)}   "
              f"tight: {'yes' if rep.tight else 'no'}")
    return EXIT_OK


# --- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clsched",
        description="Coded-layer scheduling toolkit for layered networks")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a topology file")
    gen_sub = gen.add_subparsers(dest="family", required=True)
    fs = gen_sub.add_parser("folded-single")
    fs.add_argument("--k", type=int, required=True)
    fs.add_argument("--m", type=int, required=True)
    ft = gen_sub.add_parser("folded-two-layer")
    ft.add_argument("--k", type=int, required=True)
    ft.add_argument("--m", type=int, required=True)
    kk = gen_sub.add_parser("k22k")
    kk.add_argument("--k", type=int, required=True)
    kk.add_argument("--m-layers", type=int, required=True)
    kk.add_argument("--pattern", choices=["full", "parallel"], default="full")
    ns = gen_sub.add_parser("nested")
    ns.add_argument("--l", type=int, required=True)
    rn = gen_sub.add_parser("random")
    rn.add_argument("--layers", required=True,
                    help="comma-separated layer sizes, e.g. 3,4,3")
    rn.add_argument("--p", type=float, required=True)
    rn.add_argument("--seed", type=int, default=0)
    for sp in (fs, ft, kk, ns, rn):
        sp.add_argument("-o", "--output", required=True)

    color = sub.add_parser("color", help="compute a schedule")
    color.add_argument("network")
    color.add_argument("--strategy", required=True,
                       choices=["mcl", "mil", "e2e", "tdma", "constructive"])
    color.add_argument("--max-colors", type=int, default=None)
    color.add_argument("--budget", type=int, default=10_000_000)
    color.add_argument("-o", "--output", required=True)

    verify = sub.add_parser("verify", help="check a schedule")
    verify.add_argument("network")
    verify.add_argument("coloring")
    verify.add_argument("--mode", default="both",
                        choices=[MODE_DETERMINISTIC, MODE_GAUSSIAN, "both"])
    verify.add_argument("--format", default="text", choices=["text", "json"])

    simulate = sub.add_parser("simulate", help="bit-exact random trials")
    simulate.add_argument("network")
    simulate.add_argument("coloring")
    simulate.add_argument("--q", type=int, required=True)
    simulate.add_argument("--trials", type=int, default=100)
    simulate.add_argument("--seed", type=int, default=0)

    bound = sub.add_parser("bound", help="normalized sum-capacity upper bound")
    bound.add_argument("network")
    bound.add_argument("--format", default="text", choices=["text", "json"])

    report = sub.add_parser("report", help="compare schedules against the bound")
    report.add_argument("network")
    report.add_argument("--format", default="text", choices=["text", "json"])
    report.add_argument("--budget", type=int, default=1_000_000)
    return parser


_HANDLERS = {
    "gen": _cmd_gen,
    "color": _cmd_color,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "bound": _cmd_bound,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except FormatError as exc:
        return _fail(str(exc), EXIT_INVALID)
    except FileNotFoundError as exc:
        return _fail(str(exc), EXIT_INVALID)
    except ClschedError as exc:
        return _fail(f"{type(exc).__name__}: {exc}", EXIT_INVALID)


if __name__ == "__main__":
    sys.exit(main())
