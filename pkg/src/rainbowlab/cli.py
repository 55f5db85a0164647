"""Command-line entry point.

Every invocation writes exactly one JSON run report to stdout; logs and
errors go to stderr.  Exit codes: 0 for a definitive result, 2 for an
inconclusive one (budget exhausted, nothing found), 1 for usage or input
errors.  All subcommands accept --seed, --workers, --max-nodes and
--time-limit; RAINBOWLAB_WORKERS sets the default worker count.

Reals are rendered with 6 significant digits; integers outside the
float-safe range (and all exact coefficient outputs) are rendered as
decimal strings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict

from . import __version__, fileio, kernels, matchings, polynomial, sequences, shifting, spread
from .core import BudgetExhaustedError, Family, FamilySystem, InvalidInputError, Universe
from .search import SearchBudget, construct_stripe, find_rainbow, saturate
from .sequences import SequenceSpec

G_STREAM_WORKER = 10**6  # reserved substream index for sampling the target set


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on usage errors, per the exit-code taxonomy."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _jsonify(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value) if abs(value) >= 2**53 else value
    if isinstance(value, float):
        return float(f"{value:.6g}")
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    return value


def render_report(report: dict) -> str:
    """Stable JSON rendering: insertion order, 6-significant-digit reals."""
    return json.dumps(_jsonify(report), indent=2)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _budget(args) -> SearchBudget:
    kwargs = {}
    if args.max_nodes is not None:
        kwargs["max_nodes"] = args.max_nodes
    if args.time_limit is not None:
        kwargs["time_limit"] = args.time_limit
    return SearchBudget(**kwargs)


def _universe(args) -> Universe:
    return Universe(args.n, args.k)


def _pattern_json(p: spread.Pattern) -> list[list[int]]:
    return [[j, a] for j, a in p.pairs]


def _spread_result_json(res: spread.SpreadResult) -> dict:
    return {
        "r_used": res.r_used,
        "s0": [_pattern_json(p) for p in res.s0],
        "s1": [_pattern_json(p) for p in res.s1],
        "s2": [_pattern_json(p) for p in res.s2],
        "leftover_size": len(res.leftover),
        "leftover": [list(t) for t in res.leftover],
        "trace": [
            {
                "pattern": _pattern_json(step.pattern),
                "family_size": step.family_size,
                "selected": step.selected,
                "accepted": step.accepted,
            }
            for step in res.trace
        ],
    }


def _verdict_json(verdict: sequences.Verdict) -> dict:
    return {
        "status": verdict.status,
        "witness": fileio.format_system(verdict.witness) if verdict.witness else None,
        "work": {"systems": verdict.work.systems, "nodes": verdict.work.nodes},
    }


# --- subcommand handlers: each returns (payload, exit_code) ---


def _cmd_verify(args):
    spec = SequenceSpec(_universe(args), len(args.seq), tuple(args.seq))
    if args.s is not None and args.s != spec.s:
        raise InvalidInputError(f"--s {args.s} disagrees with --seq length {spec.s}")
    verdict = sequences.is_satisfying(spec, _budget(args), workers=args.workers)
    return _verdict_json(verdict), (2 if verdict.status == "unknown" else 0)


def _cmd_falsify(args):
    spec = SequenceSpec(_universe(args), len(args.seq), tuple(args.seq))
    witness = sequences.falsify_random(spec, args.seed, args.samples)
    payload = {
        "found": witness is not None,
        "witness": fileio.format_system(witness) if witness else None,
        "iterations": args.samples,
    }
    return payload, (0 if witness is not None else 2)


def _cmd_minimal_c(args):
    result = sequences.minimal_c_search(
        _universe(args), args.s, _budget(args), workers=args.workers
    )
    payload = {
        "c": result.c,
        "witness_below": (
            fileio.format_system(result.witness_below) if result.witness_below else None
        ),
        "scanned": [[c, status] for c, status in result.scanned],
        "work": {"systems": result.work.systems, "nodes": result.work.nodes},
    }
    return payload, (0 if result.c is not None else 2)


def _cmd_bounds(args):
    report = sequences.threshold_report(args.n, args.s, args.k)
    payload = asdict(report)
    payload["log_note"] = "log is natural; log2 is base 2"
    return payload, 0


def _cmd_shift(args):
    system = fileio.read_system(args.input)
    partial = [v is not None for v in (args.j, args.a, args.b)]
    if any(partial) and not all(partial):
        raise InvalidInputError("--j, --a, --b must be given together")
    if all(partial):
        shifted = shifting.shift_system(system, args.j, args.a, args.b)
        mode = f"single S_({args.j},{args.a},{args.b})"
    else:
        shifted = shifting.shift_schedule(system)
        mode = "full schedule"
    if args.output:
        fileio.write_system(shifted, args.output)
    payload = {
        "mode": mode,
        "sizes": [len(f) for f in shifted.families],
        "compressed": [
            [shifting.is_compressed(f, j) for j in range(1, system.universe.k + 1)]
            for f in shifted.families
        ],
        "system": fileio.format_system(shifted),
        "output": args.output,
    }
    return payload, 0


def _cmd_saturate(args):
    system = fileio.read_system(args.input)
    try:
        grown = saturate(system, _budget(args))
    except BudgetExhaustedError as exc:
        payload = {
            "status": "partial-saturation",
            "reason": str(exc),
            "system": fileio.format_system(exc.partial) if exc.partial else None,
        }
        return payload, 2
    if args.output:
        fileio.write_system(grown, args.output)
    payload = {
        "status": "saturated",
        "sizes_before": [len(f) for f in system.families],
        "sizes_after": [len(f) for f in grown.families],
        "system": fileio.format_system(grown),
        "output": args.output,
    }
    return payload, 0


def _cmd_spread(args):
    system = fileio.read_system(args.input)
    s = args.s if args.s is not None else system.s
    results = [
        spread.postprocess(spread.build_spread(f, s, args.r_override), s)
        for f in system.families
    ]
    reports = [
        spread.verify_spread(f, res, s, pipeline=results)
        for f, res in zip(system.families, results)
    ]
    selection = reports[0].patterns_matching if reports else None
    payload = {
        "s": s,
        "families": [
            {
                "result": _spread_result_json(res),
                "checks": {
                    "partition_ok": rep.partition_ok,
                    "cover_ok": rep.cover_ok,
                    "singleton_cap_ok": rep.singleton_cap_ok,
                    "pair_cap_ok": rep.pair_cap_ok,
                    "leftover_size": rep.leftover_size,
                    "leftover_bound": rep.leftover_bound,
                    "leftover_bound_applies": rep.leftover_bound_applies,
                    "leftover_ok": rep.leftover_ok,
                },
            }
            for res, rep in zip(results, reports)
        ],
        "pattern_matching_found": selection is not None,
        "pattern_matching": (
            [_pattern_json(p) for p in selection] if selection is not None else None
        ),
    }
    return payload, 0


def _cmd_sample_matching(args):
    u = _universe(args)
    rng = matchings.rng_stream(args.seed)
    sampled = [matchings.sample_matching(u, rng) for _ in range(args.samples)]
    payload = {
        "matching_count": matchings.matching_count(u.n, u.k),
        "samples": [
            {"perms": [list(p) for p in m.perms], "members": [list(t) for t in m.members()]}
            for m in sampled
        ],
    }
    return payload, 0


def _cmd_concentration(args):
    u = _universe(args)
    if args.input:
        system = fileio.read_system(args.input)
        if system.universe != u:
            raise InvalidInputError("--input universe disagrees with --n/--k")
        g = system.families[0]
    else:
        if args.alpha is None:
            raise InvalidInputError("needs --alpha (random target set) or --input")
        size = round(args.alpha * u.size)
        rng = matchings.rng_stream(args.seed, G_STREAM_WORKER)
        g = Family.from_indices(
            u, (int(v) for v in rng.choice(u.size, size=size, replace=False))
        )
    report = matchings.mc_tail(g, args.samples, args.lambdas, args.seed, args.workers)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(report.csv())
    payload = {
        "alpha": report.alpha,
        "g_size": report.g_size,
        "samples": report.samples,
        "workers": report.workers,
        "rows": [
            {
                "lambda": r.lam,
                "deviation": r.deviation,
                "upper_emp": r.upper_emp,
                "upper_se": r.upper_se,
                "lower_emp": r.lower_emp,
                "lower_se": r.lower_se,
                "bound": r.bound,
            }
            for r in report.rows
        ],
        "csv": report.csv(),
        "output": args.output,
    }
    return payload, 0


def _cmd_stripe(args):
    u = _universe(args)
    fam = construct_stripe(u, args.s)
    system = FamilySystem(u, [fam] * args.s)
    if args.output:
        fileio.write_system(system, args.output)
    search = find_rainbow(system, _budget(args))
    payload = {
        "family_size": len(fam),
        "copies": args.s,
        "rainbow_status": search.status,
        "system": fileio.format_system(system),
        "output": args.output,
    }
    return payload, 0


def _cmd_nullsatz(args):
    verb = args.verb
    if verb == "coeff":
        s = len(args.exponents)
        coeff, witness = polynomial.squared_coeff_witness(s, args.exponents)
        payload = {
            "s": s,
            "exponents": list(args.exponents),
            "squared_coeff": str(coeff),
            "witness_pair": [list(witness[0]), list(witness[1])] if witness else None,
            "vandermonde_coeff": str(polynomial.vandermonde_coeff(s, args.exponents)),
        }
        return payload, 0
    if verb == "coeff-mod":
        s = len(args.exponents)
        value = polynomial.coeff_mod_p(s, args.exponents, args.mod_p)
        payload = {
            "s": s,
            "exponents": list(args.exponents),
            "p": args.mod_p,
            "coeff_mod_p": str(value),
            "nonzero": value != 0,
        }
        return payload, 0
    pair = polynomial.PermutationPair(tuple(args.perm_a), tuple(args.perm_b))
    if verb == "sequence":
        spec = polynomial.sequence_from_perms(args.n, pair)
        payload = {
            "n": args.n,
            "s": spec.s,
            "f": list(spec.f),
            "provenance": spec.provenance,
        }
        return payload, 0
    if verb == "verify":
        verdict = polynomial.verify_permutation_sequence(
            args.n, pair, _budget(args), workers=args.workers
        )
        spec = polynomial.sequence_from_perms(args.n, pair)
        payload = {"f": list(spec.f)}
        payload.update(_verdict_json(verdict))
        return payload, (2 if verdict.status == "unknown" else 0)
    raise InvalidInputError(f"unknown nullsatz verb {verb!r}")


def _cmd_nullsatz_degree(args):
    system = fileio.read_system(args.input)
    fam = system.families[args.family_index - 1]
    report = polynomial.sz_check(fam)
    payload = {
        "family_index": args.family_index,
        "family_size": report.family_size,
        "degree": report.degree,
        "sz_bound": report.bound,
        "sz_ok": report.ok,
    }
    return payload, 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="rainbowlab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument(
        "--workers", type=int, default=int(os.environ.get("RAINBOWLAB_WORKERS", "1"))
    )
    common.add_argument("--max-nodes", type=int, default=None)
    common.add_argument("--time-limit", type=float, default=None)

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common], help="decide a threshold sequence")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--seq", type=_int_list, required=True)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("falsify", parents=[common], help="random counterexample search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seq", type=_int_list, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(handler=_cmd_falsify)

    p = sub.add_parser("minimal-c", parents=[common], help="least satisfying offset c")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(handler=_cmd_minimal_c)

    p = sub.add_parser("bounds", parents=[common], help="closed-form threshold report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser("shift", parents=[common], help="shift a system (one map or full schedule)")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--j", type=int, default=None)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.set_defaults(handler=_cmd_shift)

    p = sub.add_parser("saturate", parents=[common], help="grow to an inclusion-maximal counterexample")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_saturate)

    p = sub.add_parser("spread", parents=[common], help="spread approximation per family")
    p.add_argument("--input", required=True)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--r-override", type=float, default=None)
    p.set_defaults(handler=_cmd_spread)

    p = sub.add_parser("sample-matching", parents=[common], help="uniform perfect matchings")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.set_defaults(handler=_cmd_sample_matching)

    p = sub.add_parser("concentration", parents=[common], help="Monte Carlo tail frequencies")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--input", default=None)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--lambdas", type=_float_list, default=[2.0, 4.0, 6.0, 8.0])
    p.add_argument("--output", default=None, help="write the CSV rows here")
    p.set_defaults(handler=_cmd_concentration)

    p = sub.add_parser("stripe", parents=[common], help="the extremal stripe construction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_stripe)

    p = sub.add_parser("nullsatz", parents=[], help="k=2 polynomial-method tools")
    verbs = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb in ("coeff", "coeff-mod", "sequence", "degree", "verify"):
        vp = verbs.add_parser(verb, parents=[common])
        if verb in ("coeff", "coeff-mod"):
            vp.add_argument("--exponents", type=_int_list, required=True)
            if verb == "coeff-mod":
                vp.add_argument("--mod-p", type=int, required=True)
            vp.set_defaults(handler=_cmd_nullsatz)
        elif verb == "degree":
            vp.add_argument("--input", required=True)
            vp.add_argument("--family-index", type=int, default=1)
            vp.set_defaults(handler=_cmd_nullsatz_degree)
        else:
            vp.add_argument("--n", type=int, required=True)
            vp.add_argument("--perm-a", type=_int_list, required=True)
            vp.add_argument("--perm-b", type=_int_list, required=True)
            vp.set_defaults(handler=_cmd_nullsatz)
    return parser


def _parameters_json(args) -> dict:
    skip = {"handler", "command", "verb"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key.replace("_", "-")] = value
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        payload, code = args.handler(args)
    except (InvalidInputError, fileio.ParseError) as exc:
        print(f"rainbowlab: error: {exc}", file=sys.stderr)
        return 1
    command = args.command + (f" {args.verb}" if getattr(args, "verb", None) else "")
    report = {
        "version": __version__,
        "command": command,
        "parameters": _parameters_json(args),
        "seed": getattr(args, "seed", 0),
        "result": payload,
        "elapsed_ms": int((time.monotonic() - start) * 1000),
    }
    print(render_report(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
