"""Command-line entry point.

Exit codes: 0 success, 2 input error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import oracle
from .amplification import (AmplificationConfig, BoostPreconditionError, amplify, iterate_amplitudes,
                            synthetic_prep)
from .applications import find_primitive, primality_test
from .groups import ExtensionField, GroupError, parse_field_file, parse_group
from .order_finding import (InvalidMultipleError, OrderInstance, find_order, fourier_call_bound, make_rng,
                            round_bound)
from .sim import NumericalInvariantError, simulate, success_probability

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3

GROUP_HELP = ("group spec: zn:<n> (units mod n), fp:<p> (prime field), "
              "fpk:<p>,<k>[,c_0,...,c_k] (extension field, modulus coefficients constant term first)")


class InternalError(RuntimeError):
    pass


def _element_json(a):
    return list(a) if isinstance(a, tuple) else a


def _resolve_group(spec: str, field_file: str | None):
    kind, _, rest = spec.strip().partition(":")
    args = [s.strip() for s in rest.split(",") if s.strip()]
    if field_file is None or kind != "fpk" or len(args) != 2:
        return parse_group(spec)
    p, k = int(args[0]), int(args[1])
    with open(field_file) as fh:
        records = parse_field_file(fh.read())
    for rec in records:
        if isinstance(rec, ExtensionField) and (rec.p, rec.k) == (p, k):
            return rec
    return parse_group(spec)


def _report(command: str, inputs: dict, seed, result: dict, rounds, fourier_calls: int | None,
            records: list, wall_time: float | None) -> dict:
    calls = None if fourier_calls is None else {"exact": fourier_calls, "standard_qft_units": 3 * fourier_calls}
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "seed": seed,
        "result": result,
        "rounds": rounds,
        "fourier_calls": calls,
        "wall_time": wall_time,
        "trace": records,
    }


def _seed(args):
    _, seed = make_rng(args.seed)
    return seed


# -- subcommands ------------------------------------------------------------------

def cmd_order(args) -> dict:
    group = _resolve_group(args.group, args.field_file)
    x = group.parse_element(args.element)
    inst = OrderInstance(group, x, args.multiple)
    r, trace = find_order(inst, _seed(args))
    if oracle.brute_order(group, x) != r:
        raise InternalError(f"order finder returned {r}, brute force disagrees")
    result = {"order": r, "round_bound": round_bound(r), "fourier_call_bound": fourier_call_bound(inst.m, r)}
    inputs = {"group": group.spec, "element": _element_json(x), "multiple": inst.m}
    records = trace.to_dict()["records"]
    return _report("order", inputs, trace.seed, result, trace.rounds, trace.fourier_calls, records, None)


def cmd_primality(args) -> dict:
    if args.n < 2:
        raise ValueError(f"n must be >= 2, got {args.n}")
    candidates = None
    if args.candidates:
        candidates = [int(s) for s in args.candidates.split(",") if s.strip()]
    seed = _seed(args)
    v = primality_test(args.n, candidates, seed, args.max_candidates, args.random_order)
    if v.kind != "inconclusive" and v.is_prime != oracle.trial_division(args.n):
        raise InternalError(f"verdict {v.kind} contradicts trial division for n={args.n}")
    result = {"verdict": v.kind, "witness": v.witness, "reason": v.reason, "order": v.order,
              "candidates_tried": v.candidates}
    inputs = {"n": args.n, "max_candidates": args.max_candidates, "random_order": args.random_order,
              "candidates": candidates}
    records = [t.to_dict() for t in v.order_traces]
    rounds = sum(t.rounds for t in v.order_traces)
    return _report("primality", inputs, seed, result, rounds, v.fourier_calls, records, None)


def cmd_primitive(args) -> dict:
    group = _resolve_group(args.field, args.field_file)
    start = group.parse_element(args.start) if args.start is not None else None
    g, trace = find_primitive(group, start, _seed(args))
    if oracle.brute_order(group, g) != group.order():
        raise InternalError(f"returned element {g} is not a generator of {group.spec}")
    data = trace.to_dict()
    result = {"generator": _element_json(g), "order": group.order(), "start": data["start"]}
    inputs = {"field": group.spec, "start": args.start}
    records = {"rounds": data["rounds"], "order_traces": data["order_traces"]}
    return _report("primitive", inputs, trace.seed, result, len(trace.rounds), trace.fourier_calls, records, None)


def cmd_amplify_demo(args) -> dict:
    if not 0 < args.a < 1:
        raise ValueError(f"--a must lie in (0, 1), got {args.a}")
    extra = tuple(int(s) for s in args.extra_dims.split(",") if s.strip()) if args.extra_dims else ()
    phase = 1j if args.mode == "half" else -1
    target = 0.5 if args.mode == "half" else 0.25
    prep, chi = synthetic_prep(args.a, extra)
    config = AmplificationConfig(phase, phase, args.iterations)
    boosted = amplify(prep, chi, config)
    pre = success_probability(simulate(prep), chi)
    post = success_probability(simulate(boosted), chi)
    result = {"mode": args.mode, "pre_success": pre, "post_success": post, "exact_regime": abs(args.a - target) < 1e-12}
    if args.mode == "quarter":
        result["closed_form_success"] = iterate_amplitudes(args.a, args.iterations).success
    if not result["exact_regime"]:
        print(f"warning: a = {args.a} is not {target}; the {args.mode} boost is not exact here",
              file=sys.stderr)
    inputs = {"a": args.a, "mode": args.mode, "iterations": args.iterations, "extra_dims": list(extra)}
    return _report("amplify-demo", inputs, None, result, None, boosted.fourier_count(), [], None)


def cmd_verify(args) -> dict:
    from .verify import run_all

    selected = [int(s) for s in args.criteria.split(",")] if args.criteria else None
    results = run_all(selected)
    for res in results:
        print(res.line(), file=sys.stderr)
    result = {"passed": all(r.passed for r in results),
              "criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
                           for r in results]}
    return _report("verify", {"criteria": selected}, None, result, None, None, [], None)


# -- human-readable output -----------------------------------------------------------

def _print_human(report: dict, show_trace: bool):
    res = report["result"]
    cmd = report["command"]
    if cmd == "order":
        print(f"order = {res['order']}")
    elif cmd == "primality":
        line = f"{report['inputs']['n']}: {res['verdict']}"
        if res["witness"] is not None:
            line += f" (witness {res['witness']}: {res['reason']})"
        print(line)
    elif cmd == "primitive":
        print(f"generator = {res['generator']} (order {res['order']})")
    elif cmd == "amplify-demo":
        print(f"pre = {res['pre_success']:.15f}  post = {res['post_success']:.15f}")
    elif cmd == "verify":
        print("all criteria passed" if res["passed"] else "some criteria FAILED")
    if report["rounds"] is not None:
        print(f"rounds = {report['rounds']}")
    if report["fourier_calls"] is not None:
        fc = report["fourier_calls"]
        print(f"fourier calls = {fc['exact']} exact ({fc['standard_qft_units']} standard-QFT units)")
    if show_trace and report["trace"]:
        rows = report["trace"]
        if cmd == "order":
            for rec in rows:
                print(f"  round {rec['round']} j={rec['j']:>2} k={rec['k']:<6} d: {rec['d_before']} -> {rec['d_after']}")
        elif cmd == "primitive":
            for rec in rows["rounds"]:
                print(f"  x={rec['x']} (r={rec['r_x']}) y={rec['y']} (r={rec['r_y']}) -> z={rec['z']} (r={rec['r_z']})")
        else:
            print(json.dumps(rows, indent=2))
    if report["wall_time"] is not None:
        print(f"wall time = {report['wall_time']:.3f}s")


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exactorder", description="Exact quantum order finding, simulated.",
                                     epilog=GROUP_HELP)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--json", action="store_true", help="print the JSON report on stdout")
        p.add_argument("--trace", action="store_true", help="print per-round trace records")
        p.add_argument("--timing", action="store_true", help="record wall time (makes output non-reproducible)")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="PCG64 seed (default 0)")

    p = sub.add_parser("order", help="find the order of an element given a multiple", epilog=GROUP_HELP)
    p.add_argument("--group", required=True, help="group spec, e.g. zn:15")
    p.add_argument("--element", required=True, help="element: integer, or comma-separated coefficients")
    p.add_argument("--multiple", required=True, type=int, help="known multiple m of the order")
    p.add_argument("--field-file", help="file of 'p k c_0,...,c_k' moduli records")
    common(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("primality", help="test n for primality")
    p.add_argument("n", type=int)
    p.add_argument("--max-candidates", type=int, default=64)
    p.add_argument("--candidates", help="explicit comma-separated candidate list")
    p.add_argument("--random-order", action="store_true", help="draw candidates from the seeded stream")
    common(p)
    p.set_defaults(func=cmd_primality)

    p = sub.add_parser("primitive", help="find a primitive element of a finite field", epilog=GROUP_HELP)
    p.add_argument("--field", required=True, help="field spec, e.g. fp:7 or fpk:3,2")
    p.add_argument("--start", help="starting element (random from the seed if omitted)")
    p.add_argument("--field-file", help="file of 'p k c_0,...,c_k' moduli records")
    common(p)
    p.set_defaults(func=cmd_primitive)

    p = sub.add_parser("amplify-demo", help="boost a synthetic preparation")
    p.add_argument("--a", type=float, required=True, help="success probability of the preparation")
    p.add_argument("--mode", choices=("half", "quarter"), default="half")
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--extra-dims", help="comma-separated dims of extra uniformly prepared registers")
    common(p, seed=False)
    p.set_defaults(func=cmd_amplify_demo)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--criteria", help="comma-separated criterion numbers (default all)")
    common(p, seed=False)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        report = args.func(args)
    except (GroupError, InvalidMultipleError, BoostPreconditionError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalInvariantError, InternalError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.timing:
        report["wall_time"] = time.perf_counter() - t0
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        _print_human(report, args.trace)
    if report["command"] == "verify" and not report["result"]["passed"]:
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
