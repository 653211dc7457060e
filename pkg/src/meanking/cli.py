"""Command-line interface.

Exit codes: 0 success, 2 bad input, 3 validation failure, 4 prediction failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys

import numpy as np

from . import fixtures
from .errors import InputError, MeanKingError, PredictionFailed, ValidationError
from .galois import FieldSpec, default_spec, tables, tables_csv, tables_text
from .kings import (
    build_protocol,
    coincidence_check,
    compare_printed,
    exhaustive_verify,
    label_table,
    prime_power,
    run_round,
    sampled_verify,
)
from .mub import eigenvalue_symbol, family, family_text, family_to_json, unbiasedness_report
from .weylalg import DEFAULT_TOL

SUPPORTED_DIMS = (2, 3, 4, 5, 7, 8, 9)

EXIT_OK, EXIT_INPUT, EXIT_VALIDATION, EXIT_PREDICTION = 0, 2, 3, 4


def _poly(text: str) -> list[int]:
    try:
        return [int(c) for c in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _check_dim(d: int) -> int:
    if d not in SUPPORTED_DIMS:
        raise InputError(
            f"dimension {d} is unsupported; choose one of {', '.join(map(str, SUPPORTED_DIMS))}"
        )
    return d


def _field_for_dim(d: int, poly) -> FieldSpec:
    p, n = prime_power(d)
    return FieldSpec(p, n, tuple(poly)) if poly is not None else default_spec(p, n)


# --- subcommands ------------------------------------------------------------

def cmd_field(args, out) -> int:
    spec = FieldSpec(args.p, args.n, tuple(args.poly)) if args.poly else default_spec(args.p, args.n)
    if args.format == "csv":
        out.write(tables_csv(spec))
    elif args.format == "json":
        add_t, mul_t = tables(spec)
        json.dump(
            {"version": 1, "field": spec.to_dict(), "add": add_t.tolist(), "mul": mul_t.tolist()},
            out,
            indent=2,
        )
        out.write("\n")
    else:
        out.write(f"{spec}\n\n")
        out.write(tables_text(spec))
    return EXIT_OK


def cmd_mub(args, out) -> int:
    d = _check_dim(args.dim)
    fam = family(d, args.tol)
    report = unbiasedness_report(fam, args.tol)
    if args.format == "json":
        data = family_to_json(fam)
        data["unbiasedness"] = report.to_dict()
        json.dump(data, out, indent=2)
        out.write("\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["m", "k", "signature"] + [f"amp{i}" for i in range(d)])
        for b in fam:
            for k, (s, sig) in enumerate(zip(b.states, b.signatures), start=1):
                sig_text = "".join(eigenvalue_symbol(x, fam.p) for x in sig)
                w.writerow([b.m, k, sig_text] + [f"{z.real:.12g}{z.imag:+.12g}j" for z in s])
    else:
        out.write(family_text(fam))
        out.write(
            f"\n{len(fam)} bases in dimension {d}; max | |<a|b>|^2 - 1/{d} | = "
            f"{report.max_deviation:.3e} ({'pass' if report.passed else 'FAIL'})\n"
        )
    return EXIT_OK if report.passed else EXIT_VALIDATION


def cmd_labels(args, out) -> int:
    d = _check_dim(args.dim)
    table = label_table(d, _field_for_dim(d, args.poly))
    check = coincidence_check(table)
    if args.format == "csv":
        out.write(table.csv())
    elif args.format == "json":
        data = table.to_json()
        data["coincidence"] = check.to_dict()
        json.dump(data, out, indent=2)
        out.write("\n")
    else:
        out.write(table.text())
    if args.check_printed and d in fixtures.PRINTED_LABELS:
        cmp = compare_printed(table, fixtures.PRINTED_LABELS[d])
        if not cmp.mismatches:
            print(f"printed table for d={d}: all {len(table)} rows match", file=sys.stderr)
        for row, printed, generated, pos in cmp.mismatches:
            print(
                f"printed row {row + 1} {printed!r} differs from generated {generated!r} "
                f"at positions {pos}",
                file=sys.stderr,
            )
    if not check.passed:
        print(f"coincidence check failed: {check.violations[:5]}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_verify(args, out) -> int:
    d = _check_dim(args.dim)
    try:
        if args.rounds is not None and not args.exhaustive:
            report = sampled_verify(d, args.rounds, args.seed, tol=args.tol)
        else:
            report = exhaustive_verify(d, tol=args.tol)
    except PredictionFailed as exc:
        print(json.dumps(exc.transcript.to_dict(), indent=2), file=sys.stderr)
        return EXIT_PREDICTION
    data = report.to_dict()
    if args.format == "json":
        json.dump(data, out, indent=2)
        out.write("\n")
    elif args.format == "csv":
        keys = ["d", "mode", "branches", "correct", "success_rate", "max_slack", "passed"]
        out.write(",".join(keys) + "\n" + ",".join(str(data[k]) for k in keys) + "\n")
    else:
        unit = "branches" if report.mode == "exhaustive" else "rounds"
        out.write(
            f"d={d} {report.mode}: {report.correct}/{report.branches} {unit} correct "
            f"({100 * report.success_rate:.2f}%), max slack {report.max_slack:.3e}\n"
        )
    return EXIT_OK if report.passed else EXIT_PREDICTION


def _ask_basis(d: int, stdin, out) -> int:
    while True:
        out.write(f"King, choose the basis to measure (0..{d}): ")
        out.flush()
        line = stdin.readline()
        if not line:
            raise InputError("no basis chosen (end of input)")
        try:
            m = int(line.strip())
        except ValueError:
            m = -1
        if 0 <= m <= d:
            return m
        out.write(f"invalid choice {line.strip()!r}; valid range is 0..{d}\n")


def cmd_play(args, out, stdin=None) -> int:
    stdin = stdin or sys.stdin
    d = _check_dim(args.dim)
    proto = build_protocol(d, None, args.tol)
    rng = np.random.default_rng(args.seed)
    fam = proto.family
    out.write(
        f"The physicist prepares an entangled object+ancilla state (d={d}) and hands the "
        f"object to the king.\n"
    )
    m = _ask_basis(d, stdin, out)
    t = run_round(proto, m, rng)
    words = ",".join(w.pretty() for w in fam[m].observables.generators)
    out.write("The king measures his chosen observables and hides the results.\n")
    if args.reveal_early:
        out.write(f"  [debug] king's outcome: state {t.king_outcome} of basis {m}\n")
    out.write(
        f"The physicist's control measurement yields the tracking state "
        f"[{''.join(map(str, t.physicist_labels))}].\n"
    )
    out.write(f"The king reveals that he measured basis {m} ({words}).\n")
    pred = ", ".join(f"{w}={v}" for w, v in t.predicted_eigenvalues)
    actual = ", ".join(f"{w}={v}" for w, v in t.king_eigenvalues)
    out.write(f"Physicist predicts: state {t.predicted_outcome}: {pred}\n")
    out.write(f"King actually found: state {t.king_outcome}: {actual}\n")
    out.write(f"Verdict: {'correct' if t.correct else 'WRONG'}\n")
    return EXIT_OK if t.correct else EXIT_PREDICTION


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "csv", "json"], default="text")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--poly", type=_poly, default=None, metavar="c0,c1,...",
                        help="coefficients c0..c(n-1) of the monic defining polynomial")

    parser = argparse.ArgumentParser(
        prog="meanking",
        description="Mean King's problem in prime power dimensions: field tables, "
        "mutually unbiased bases, label tables and protocol verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", parents=[common], help="GF(p^n) addition/multiplication tables")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("mub", parents=[common], help="mutually unbiased bases and their report")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_mub)

    p = sub.add_parser("labels", parents=[common], help="tracking-state label table")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--check-printed", action="store_true",
                   help="report differences from the published table (stderr)")
    p.set_defaults(func=cmd_labels)

    p = sub.add_parser("verify", parents=[common], help="verify the protocol's predictions")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true", help="check every branch (default)")
    p.add_argument("--rounds", type=int, default=None, help="run N random rounds instead")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("play", parents=[common], help="play one interactive round")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--reveal-early", action="store_true",
                   help="show the king's outcome before the prediction (debugging)")
    p.set_defaults(func=cmd_play)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.out:
        target = open(args.out, "w", encoding="utf-8", newline="")
    else:
        target = contextlib.nullcontext(sys.stdout)
    try:
        with target as out:
            return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PredictionFailed as exc:
        print(json.dumps(exc.transcript.to_dict(), indent=2), file=sys.stderr)
        return EXIT_PREDICTION
    except MeanKingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
