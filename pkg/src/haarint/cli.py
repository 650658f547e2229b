"""Command line front end: ``haarint eval | verify | catalog``.

Exit codes: 0 success, 1 usage or domain error, 2 unsupported diagram,
3 Monte Carlo disagreement beyond 4 standard errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from .diagram import ParseError, parse_monomial
from .exact import (
    ORDER6_SHAPES,
    Classification,
    DimensionTooSmall,
    evaluate,
    f1,
    order6_catalog,
    x_integral,
    z_integral,
)
from .montecarlo import mc_estimate

EXIT_OK, EXIT_USAGE, EXIT_UNSUPPORTED, EXIT_MISMATCH = 0, 1, 2, 3
SIGMA_LIMIT = 4.0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt_decimal(x: float) -> float:
    return float(f"{x:.12g}")


def make_record(monomial, N, value, classification, formula, label=None, mc=None):
    record = {
        "monomial": str(monomial),
        "N": N,
        "exact": None if value is None else f"{value.numerator}/{value.denominator}",
        "decimal": None if value is None else _fmt_decimal(float(value)),
        "classification": classification,
        "formula": formula,
    }
    if label is not None:
        record["label"] = label
    if mc is not None:
        record["mc"] = mc
    return record


def _mc_block(est, value):
    block = {
        "mean": est.mean,
        "stdError": est.std_error,
        "samples": est.samples,
        "seed": est.seed,
        "sigmaDistance": None,
    }
    if value is not None:
        dist = est.sigma_distance(value)
        block["sigmaDistance"] = None if math.isinf(dist) else dist
    return block


def _print_record(record, as_json, out):
    if as_json:
        out.write(json.dumps(record) + "\n")
        return
    rows = [(k, record[k]) for k in ("monomial", "N", "exact", "decimal", "classification", "formula")]
    if record.get("mc"):
        mc = record["mc"]
        rows += [
            ("mc mean", f"{mc['mean']:.12g}"),
            ("mc stdError", f"{mc['stdError']:.6g}"),
            ("mc samples", mc["samples"]),
            ("mc seed", mc["seed"]),
            ("sigmaDistance", "n/a" if mc["sigmaDistance"] is None else f"{mc['sigmaDistance']:.3f}"),
        ]
    for key, val in rows:
        if key == "decimal" and val is not None:
            val = f"{val:.12g}"
        out.write(f"{key:<16}{'-' if val is None else val}\n")


def _evaluate_or_report(text, N):
    try:
        monomial = parse_monomial(text)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n{exc.caret()}\n")
        return None, None
    try:
        return monomial, evaluate(monomial, N)
    except DimensionTooSmall as exc:
        sys.stderr.write(f"dimension error: {exc}\n")
        return None, None


def cmd_eval(args, out) -> int:
    monomial, result = _evaluate_or_report(args.monomial, args.n)
    if result is None:
        return EXIT_USAGE
    record = make_record(
        result.diagram, args.n, result.value, result.classification.value, result.formula
    )
    _print_record(record, args.json, out)
    return EXIT_UNSUPPORTED if result.classification is Classification.UNSUPPORTED else EXIT_OK


def cmd_verify(args, out) -> int:
    monomial, result = _evaluate_or_report(args.monomial, args.n)
    if result is None:
        return EXIT_USAGE
    est = mc_estimate(monomial, args.n, args.samples, args.seed, chunks=args.chunks)
    mc = _mc_block(est, result.value)
    record = make_record(
        result.diagram, args.n, result.value, result.classification.value, result.formula, mc=mc
    )
    _print_record(record, args.json, out)
    if result.classification is Classification.UNSUPPORTED:
        return EXIT_UNSUPPORTED
    return EXIT_OK if est.sigma_distance(result.value) <= SIGMA_LIMIT else EXIT_MISMATCH


def catalog_records(N: int) -> list[dict]:
    if N < 3:
        raise DimensionTooSmall(f"the catalog needs N >= 3, got N={N}")
    records = []
    for m in range(1, 6):
        records.append(
            make_record(f"O(1,1)^{2 * m}", N, f1(2 * m, N), "Fan", "F1(2m) one-vector closed form",
                        label=f"F1({2 * m})")
        )
    for tag, text in ORDER6_SHAPES.items():
        records.append(
            make_record(parse_monomial(text), N, order6_catalog(tag, N), "Order6",
                        f"I({tag}) order-6 closed form", label=f"I({tag})")
        )
    records.append(
        make_record("O(1,1) O(1,2) O(2,1) O(2,2)", N, x_integral(1, 1, 1, 1, N), "Exchange",
                    "X(1,1,1,1) = -F2(2,2)/(N-1)", label="X(1,1,1,1)")
    )
    for m1, m2, m3 in ((2, 0, 2), (2, 2, 2), (4, 2, 2), (2, 4, 2)):
        text = " ".join(
            f"O({i},{j})^{p}" for (i, j), p in (((1, 1), m1), ((1, 2), m2), ((2, 2), m3)) if p
        )
        records.append(
            make_record(text, N, z_integral(m1, m2, m3, N), "Z", "Z recursion",
                        label=f"Z({m1},{m2},{m3})")
        )
    return records


def cmd_catalog(args, out) -> int:
    try:
        records = catalog_records(args.n)
    except DimensionTooSmall as exc:
        sys.stderr.write(f"dimension error: {exc}\n")
        return EXIT_USAGE
    if args.shape:
        wanted = args.shape.lower()
        records = [r for r in records if wanted in r["label"].lower()]
    if args.json:
        for r in records:
            out.write(json.dumps(r) + "\n")
        return EXIT_OK
    width = max((len(r["label"]) for r in records), default=5)
    out.write(f"# N = {args.n}\n")
    for r in records:
        out.write(f"{r['label']:<{width}}  {r['exact']:>22}  {r['decimal']:>20.12g}  {r['monomial']}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="haarint", description="Exact Haar integrals of monomials over O(N).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate a monomial exactly")
    p.add_argument("monomial", help='e.g. "O(1,1)^2 O(1,2)^4"')
    p.add_argument("--n", type=int, required=True, help="matrix dimension N")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="compare the exact value with a Monte Carlo estimate")
    p.add_argument("monomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chunks", type=int, default=1, help="concurrent sampling chunks")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("catalog", help="tabulate the closed-form integrals at one N")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--shape", help="only rows whose label contains this text, e.g. 5a")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if args.n < 1:
        sys.stderr.write("N must be >= 1\n")
        return EXIT_USAGE
    if getattr(args, "samples", 2) < 2:
        sys.stderr.write("--samples must be >= 2\n")
        return EXIT_USAGE
    return args.func(args, out)


if __name__ == "__main__":
    sys.exit(main())
