"""Command-line front end.

Every command accepts ``--json``.  Failures print a JSON object on stderr and
exit with status 2.  ``compare`` encodes its verdict in the exit status.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus, pairfile
from .birational import (
    STRATEGIES,
    Verdict,
    assign_by_containment,
    k_compare,
    perform_flip,
    resolve,
    star_subdivision,
    wall_analysis,
)
from .errors import KequivError
from .grothendieck import stringy_invariant
from .mckay import AbelianGroupData, age_spectrum, crepant_rays, junior_count, overlattice_basis, quotient_fan
from .sod import categorical_rank, sod_coefficient_change, sod_divisorial, sod_flip, sod_mori_fiber
from .toric import (
    is_smooth,
    klt_check,
    standard_coefficients_check,
    terminal_check,
    validate_pair,
)

EXIT_CODES = {
    Verdict.EQUIVALENT: 0,
    Verdict.FIRST_GE: 10,
    Verdict.FIRST_LE: 11,
    Verdict.INCOMPARABLE: 12,
}


def _indices(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise KequivError("bad_argument", f"expected comma-separated integers, got {text!r}") from exc


def _matrix(text: str) -> list[list[int]]:
    return [_indices(row) for row in text.split(";") if row.strip()]


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.json or text is None:
        print(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False))
    else:
        print(text)


def _write_pair(args, pair) -> None:
    out = getattr(args, "out", None)
    if out:
        pairfile.dump(pair, out)
    else:
        sys.stdout.write(pairfile.dumps(pair))


# ---------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    pair = pairfile.load(args.pair)
    problems = validate_pair(pair)
    report: dict = {"valid": not problems, "violations": problems}
    if not problems:
        smooth, bad = is_smooth(pair.fan)
        report["smooth"] = smooth
        report["singular_cones"] = [list(c) for c in bad]
        report["klt"] = klt_check(pair)
        if report["klt"]:
            terminal, witnesses = terminal_check(pair)
            report["terminal"] = terminal
            report["terminal_witnesses"] = [
                {"point": list(w.point), "log_discrepancy": str(w.log_discrepancy)} for w in witnesses
            ]
        else:
            report["terminal"] = False
        standard, nonstandard = standard_coefficients_check(pair)
        report["standard"] = standard
        report["nonstandard_rays"] = nonstandard
        lines = ["valid: yes"] + [f"{k}: {'yes' if report[k] else 'no'}" for k in ("smooth", "klt", "terminal", "standard")]
    else:
        lines = ["valid: no"] + [f"  {p}" for p in problems]
    _emit(args, report, "\n".join(lines))
    return 0 if not problems else 1


def cmd_compare(args) -> int:
    a, b = pairfile.load(args.first), pairfile.load(args.second)
    comparison = k_compare(a, b)
    payload = {
        "verdict": comparison.verdict.value,
        "differences": [{"ray": list(v), "difference": str(d)} for v, d in comparison.differences],
    }
    width = max((len(str(list(v))) for v, _ in comparison.differences), default=3)
    lines = [f"verdict: {comparison.verdict.value}", f"{'ray':<{width}}  phi_B - phi_A"]
    lines += [f"{str(list(v)):<{width}}  {d}" for v, d in comparison.differences]
    _emit(args, payload, "\n".join(lines))
    return EXIT_CODES[comparison.verdict]


def cmd_stringy(args) -> int:
    value = stringy_invariant(pairfile.load(args.pair), args.strategy)
    _emit(args, {"class": value.text(), "root": value.root}, value.text())
    return 0


def cmd_blowup(args) -> int:
    pair, _ = star_subdivision(pairfile.load(args.pair), _indices(args.center))
    _write_pair(args, pair)
    return 0


def cmd_resolve(args) -> int:
    pair, _ = resolve(pairfile.load(args.pair), args.strategy)
    _write_pair(args, pair)
    return 0


def cmd_wall(args) -> int:
    report = wall_analysis(pairfile.load(args.pair), _indices(args.wall))
    d = report.to_dict()
    text = f"{d['classification']} {d['k_sign']} (relation {d['relation']} on rays {d['circuit']}, K-degree {d['k_degree']})"
    _emit(args, d, text)
    return 0


def cmd_flip(args) -> int:
    _write_pair(args, perform_flip(pairfile.load(args.pair), _indices(args.wall)))
    return 0


def cmd_sod(args) -> int:
    if args.kind == "divisorial":
        x, y = pairfile.load(args.first), pairfile.load(args.second)
        report = sod_divisorial(x, y, assign_by_containment(x.fan, y.fan))
    elif args.kind == "flip":
        if not args.wall:
            raise KequivError("bad_argument", "sod flip needs --wall")
        report = sod_flip(pairfile.load(args.first), pairfile.load(args.second), _indices(args.wall))
    elif args.kind == "coeff":
        report = sod_coefficient_change(pairfile.load(args.first), pairfile.load(args.second))
    else:
        if args.second is not None:
            raise KequivError("bad_argument", "sod fiber takes one pair and --projection")
        report = sod_mori_fiber(pairfile.load(args.first), _matrix(args.projection or ""))
    d = report.to_dict()
    eq = d["rank_equation"]
    text = f"case {d['case']}: {d['display']}\nranks: {eq['host']} = {eq['embedded']}" + "".join(
        f" + {p}" for p in eq["pieces"]
    )
    _emit(args, d, text)
    return 0


def cmd_rank(args) -> int:
    value = categorical_rank(pairfile.load(args.pair))
    _emit(args, {"rank": value}, str(value))
    return 0


def cmd_mckay(args) -> int:
    orders, weights = args.order or [], args.weights or []
    if len(orders) != len(weights):
        raise KequivError("bad_argument", "give one --weights per --order")
    group = AbelianGroupData(args.dim, tuple((r, tuple(_indices(w))) for r, w in zip(orders, weights)))
    pair = quotient_fan(group)
    if args.out:
        pairfile.dump(pair, args.out)
    ages = age_spectrum(group)
    crepant = crepant_rays(pair)
    payload = {
        "pair": pairfile.to_dict(pair),
        "basis": [[str(x) for x in row] for row in overlattice_basis(group)],
        "order": len(ages),
        "ages": [{"element": [str(x) for x in e.element], "age": str(e.age)} for e in ages],
        "junior_count": junior_count(group),
        "crepant_rays": [list(v) for v in crepant],
    }
    lines = [f"order: {len(ages)}", "element  age"]
    lines += [f"({', '.join(str(x) for x in e.element)})  {e.age}" for e in ages]
    lines += [f"junior count: {payload['junior_count']}", f"crepant rays: {payload['crepant_rays']}"]
    if not args.out:
        lines = [pairfile.dumps(pair).rstrip()] + lines
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_examples(args) -> int:
    x, y = corpus.build(args.name, r=args.r, s=args.s, n=args.n)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        pairfile.dump(x, out / "X.json")
        pairfile.dump(y, out / "Y.json")
        _emit(args, {"written": [str(out / "X.json"), str(out / "Y.json")]}, f"wrote {out / 'X.json'} and {out / 'Y.json'}")
    else:
        print(json.dumps({"X": pairfile.to_dict(x), "Y": pairfile.to_dict(y)}, sort_keys=True, indent=2))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog="kequiv", description="Exact toric K-equivalence toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a pair and report its singularities")
    p.add_argument("pair")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compare", parents=[common], help="K-compare two pairs (exit 0/10/11/12)")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("stringy", parents=[common], help="stringy invariant as a canonical class")
    p.add_argument("pair")
    p.add_argument("--strategy", choices=STRATEGIES, default="min-phi")
    p.set_defaults(func=cmd_stringy)

    p = sub.add_parser("blowup", parents=[common], help="star subdivision along a cone")
    p.add_argument("pair")
    p.add_argument("--center", required=True, help="comma-separated ray indices")
    p.add_argument("--out")
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("resolve", parents=[common], help="toric resolution with pulled-back boundary")
    p.add_argument("pair")
    p.add_argument("--strategy", choices=STRATEGIES, default="min-phi")
    p.add_argument("--out")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("wall", parents=[common], help="circuit relation and classification of a wall")
    p.add_argument("pair")
    p.add_argument("--wall", required=True)
    p.set_defaults(func=cmd_wall)

    p = sub.add_parser("flip", parents=[common], help="flip a wall")
    p.add_argument("pair")
    p.add_argument("--wall", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_flip)

    p = sub.add_parser("sod", parents=[common], help="semi-orthogonal decomposition rank ledger")
    p.add_argument("kind", choices=("divisorial", "flip", "coeff", "fiber"))
    p.add_argument("first")
    p.add_argument("second", nargs="?")
    p.add_argument("--wall")
    p.add_argument("--projection", help="rows separated by ';', entries by ','; empty for a point")
    p.set_defaults(func=cmd_sod)

    p = sub.add_parser("rank", parents=[common], help="categorical rank of the associated stack")
    p.add_argument("pair")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("mckay", parents=[common], help="quotient fan, ages and crepant divisors of C^n/G")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--order", type=int, action="append")
    p.add_argument("--weights", action="append")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mckay)

    p = sub.add_parser("examples", parents=[common], help="write a built-in example pair")
    p.add_argument("name", choices=corpus.NAMES)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--out", help="directory for X.json and Y.json")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("sod",) and args.kind != "fiber" and args.second is None:
        print(json.dumps({"error": "bad_argument", "message": "this report needs two pairs"}), file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except KequivError as exc:
        print(json.dumps(exc.to_dict(), sort_keys=True), file=sys.stderr)
        return 2
    except (ValueError, TypeError) as exc:
        print(json.dumps({"error": "bad_input", "message": str(exc)}, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
