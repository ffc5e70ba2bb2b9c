"""Command-line front end.

Every command prints one JSON record as its last line (with ``--json`` that
record is the only output).  Exit codes: 0 result found, 1 sound negative
answer, 2 input error, 3 gave up (not applicable / oracle exhausted /
stuck), 4 search refused as too large.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Sequence

from . import __version__
from .bounds import BoundState, Certificate, PRIME_CLASSES, QuadBase, best_bound, certificate_replay
from .construct import cubic_step_p2mod3, cubic_step_p3, quartic_zero_q2
from .errors import FormatError, InvalidPrime, IsZero, NoRuleAvailable, NotApplicable, OracleExhausted, PadicError, PrecisionExhausted
from .forms import directional_expand, evaluate, load_form, load_vectors, parse_vector
from .hensel import lift_form_point
from .zerosearch import SearchBudget, anisotropy_witness, find_zero

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_GAVE_UP, EXIT_REFUSED = 0, 1, 2, 3, 4
DEFAULT_SEED = 20240229


class _InputError(Exception):
    pass


def _emit(args, record: dict, summary: str | None = None) -> None:
    if summary and not args.json:
        print(summary)
    print(json.dumps(record, sort_keys=True))


def _budget(args) -> SearchBudget:
    return SearchBudget(k=args.k, max_candidates=args.max_candidates, parallel_width=args.jobs)


def _read_form(path):
    try:
        return load_form(path)
    except OSError as exc:
        raise _InputError(str(exc)) from exc


def cmd_solve(args) -> int:
    F = _read_form(args.form)
    extra = [_read_form(p) for p in args.also]
    out = find_zero([F] + extra, _budget(args), target_prec=args.target_prec)
    rec = {"command": "solve", **out.to_record()}
    if out.found:
        rec["witness_int"] = list(out.witness.to_ints(balanced=True))
        _emit(args, rec, f"zero found: {tuple(rec['witness_int'])} (residue {out.residue} mod {F.p}^{out.k})")
        return EXIT_OK
    if out.status == "refused_too_large":
        _emit(args, rec, "search refused: candidate count exceeds --max-candidates")
        return EXIT_REFUSED
    _emit(args, rec, f"no liftable primitive zero mod {F.p}^{out.k}")
    return EXIT_NO


def cmd_lift(args) -> int:
    F = _read_form(args.form)
    v = parse_vector(args.point, F.p)
    if v.n != F.n:
        raise _InputError(f"point has {v.n} coordinates, form has {F.n} variables")
    report, w = lift_form_point(F, v, args.target_prec)
    rec = {"command": "lift", **report.to_record()}
    if not report.applicable:
        _emit(args, rec, "lifting hypotheses fail at this point")
        return EXIT_GAVE_UP
    rec["value_valuation"] = _v(evaluate(F, w).valuation())
    _emit(args, rec, f"{report.branch}: lifted to precision {report.precision}")
    return EXIT_OK


def _v(x):
    return "inf" if x == float("inf") else x


def cmd_levels(args) -> int:
    F = _read_form(args.form)
    try:
        vectors = load_vectors(args.vectors, F.p)
    except OSError as exc:
        raise _InputError(str(exc)) from exc
    rows = []
    for v in vectors:
        if v.n != F.n:
            raise _InputError(f"vector {v} has the wrong length")
        value = evaluate(F, v)
        row = {"vector": v.tokens(), "value": value.token()}
        if value.is_zero:
            row["level"] = None
            row["zero"] = True
        else:
            row["level"] = value.val % F.d
            row["valuation"] = value.val
        rows.append(row)
    _emit(args, {"command": "levels", "degree": F.d, "rows": rows},
          "\n".join(f"{r['vector']} level {r['level']}" for r in rows))
    return EXIT_OK


def cmd_expand(args) -> int:
    F = _read_form(args.form)
    try:
        basis = load_vectors(args.basis, F.p) if args.basis else []
    except OSError as exc:
        raise _InputError(str(exc)) from exc
    e = parse_vector(args.dir, F.p)
    if any(b.n != F.n for b in basis) or e.n != F.n:
        raise _InputError("basis and direction must have the form's number of variables")
    exp = directional_expand(F, basis, e)
    slots = [
        {"x": list(d), "t": j, "coeff": c.token(), "valuation": _v(c.valuation())}
        for (d, j), c in sorted(exp.slots.items(), key=lambda s: (s[0][1], s[0][0]))
    ]
    _emit(args, {"command": "expand", "degree": F.d, "basis_size": len(basis), "slots": slots},
          "\n".join(f"x^{s['x']} t^{s['t']}: {s['coeff']}" for s in slots))
    return EXIT_OK


def cmd_anisotropy(args) -> int:
    F = _read_form(args.form)
    out = anisotropy_witness(F, args.k, _budget(args))
    rec = {"command": "anisotropy", **out.to_record()}
    if out.status == "refused_too_large":
        _emit(args, rec, "refused: a variable block is too large to tabulate")
        return EXIT_REFUSED
    if out.certified:
        vals = sorted({v for b in out.blocks for v in b.primitive_values()})
        _emit(args, rec, f"no primitive zero mod {out.modulus}; primitive block values {vals}")
        return EXIT_NO
    _emit(args, rec, f"primitive zero mod {out.modulus}: {out.witness}")
    return EXIT_OK


def _load_base(path):
    if not path:
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            return QuadBase.from_record(json.load(fh))
    except (OSError, ValueError, AttributeError) as exc:
        raise _InputError(f"bad base table: {exc}") from exc


def cmd_bounds(args) -> int:
    state = BoundState(args.r3, args.r2, args.r1, args.prime_class)
    value, cert = best_bound(state, _load_base(args.base))
    rec = {"command": "bounds", "bound": value, "certificate": cert.to_json()}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(cert.dumps() + "\n")
    _emit(args, rec, f"{state} <= {value} via {' -> '.join(cert.rules() + ['quad_base'])}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.cert, encoding="utf-8") as fh:
            cert = Certificate.loads(fh.read())
    except OSError as exc:
        raise _InputError(str(exc)) from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise _InputError(f"malformed certificate: {exc}") from exc
    ok = certificate_replay(cert)
    _emit(args, {"command": "verify", "valid": ok, "bound": cert.bound},
          "certificate replays" if ok else "certificate does NOT replay")
    return EXIT_OK if ok else EXIT_NO


def cmd_construct(args) -> int:
    F = _read_form(args.form)
    G = [_read_form(p) for p in args.also]
    budget = SearchBudget(k=args.k, max_candidates=args.max_candidates, parallel_width=args.jobs)
    drivers = {"quartic-q2": quartic_zero_q2, "cubic-p2mod3": cubic_step_p2mod3, "cubic-p3": cubic_step_p3}
    if args.driver == "quartic-q2":
        if G:
            raise _InputError("the quartic driver takes a single form")
        out = quartic_zero_q2(F, budget, target_prec=args.target_prec)
    else:
        out = drivers[args.driver](F, G, budget, target_prec=args.target_prec)
    rec = {"command": "construct", "driver": args.driver, **out.to_record()}
    if out.is_zero:
        shown = tuple(rec["witness_int"]) if rec.get("witness_int") else out.witness
        _emit(args, rec, f"zero: {shown} (precision {out.precision})\ntrace: {' > '.join(out.trace)}")
        return EXIT_OK
    _emit(args, rec, f"stuck: {out.reason}\ntrace: {' > '.join(out.trace)}")
    return EXIT_GAVE_UP


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padicforms", description="p-adic zeros of forms: search, lifting, constructions and bounds.")
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print only the JSON record")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--jobs", type=int, default=1, help="parallel search width")
    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--k", type=int, default=4, help="search modulo p^k")
    search.add_argument("--max-candidates", type=int, default=1 << 24)
    search.add_argument("--target-prec", type=int, default=32)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common, search], help="find a liftable common zero")
    p.add_argument("form")
    p.add_argument("--also", nargs="*", default=[], help="further forms of the system")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("lift", parents=[common], help="Hensel-lift a near-zero")
    p.add_argument("form")
    p.add_argument("--point", required=True)
    p.add_argument("--target-prec", type=int, default=32)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("levels", parents=[common], help="levels of vectors")
    p.add_argument("form")
    p.add_argument("--vectors", required=True)
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("expand", parents=[common], help="directional expansion coefficients")
    p.add_argument("form")
    p.add_argument("--basis")
    p.add_argument("--dir", required=True)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("anisotropy", parents=[common], help="certify absence of primitive zeros mod p^k")
    p.add_argument("form")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--max-candidates", type=int, default=1 << 24)
    p.set_defaults(func=cmd_anisotropy)

    p = sub.add_parser("bounds", parents=[common], help="best bound for V(r3,r2,r1;p)")
    p.add_argument("--r3", type=int, required=True)
    p.add_argument("--r2", type=int, default=0)
    p.add_argument("--r1", type=int, default=0)
    p.add_argument("--prime-class", choices=PRIME_CLASSES, default="any")
    p.add_argument("--base", help="JSON base table for the quadratic bound")
    p.add_argument("--out", help="write the certificate to this file")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", parents=[common], help="replay a bounds certificate")
    p.add_argument("cert")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", parents=[common, search], help="run a constructive driver")
    p.add_argument("form")
    p.add_argument("--driver", required=True, choices=["quartic-q2", "cubic-p2mod3", "cubic-p3"])
    p.add_argument("--also", nargs="*", default=[], help="lower-degree forms for the cubic drivers")
    p.set_defaults(func=cmd_construct, k=2, max_candidates=1 << 20)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    random.seed(args.seed)
    try:
        return args.func(args)
    except (_InputError, FormatError) as exc:
        print(json.dumps({"command": args.command, "error": "input", "message": str(exc)}))
        return EXIT_INPUT
    except (NotApplicable, OracleExhausted, NoRuleAvailable, PrecisionExhausted, IsZero) as exc:
        print(json.dumps({"command": args.command, "error": type(exc).__name__, "message": str(exc)}))
        return EXIT_GAVE_UP
    except InvalidPrime as exc:
        print(json.dumps({"command": args.command, "error": "InvalidPrime", "message": str(exc)}))
        return EXIT_INPUT
    except PadicError as exc:
        print(json.dumps({"command": args.command, "error": type(exc).__name__, "message": str(exc)}))
        return EXIT_GAVE_UP


if __name__ == "__main__":
    sys.exit(main())
