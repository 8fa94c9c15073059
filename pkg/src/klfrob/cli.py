"""Command-line entry point: one subcommand per operation family plus ``verify-all``.

Exit codes: 0 when every assertion holds, 1 when one fails (a counterexample
file is written), 2 for usage errors.  Reports are JSON (default) or CSV and
always record the invocation and the library version.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from . import finite_field as ff

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not ff.is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _field(args) -> ff.FieldDesc:
    """The field F_q from --q or from --p and --s."""
    if getattr(args, "q", None) is not None:
        fac = ff.prime_factors(args.q)
        if len(fac) != 1:
            raise UsageError(f"q = {args.q} is not a prime power")
        p = fac[0]
        s, t = 0, 1
        while t < args.q:
            t *= p
            s += 1
        return ff.make_field(p, s)
    if args.p is None:
        raise UsageError("give --p (and optionally --s) or --q")
    return ff.make_field(args.p, args.s)


def _a_values(text: str, field: ff.FieldDesc) -> list[int]:
    """'all', a single code, a comma list or a range 'lo-hi' of nonzero element codes."""
    if text == "all":
        return list(range(1, field.q))
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    for a in out:
        if not 0 < a < field.q:
            raise UsageError(f"a = {a} is not a nonzero element code of F_{field.q}")
    return out


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--out", type=Path, help="report file (stdout when omitted)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--workers", type=_positive, default=1)
    sp.add_argument("--counterexample", type=Path,
                    help="where to write the counterexample on failure")


def _add_field(sp: argparse.ArgumentParser, with_q: bool = True) -> None:
    sp.add_argument("--p", type=_prime)
    sp.add_argument("--s", type=_positive, default=1)
    if with_q:
        sp.add_argument("--q", type=_positive)


# ---------------------------------------------------------------------------
# subcommands; each returns (passed, result dict, csv rows, counterexample)


def _cyc_json(c) -> dict:
    z = c.complex_embed(1)
    return {"coeffs": list(c.coeffs), "m": c.m, "complex": [round(z.real, 12), round(z.imag, 12)]}


def cmd_kloosterman(args):
    from .expsums import kloosterman_normalized, kloosterman_raw

    field = _field(args)
    rows = [["a", "coeffs", "re", "im", "normalized_re", "normalized_im"]]
    res = []
    for a in _a_values(args.a, field):
        raw = kloosterman_raw(field, args.n, a, workers=args.workers)
        norm = kloosterman_normalized(field, args.n, a).complex_value(1)
        j = _cyc_json(raw)
        res.append({"a": ff.to_coeffs(field, a), "sum": j,
                    "normalized": [round(norm.real, 12), round(norm.imag, 12)]})
        rows.append([a, " ".join(map(str, raw.coeffs)), *j["complex"],
                     round(norm.real, 12), round(norm.imag, 12)])
    return True, {"q": field.q, "n": args.n, "values": res}, rows, None


def cmd_gauss(args):
    from .expsums import AdditiveChar, QuadChar, gauss_sum

    field = _field(args)
    if field.p == 2:
        raise UsageError("the quadratic Gauss sum needs odd q")
    g = gauss_sum(AdditiveChar(field, args.b), QuadChar(field))
    sq = g * g
    j = _cyc_json(g)
    return True, {"q": field.q, "b": args.b, "gauss": j, "square": _cyc_json(sq)}, \
        [["q", "coeffs", "re", "im"], [field.q, " ".join(map(str, g.coeffs)), *j["complex"]]], None


def cmd_hyp(args):
    from .expsums import hyp_sum

    field = _field(args)
    if field.p == 2:
        raise UsageError("hypergeometric sums with the quadratic character need odd q")
    rows = [["a", "coeffs", "re", "im"]]
    res = []
    for a in _a_values(args.a, field):
        h = hyp_sum(field, args.n, args.m, a)
        j = _cyc_json(h)
        res.append({"a": ff.to_coeffs(field, a), "sum": j})
        rows.append([a, " ".join(map(str, h.coeffs)), *j["complex"]])
    return True, {"q": field.q, "n": args.n, "m": args.m, "values": res}, rows, None


def cmd_so_sum(args):
    from .expsums import so2n1_sum, so2n_quadric_sum, so2n_toric_sum

    field = _field(args)
    rows = [["a", "model", "k", "coeffs", "re", "im"]]
    res = []
    for a in _a_values(args.a, field):
        if args.model == "odd":
            val = so2n1_sum(field, args.n, a)
        elif args.model == "quadric":
            val = so2n_quadric_sum(field, args.n, a)
        else:
            if args.n < 3:
                raise UsageError("the toric even model needs n >= 3")
            val = so2n_toric_sum(field, args.n, a)
        z = val.complex_value(1)
        res.append({"a": ff.to_coeffs(field, a), "scaled": val.to_json(),
                    "complex": [round(z.real, 12), round(z.imag, 12)]})
        rows.append([a, args.model, val.k, " ".join(map(str, val.num.coeffs)),
                     round(z.real, 12), round(z.imag, 12)])
    return True, {"q": field.q, "n": args.n, "model": args.model, "values": res}, rows, None


def cmd_verify_identity(args):
    from .expsums import IDENTITIES, verify_identity

    if args.name not in IDENTITIES:
        raise UsageError(f"unknown identity {args.name!r}; choose from {', '.join(IDENTITIES)}")
    if args.p is None:
        raise UsageError("--p is required")
    srange = range(args.smin, args.smax + 1)
    try:
        rep = verify_identity(args.name, args.p, srange, args.n)
    except ValueError as exc:
        raise UsageError(str(exc))
    rows = [["identity", "q", "a", "pass"]] + [[r.identity, args.p**r.s, " ".join(map(str, r.a)), int(r.passed)]
                                               for r in rep.rows]
    bad = rep.failures()
    return rep.passed, rep.to_json(), rows, (bad[0].to_json() if bad else None)


def _spec(args):
    from .frobenius import connection_preset

    label = {"gl": "GLn", "so": "SO2n1", "hyp": "scalar-hypergeometric"}[args.group]
    try:
        return connection_preset(label, args.n, args.p)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_frobenius_solve(args):
    from .frobenius import frobenius_at_point, solve_frobenius

    spec = _spec(args)
    fs = solve_frobenius(spec, args.M, args.D)
    summary = fs.summary()
    points = []
    if spec.label in ("GLn", "SO2n1"):
        points = [frobenius_at_point(fs, a).to_json() for a in range(1, args.p)]
    ok = fs.residual_zero and min(fs.coeff_valuations) >= 0
    rows = [["degree", "min_valuation"]] + [[k, v] for k, v in enumerate(fs.coeff_valuations)]
    cex = None if ok else {"residual_zero": fs.residual_zero,
                           "min_coefficient_valuation": min(fs.coeff_valuations)}
    return ok, {**summary, "points": points}, rows, cex


def cmd_frobenius_trace_check(args):
    from .frobenius import solve_frobenius, trace_check

    spec = _spec(args)
    if spec.label not in ("GLn", "SO2n1"):
        raise UsageError("trace checks are available for the gl and so groups")
    fs = solve_frobenius(spec, args.M, args.D)
    rows_ = trace_check(fs, args.required)
    ok = all(r.passed for r in rows_) and fs.residual_zero
    rows = [["a", "precision", "agreement", "pass"]] + [[r.a, r.precision, r.agreement, int(r.passed)]
                                                       for r in rows_]
    bad = [r.to_json() for r in rows_ if not r.passed]
    return ok, {"spec": spec.to_json(), "M": args.M, "D": args.D, "residual_zero": fs.residual_zero,
                "rows": [r.to_json() for r in rows_]}, rows, (bad[0] if bad else None)


def _family(args):
    from .dwork import bessel_sequence, so_sequence

    F, G = bessel_sequence(args.n), so_sequence(args.n)
    return {"bessel": [F], "so": [G], "mixed": [F, G]}[args.family]


def cmd_dwork_congruence(args):
    from .dwork import check_conditions, congruence_theorem_check, ratio_integrality

    if args.p != 2:
        raise UsageError("the coefficient families are defined at p = 2")
    seqs = _family(args)
    cond = check_conditions(seqs, 2, args.R, args.smax, n_range=args.n_range)
    thm = congruence_theorem_check(seqs, 2, args.theorem_smax, args.m_max)
    required = ["a", "b", "d", "e", "c'"] + (["c"] if args.family == "so" else [])
    ok = all(cond.results[k] for k in required) and thm.passed
    result = {"conditions": cond.to_json(), "required": required, "product_congruence": thm.to_json()}
    if args.ratio_degree:
        ratio = ratio_integrality(*_family(argparse.Namespace(family="mixed", n=args.n)), 2, args.ratio_degree)
        ratio.pop("valuations")
        result["ratio"] = ratio
        ok &= ratio["pass"]
    rows = cond.csv_rows() + [["product_congruence", int(thm.passed), len(thm.rows)]]
    cex = None
    if not ok:
        cex = (cond.counterexamples[:1] or [r for r in thm.rows if not r["pass"]][:1] or [{}])[0]
    return ok, result, rows, cex


def cmd_unit_root(args):
    from .dwork import unit_root_crosscheck

    spec = _spec(args)
    if spec.label not in ("GLn", "SO2n1") or args.p != 2:
        raise UsageError("the unit-root crosscheck supports gl and so at p = 2")
    a_field = ff.make_field(args.p, 1)
    rows = [["a", "modulus", "f_value", "from_sums", "from_solver", "pass"]]
    res = []
    ok = True
    for a in _a_values(args.a, a_field):
        r = unit_root_crosscheck(spec, a, args.smax, args.M, args.D)
        res.append(r)
        ok &= r["pass"]
        rows.append([a, r["modulus"], r["f_value"], r["unit_root_from_sums"],
                     r["unit_root_from_solver"], int(r["pass"])])
    bad = [r for r in res if not r["pass"]]
    return ok, {"rows": res}, rows, (bad[0] if bad else None)


def _poly_rows(poly):
    return [{"degree": i, "coeffs": list(c.coeffs)} for i, c in enumerate(poly)]


def cmd_lpoly(args):
    from .lfunction import (f_d_power_sums, frobenius_charpoly, hyp_power_sums,
                            charpoly_from_power_sums, lpoly_from_sums, newton_polygon)

    field = _field(args)
    rows = [["a", "degree", "coeffs"]]
    res = []
    for a in _a_values(args.a, field):
        if args.family == "f_d":
            if (field.p - 1) % args.d:
                raise UsageError("need d | p - 1")
            deg = args.d * (2 * args.n + 1)
            poly = lpoly_from_sums(f_d_power_sums(field, args.n, args.d, a, deg + args.extra_sums,
                                                  workers=args.workers), deg)
            kind = "lpoly"
        elif args.family == "hyp":
            if field.p == 2:
                raise UsageError("hyp needs odd p")
            r = 2 * args.n + 1
            poly = charpoly_from_power_sums(hyp_power_sums(field, args.n, a, r), r)
            kind = "charpoly"
        else:
            poly = frobenius_charpoly(args.family, args.n, field, a)
            kind = "charpoly"
        np_ = newton_polygon(poly, field.s, kind)
        res.append({"a": ff.to_coeffs(field, a), "kind": kind, "poly": _poly_rows(poly),
                    "newton": np_.to_json()})
        for i, c in enumerate(poly):
            rows.append([a, i, " ".join(map(str, c.coeffs))])
    return True, {"family": args.family, "q": field.q, "n": args.n, "values": res}, rows, None


def cmd_newton_polygon(args):
    from .lfunction import ordinarity_check

    field = _field(args)
    if args.family == "f_d" and (field.p - 1) % args.d:
        raise UsageError("need d | p - 1")
    if args.family == "hyp" and field.p == 2:
        raise UsageError("hyp needs odd p")
    try:
        out = ordinarity_check(args.family, field.p, field.s, args.n, args.d,
                               _a_values(args.a, field), workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc))
    rows = [["a", "slopes", "hodge", "ordinary"]]
    for r in out:
        rows.append([" ".join(map(str, r.a)), " ".join(map(str, r.newton)),
                     " ".join(map(str, r.hodge)), int(r.ordinary)])
    ok = all(r.ordinary for r in out)
    bad = [r.to_json() for r in out if not r.ordinary]
    return ok, {"family": args.family, "q": field.q, "n": args.n, "rows": [r.to_json() for r in out]}, \
        rows, (bad[0] if bad else None)


def cmd_verify_all(args):
    from .acceptance import CRITERIA, mutation_check, run_all

    numbers = sorted(CRITERIA)
    if args.criteria:
        try:
            numbers = sorted({int(x) for x in args.criteria.split(",")})
        except ValueError:
            raise UsageError("--criteria takes a comma list of numbers")
        if not set(numbers) <= set(CRITERIA):
            raise UsageError(f"criteria are numbered 1..{len(CRITERIA)}")
    echo = (lambda line: print(line, file=sys.stderr))
    results = run_all(args.profile, numbers, echo=echo)
    detected, mut_cex = mutation_check()
    echo(f"mutation check {'PASS' if detected else 'FAIL'}: shifted additive character is detected")
    ok = all(r.ok for r in results) and detected
    rows = [["criterion", "pass", "runtime_s", "budget_s"]] + [
        [r.number, int(r.ok), round(r.runtime, 3), r.budget] for r in results]
    bad = [r.to_json() for r in results if not r.ok]
    return ok, {"profile": args.profile, "criteria": [r.to_json() for r in results],
                "mutation_check": {"detected": detected, "counterexample": mut_cex}}, rows, \
        (bad[0] if bad else None)


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="klfrob", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("kloosterman", help="S_n(a) over F_q")
    _add_field(sp)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--a", default="all")
    _add_common(sp)
    sp.set_defaults(func=cmd_kloosterman)

    sp = sub.add_parser("gauss", help="quadratic Gauss sum")
    _add_field(sp)
    sp.add_argument("--b", type=_positive, default=1)
    _add_common(sp)
    sp.set_defaults(func=cmd_gauss)

    sp = sub.add_parser("hyp", help="hypergeometric sum with the quadratic character")
    _add_field(sp)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--m", type=_positive, default=1)
    sp.add_argument("--a", default="all")
    _add_common(sp)
    sp.set_defaults(func=cmd_hyp)

    sp = sub.add_parser("so-sum", help="orthogonal-group exponential sums")
    _add_field(sp)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--model", choices=("odd", "quadric", "toric"), default="odd")
    sp.add_argument("--a", default="all")
    _add_common(sp)
    sp.set_defaults(func=cmd_so_sum)

    sp = sub.add_parser("verify-identity", help="check a named identity at every a")
    sp.add_argument("name")
    sp.add_argument("--p", type=_prime)
    sp.add_argument("--smin", type=_positive, default=1)
    sp.add_argument("--smax", type=_positive, default=1)
    sp.add_argument("--n", type=_positive, default=1)
    _add_common(sp)
    sp.set_defaults(func=cmd_verify_identity)

    for name, func, help_ in (("frobenius-solve", cmd_frobenius_solve, "solve for the Frobenius matrix"),
                              ("frobenius-trace-check", cmd_frobenius_trace_check,
                               "compare Frobenius traces with exponential sums")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--group", choices=("gl", "so", "hyp"), required=True)
        sp.add_argument("--n", type=_positive, required=True)
        sp.add_argument("--p", type=_prime, required=True)
        sp.add_argument("--M", type=_positive, default=24)
        sp.add_argument("--D", type=_positive, default=64)
        if name == "frobenius-trace-check":
            sp.add_argument("--required", type=_positive, default=16)
        _add_common(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("dwork-congruence", help="Dwork conditions and the product congruence")
    sp.add_argument("--family", choices=("bessel", "so", "mixed"), required=True)
    sp.add_argument("--n", type=_positive, default=1)
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--R", type=_positive, default=256)
    sp.add_argument("--smax", type=_nonneg, default=7)
    sp.add_argument("--theorem-smax", type=_nonneg, default=5)
    sp.add_argument("--m-max", type=_nonneg, default=3)
    sp.add_argument("--n-range", choices=("all", "dwork"), default="all")
    sp.add_argument("--ratio-degree", type=_nonneg, default=0,
                    help="also check the Bessel/SO quotient to this degree")
    _add_common(sp)
    sp.set_defaults(func=cmd_dwork_congruence)

    sp = sub.add_parser("unit-root", help="unit root of Frobenius against the Dwork limit")
    sp.add_argument("--group", choices=("gl", "so"), required=True)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--p", type=_prime, default=2)
    sp.add_argument("--a", default="1")
    sp.add_argument("--smax", type=_positive, default=7)
    sp.add_argument("--M", type=_positive, default=24)
    sp.add_argument("--D", type=_positive, default=64)
    _add_common(sp)
    sp.set_defaults(func=cmd_unit_root)

    for name, func, help_ in (("lpoly", cmd_lpoly, "L-polynomial or Frobenius characteristic polynomial"),
                              ("newton-polygon", cmd_newton_polygon, "Newton slopes against Hodge slopes")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--family", choices=("kl", "so", "f_d", "hyp"), required=True)
        _add_field(sp)
        sp.add_argument("--n", type=_positive, default=1)
        sp.add_argument("--d", type=_positive, default=1)
        sp.add_argument("--a", default="all")
        if name == "lpoly":
            sp.add_argument("--extra-sums", type=_nonneg, default=0)
        _add_common(sp)
        sp.set_defaults(func=func)

    sp = sub.add_parser("verify-all", help="run the acceptance suite")
    sp.add_argument("--profile", choices=("quick", "full"), default="quick")
    sp.add_argument("--criteria", help="comma list of criterion numbers")
    _add_common(sp)
    sp.set_defaults(func=cmd_verify_all)
    return ap


def _default(o):
    from fractions import Fraction

    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, float):
        return repr(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _sanitize(o):
    """Make floats JSON-safe (infinities become strings)."""
    if isinstance(o, float) and (o != o or o in (float("inf"), float("-inf"))):
        return str(o)
    if isinstance(o, dict):
        return {str(k): _sanitize(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_sanitize(v) for v in o]
    return o


def render(report: dict, rows: list[list], fmt: str, argv: Sequence[str]) -> str:
    if fmt == "json":
        return json.dumps(_sanitize(report), indent=2, sort_keys=True, default=_default) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["# invocation", "klfrob " + " ".join(argv), "version", __version__])
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        ok, result, rows, cex = args.func(args)
    except UsageError as exc:
        print(f"klfrob {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"invocation": ["klfrob", *argv], "version": __version__, "command": args.command,
              "pass": bool(ok), "result": result}
    text = render(report, rows, args.format, argv)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    if not ok:
        path = args.counterexample
        if path is None:
            path = (args.out.with_suffix(".counterexample.json") if args.out is not None
                    else Path(f"{args.command}.counterexample.json"))
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(_sanitize({"invocation": ["klfrob", *argv], "version": __version__,
                                              "counterexample": cex}),
                                   indent=2, sort_keys=True, default=_default) + "\n")
        print(f"klfrob {args.command}: assertion failed; counterexample written to {path}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
