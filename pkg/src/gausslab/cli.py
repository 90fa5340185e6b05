"""Command-line surface: field construction, sums, reports, verification.

Subcommands: field | gauss | kloosterman | moments | verify | gl2.  The
base field is always given as (p, m) with q = p^m; character sums live on
the tower field F_{q^d}.  Output is a JSON envelope (schema "gausslab/1")
or CSV rows with '#'-prefixed metadata lines; CSV output carries no
timestamp so identical configurations produce identical bytes.

Exit codes: 0 all checks passed, 1 a verification suite failed, 2 usage or
guard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .chars import (
    AddChar,
    Family,
    enumerate_family,
    is_square_in_c0,
    mult_char,
    square_criterion_epsilon,
)
from .equidist import Target, moment_report
from .expsum import (
    WORK_GUARD,
    c0_moment_identity,
    check_deligne_bound,
    check_hasse_davenport,
    check_parseval,
    check_recurrence,
    closed_form_diff,
    closed_form_even,
    closed_form_sum,
    cross_method_check,
    gauss_batch_residual,
    gauss_records,
    kloosterman_direct,
    kloosterman_table,
    moment_identity,
)
from .ffield import SIZE_GUARD, GuardError, build_field, subfield_view
from .gl2gauss import conj_classes, verify_kondo

SUITES = [
    "counts",
    "orthogonality",
    "recurrence",
    "closed-forms",
    "deligne",
    "parseval",
    "hasse-davenport",
    "fourier-identities",
    "epsilon-square",
    "kondo",
    "all",
]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gausslab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, required=True, help="characteristic (prime)")
    common.add_argument("--m", type=int, default=1, help="base degree, q = p^m")
    common.add_argument("--d", type=int, default=1, help="tower degree over the base")
    common.add_argument("--n-max", type=int, default=3, dest="n_max")
    common.add_argument("--family", choices=[f.value for f in Family], default=None)
    common.add_argument("--method", choices=["direct", "convolution", "inversion", "all"],
                        default="convolution")
    common.add_argument("--target", choices=[t.value for t in Target], default="haar")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--cache-dir", default=None, dest="cache_dir")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--psi-twist", type=int, default=1, dest="psi_twist",
                        help="element code t; psi(x) becomes psi(t x)")
    common.add_argument("--max-work", type=int, default=WORK_GUARD, dest="max_work")
    common.add_argument("--max-size", type=int, default=SIZE_GUARD, dest="max_size")

    sub.add_parser("field", parents=[common], help="print field parameters")
    sub.add_parser("gauss", parents=[common], help="Gauss sums for a family")
    kl = sub.add_parser("kloosterman", parents=[common], help="Kloosterman table")
    kl.add_argument("--n", type=int, default=2)
    sub.add_parser("moments", parents=[common], help="moment reports for a family")
    ver = sub.add_parser("verify", parents=[common], help="run verification suites")
    ver.add_argument("--suite", choices=SUITES, default="all")
    sub.add_parser("gl2", parents=[common], help="GL2 classes and matrix Gauss sums")
    return parser


def _resolve_cache(args) -> str | None:
    return args.cache_dir or os.environ.get("GAUSSLAB_CACHE")


def _make_context(args):
    if args.m < 1 or args.d < 1:
        raise ValueError("degrees must be positive")
    field = build_field(args.p, args.m * args.d, cache_dir=_resolve_cache(args),
                        max_size=args.max_size)
    view = subfield_view(field, args.d)
    code = args.psi_twist
    if not 1 <= code < field.q:
        raise ValueError(f"psi twist code {code} outside 1..{field.q - 1}")
    psi = AddChar(field, field.log_of(code))
    return field, view, psi


def _envelope(command: str, args, field, rows, summary) -> dict:
    return {
        "schema": "gausslab/1",
        "version": __version__,
        "command": command,
        "config": {
            "p": args.p,
            "m": args.m,
            "d": args.d,
            "n_max": args.n_max,
            "family": args.family,
            "method": args.method,
            "target": args.target,
            "tol": args.tol,
            "threads": args.threads,
            "psi_twist": args.psi_twist,
        },
        "field": None if field is None else {
            "p": field.p,
            "m": field.m,
            "size": field.q,
            "modulus": list(field.params.modulus),
            "generator": field.generator,
        },
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "rows": rows,
        "summary": summary,
    }


def _family(args, default: Family = Family.ALL_NONTRIVIAL) -> Family:
    return Family(args.family) if args.family else default


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_field(args) -> dict:
    field, view, _ = _make_context(args)
    rows = [{
        "p": field.p,
        "m": field.m,
        "size": field.q,
        "modulus": field.poly_str(sum(c * field.p**i for i, c in enumerate(field.params.modulus))),
        "generator_code": field.generator,
        "generator_poly": field.poly_str(field.generator),
        "base_size": view.base_size,
        "stride": view.stride,
    }]
    return _envelope("field", args, field, rows, {"ok": True})


def _cmd_gauss(args) -> dict:
    field, view, psi = _make_context(args)
    js = enumerate_family(view, _family(args))
    rows = []
    for rec in gauss_records(view, js, psi):
        rows.append({
            "j": rec.j,
            "re": rec.value.real,
            "im": rec.value.imag,
            "angle": float(np.angle(rec.value)),
            "primitive": rec.primitive,
            "trivial_central": rec.trivial_central,
            "square_in_c0": rec.square_in_c0,
        })
    return _envelope("gauss", args, field, rows, {"ok": True, "count": len(rows)})


def _cmd_kloosterman(args) -> dict:
    field, _, psi = _make_context(args)
    n = args.n
    methods = ["direct", "convolution", "inversion"] if args.method == "all" else [args.method]
    tables = {m: kloosterman_table(field, n, m, psi, args.max_work) for m in methods}
    first = tables[methods[0]]
    rows = [{
        "a_log": k,
        "a_code": field.code_of(k),
        "re": float(first.values[k].real),
        "im": float(first.values[k].imag),
    } for k in range(field.order)]
    summary: dict = {"ok": True, "n": n, "method": ",".join(methods)}
    if len(tables) > 1:
        dev = 0.0
        vals = list(tables.values())
        for i in range(len(vals)):
            for k in range(i + 1, len(vals)):
                dev = max(dev, float(np.max(np.abs(vals[i].values - vals[k].values))))
        summary["cross_max_deviation"] = dev
        summary["ok"] = dev < args.tol * field.q ** (n / 2)
    return _envelope("kloosterman", args, field, rows, summary)


def _cmd_moments(args) -> dict:
    field, view, psi = _make_context(args)
    reports = moment_report(view, _family(args), args.n_max, Target(args.target), psi)
    rows = []
    for rep in reports:
        rows.append({
            "n": rep.n,
            "empirical_re": rep.empirical.real,
            "empirical_im": rep.empirical.imag,
            "target_re": rep.target.real,
            "target_im": rep.target.imag,
            "exact_re": None if rep.exact_prediction is None else rep.exact_prediction.real,
            "exact_im": None if rep.exact_prediction is None else rep.exact_prediction.imag,
            "deviation": rep.deviation,
        })
    return _envelope("moments", args, field, rows, {"ok": True, "count": len(rows)})


def _cmd_gl2(args) -> dict:
    args.d = 2
    field, view, _ = _make_context(args)
    classes = conj_classes(view)
    kinds = {}
    for cls in classes:
        kinds[cls.kind.value] = kinds.get(cls.kind.value, 0) + 1
    report = verify_kondo(view, tol=args.tol, threads=args.threads)
    rows = [{
        "j": r.j,
        "matrix_re": r.matrix_sum.real,
        "matrix_im": r.matrix_sum.imag,
        "torus_re": r.torus_sum.real,
        "torus_im": r.torus_sum.imag,
        "magnitude_gap": r.magnitude_gap,
        "signed_residual": r.signed_residual,
        "unsigned_residual": r.unsigned_residual,
    } for r in report.rows]
    summary = {
        "ok": report.ok,
        "classes": kinds,
        "group_order": sum(c.size for c in classes),
        "max_signed_residual": report.max_signed_residual,
        "max_unsigned_residual": report.max_unsigned_residual,
    }
    return _envelope("gl2", args, field, rows, summary)


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------


def _suite_counts(view, args):
    q, d, p = view.base_size, view.d, view.parent.p
    M = view.parent.order
    rows = []

    def check(name, got, want):
        rows.append({"check": name, "got": got, "want": want, "ok": got == want})

    check("c0_size", len(enumerate_family(view, Family.C0)), (q**d - 1) // (q - 1))
    prim = enumerate_family(view, Family.PRIMITIVE)
    orbits = set()
    for j in prim:
        orbit = frozenset((int(j) * pow(q, e, M)) % M for e in range(d))
        orbits.add(orbit)
    check("primitive_orbits_size_d", all(len(o) == d for o in orbits), True)
    check("primitive_count_multiple_of_d", len(prim) % d, 0)
    if d == 2:
        want = q - 1 if p % 2 else q
        check("c0_primitive_size", len(enumerate_family(view, Family.C0_PRIMITIVE)), want)
        if p % 2:
            check("c0s_size", len(enumerate_family(view, Family.C0S)), (q + 1) // 2)
            check("c0ns_size", len(enumerate_family(view, Family.C0NS)), (q + 1) // 2)
            quad = M // 2
            check("quadratic_in_c0s", is_square_in_c0(view, quad), (q + 1) % 4 == 0)
    ok = all(r["ok"] for r in rows)
    return rows, ok


def _suite_orthogonality(view, args, psi):
    field = view.parent
    M = field.order
    q, p = view.base_size, field.p
    rows = []
    tol = 1e-9 * max(M, 16)
    omega = np.exp((2j * np.pi / M) * np.arange(M))

    sample = range(M) if M <= 256 else list(range(64)) + [M // 2, M - 1]
    worst = 0.0
    for j in sample:
        total = complex(np.sum(omega ** j)) if j else complex(M)
        want = M if j % M == 0 else 0
        worst = max(worst, abs(total - want))
    rows.append({"check": "char_orthogonality", "worst": worst, "ok": worst < tol})

    if view.d == 2:
        in_s = lambda k: view.in_base(k) or view.trace_rel(k) == -1
        if p % 2:
            c0s = enumerate_family(view, Family.C0S)
            c0ns = enumerate_family(view, Family.C0NS)
            worst = 0.0
            ok_vals = True
            for k in range(M):
                total = sum(mult_char(field, int(j), k) for j in c0s)
                want = (q - 1) / 2 if in_s(k) else 0.0
                worst = max(worst, abs(total - want))
                if in_s(k):
                    want_val = 1.0 if view.in_base(k) else -1.0
                    for j in c0ns:
                        ok_vals &= abs(mult_char(field, int(j), k) - want_val) < 1e-9
            rows.append({"check": "c0s_annihilator", "worst": worst, "ok": worst < tol})
            rows.append({"check": "c0ns_values_on_s", "worst": None, "ok": bool(ok_vals)})
        else:
            c0 = enumerate_family(view, Family.C0)
            worst = 0.0
            for k in range(M):
                total = sum(mult_char(field, int(j), k) for j in c0)
                want = q + 1.0 if view.in_base(k) else 0.0
                worst = max(worst, abs(total - want))
            rows.append({"check": "c0_annihilator_char2", "worst": worst, "ok": worst < tol})
    ok = all(r["ok"] for r in rows)
    return rows, ok


def _suite_recurrence(view, args, psi):
    report = check_recurrence(view, max(args.n_max, 2), psi, tol=args.tol)
    rows = [{
        "n": r.n,
        "invariant": r.invariant,
        "anti_invariant": r.anti_invariant,
        "recurrence_ok": r.recurrence_ok,
        "closed_forms_ok": r.closed_forms_ok,
    } for r in report.rows]
    rows.insert(0, {
        "n": 1,
        "invariant": report.rows[0].invariant if False else None,
        "anti_invariant": None,
        "recurrence_ok": report.identity_ok,
        "closed_forms_ok": True,
    })
    return rows, report.ok


def _suite_closed_forms(view, args, psi):
    from .expsum import aggregate_series

    q, p = view.base_size, view.parent.p
    I, A, worst = aggregate_series(view, max(args.n_max, 2), psi, tol=args.tol)
    rows = []
    for n in range(1, len(I) + 1):
        if p == 2:
            ok = I[n - 1] == closed_form_even(q, n)
            rows.append({"n": n, "value": I[n - 1], "closed": closed_form_even(q, n), "ok": ok})
        else:
            ok = (I[n - 1] + A[n - 1] == closed_form_sum(q, n)
                  and I[n - 1] - A[n - 1] == closed_form_diff(q, n))
            rows.append({"n": n, "value": I[n - 1] + A[n - 1],
                         "closed": closed_form_sum(q, n), "ok": ok})
    ok = worst < args.tol and all(r["ok"] for r in rows)
    return rows, ok


def _suite_deligne(field, args, psi):
    report = check_deligne_bound(field, args.n_max, psi)
    rows = [{"n": n, "max_abs": m, "bound": b, "ok": m <= b * (1 + 1e-9)}
            for n, m, b in report.rows]
    return rows, report.ok


def _suite_parseval(field, args, psi):
    rows = []
    for n in range(1, args.n_max + 1):
        rep = check_parseval(field, n, psi, tol=args.tol)
        rows.append({"n": n, "empirical": rep.empirical, "exact": rep.exact,
                     "rel_gap": rep.rel_gap, "ok": rep.ok})
    return rows, all(r["ok"] for r in rows)


def _suite_hasse_davenport(args):
    rows = []
    q = args.p ** args.m
    for n in range(2, max(args.n_max, 2) + 1):
        tower = build_field(args.p, args.m * n, cache_dir=_resolve_cache(args),
                            max_size=args.max_size)
        tview = subfield_view(tower, n)
        for u in range(q - 1):
            rep = check_hasse_davenport(tview, u)
            rows.append({"degree": n, "u": u, "residual": rep.residual, "ok": rep.ok})
    return rows, all(r["ok"] for r in rows)


def _suite_fourier(field, view, args, psi):
    rows = []
    for n in range(1, args.n_max + 1):
        rep = moment_identity(field, n, psi, tol=args.tol)
        rows.append({"check": "moment_identity", "n": n, "rel_gap": rep.rel_gap, "ok": rep.ok})
        if view.d >= 2:
            rep = c0_moment_identity(view, n, psi, tol=args.tol)
            rows.append({"check": "c0_moment_identity", "n": n, "rel_gap": rep.rel_gap,
                         "ok": rep.ok})
        rep = cross_method_check(field, n, psi, args.max_work)
        rows.append({"check": "cross_method", "n": n, "max_deviation": rep.max_deviation,
                     "methods": ",".join(rep.methods), "ok": rep.ok})
    res = gauss_batch_residual(field, psi)
    rows.append({"check": "gauss_batch_vs_direct", "n": None, "rel_gap": res,
                 "ok": res < 1e-7 * field.q**0.5})
    return rows, all(r["ok"] for r in rows)


def _suite_epsilon_square(view, args):
    if view.d != 2 or view.parent.p == 2:
        raise ValueError("epsilon-square suite requires d = 2 and odd p")
    rows = []
    for j in enumerate_family(view, Family.C0):
        agree = square_criterion_epsilon(view, int(j)) == is_square_in_c0(view, int(j))
        rows.append({"j": int(j), "ok": agree})
    return rows, all(r["ok"] for r in rows)


def _suite_kondo(view, args):
    report = verify_kondo(view, tol=args.tol, threads=args.threads)
    rows = [{"j": r.j, "magnitude_gap": r.magnitude_gap,
             "signed_residual": r.signed_residual,
             "unsigned_residual": r.unsigned_residual} for r in report.rows]
    return rows, report.ok


def _cmd_verify(args) -> dict:
    if args.suite == "hasse-davenport":
        rows, ok = _suite_hasse_davenport(args)
        return _envelope("verify", args, None, rows,
                         {"suite": args.suite, "ok": ok, "checks": len(rows)})
    field, view, psi = _make_context(args)
    suites = {
        "counts": lambda: _suite_counts(view, args),
        "orthogonality": lambda: _suite_orthogonality(view, args, psi),
        "recurrence": lambda: _suite_recurrence(view, args, psi),
        "closed-forms": lambda: _suite_closed_forms(view, args, psi),
        "deligne": lambda: _suite_deligne(field, args, psi),
        "parseval": lambda: _suite_parseval(field, args, psi),
        "fourier-identities": lambda: _suite_fourier(field, view, args, psi),
        "epsilon-square": lambda: _suite_epsilon_square(view, args),
        "kondo": lambda: _suite_kondo(view, args),
    }
    if args.suite != "all":
        rows, ok = suites[args.suite]()
        for row in rows:
            row["suite"] = args.suite
        return _envelope("verify", args, field, rows,
                         {"suite": args.suite, "ok": ok, "checks": len(rows)})
    rows, all_ok = [], True
    for name, run in suites.items():
        if name in ("recurrence", "closed-forms", "kondo") and view.d != 2:
            continue
        if name == "epsilon-square" and (view.d != 2 or view.parent.p == 2):
            continue
        sub_rows, ok = run()
        for row in sub_rows:
            row["suite"] = name
        rows.extend(sub_rows)
        all_ok &= ok
    return _envelope("verify", args, field, rows,
                     {"suite": "all", "ok": all_ok, "checks": len(rows)})


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _emit(envelope: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(envelope, indent=2, default=_json_default) + "\n"
    else:
        buf = io.StringIO()
        for key in ("schema", "version", "command"):
            buf.write(f"# {key}={envelope[key]}\n")
        if envelope["field"] is not None:
            fld = envelope["field"]
            buf.write(f"# field=p:{fld['p']},m:{fld['m']},generator:{fld['generator']}\n")
        buf.write(f"# summary={json.dumps(envelope['summary'], default=_json_default)}\n")
        rows = envelope["rows"]
        if rows:
            writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "field": _cmd_field,
        "gauss": _cmd_gauss,
        "kloosterman": _cmd_kloosterman,
        "moments": _cmd_moments,
        "verify": _cmd_verify,
        "gl2": _cmd_gl2,
    }
    try:
        envelope = handlers[args.command](args)
    except GuardError as exc:
        print(f"guard error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(envelope, args)
    return 0 if envelope["summary"].get("ok", True) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
