"""Command line front end emitting deterministic JSON and CSV reports.

Representation conventions used throughout this module:

* Polynomial arguments are comma-separated base-10 coefficients ascending
  in degree ("1,0,1" is 1 + X^2); over an extension field each coefficient
  is a slash-separated vector over the prime subfield.  Reports echo
  polynomials in the same format.
* The field comes from --q <prime power> (shorthand, picks the default
  modulus when the exponent exceeds 1) or from --p with optional --e and
  --modulus.  Giving both --q and --p is a usage error.
* Integer ranges: "8" is a single point, "2:8" is inclusive with step 1,
  "50:400:x2" is geometric with integer factor 2, capped at the upper
  endpoint.
* Counts can exceed 2**53, so JSON carries them as decimal strings.  CSV
  cells are bare literals; every numeric CSV cell parses as JSON to the
  number the JSON report carries (big counts via their decimal strings).
* Reports are byte-identical across repeated identical invocations: keys
  are inserted in fixed order, floats print via repr, rows are ordered by
  parameter tuple, and nothing reads the clock.  Memory-heavy commands
  honor FFCOUNT_BUDGET_BYTES and the --budget override.
* --out writes to a temporary file in the destination directory and
  renames it over the target, so readers never see a partial report.

Exit codes: 0 success, 2 usage error, 3 budget exceeded, 4 consistency
failure (a dual-path mismatch or a failed selftest).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import FieldSpec, Poly, default_modulus, involute, parse_poly
from .apinterval import (
    APQuery,
    IntervalQuery,
    ap_enumerate,
    ap_series,
    interval_enumerate,
    pi_k_ap_chars,
    pi_k_ap_exact,
    pi_k_interval_exact,
)
from .asym import (
    AnalyticConfig,
    bigG,
    bigH,
    euler_F,
    gamma_real,
    main_term_thm1,
    main_term_thm2,
    main_term_thm3,
    qlimit_count,
    qlimit_sum,
    ratio_to_main,
    thm1_normalized_error,
)
from .characters import L_COEFF_NOTE, characters, unit_group, weil_check
from .errors import BudgetExceededError, ConsistencyError, RootFindingError
from .exactcount import (
    brute_force_count,
    cauchy_extract,
    euler_product_allfactors,
    euler_product_squarefree,
    max_omega,
    omega_mean_exact,
    omega_moments,
)

__all__ = ["UsageError", "main", "run"]


class UsageError(Exception):
    """Bad flag combinations or malformed argument values; exit code 2."""


@dataclass
class Report:
    payload: dict
    header: tuple
    rows: list = field(default_factory=list)
    exit_code: int = 0


def _parse_range(text: str, what: str) -> list[int]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [int(parts[0])]
        lo, hi = int(parts[0]), int(parts[1])
        if len(parts) == 2:
            if hi < lo:
                raise UsageError(f"{what}: empty range {text!r}")
            return list(range(lo, hi + 1))
        if len(parts) == 3:
            step = parts[2]
            if not step.startswith("x"):
                raise UsageError(f"{what}: step must look like x2, got {step!r}")
            fac = int(step[1:])
            if fac < 2 or lo < 1 or hi < lo:
                raise UsageError(f"{what}: bad geometric range {text!r}")
            out = []
            v = lo
            while v <= hi:
                out.append(v)
                v *= fac
            return out
    except ValueError:
        raise UsageError(f"{what}: cannot parse {text!r}") from None
    raise UsageError(f"{what}: cannot parse {text!r}")


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise UsageError(f"--q {q} is not a prime power")
    p = q
    for cand in range(2, math.isqrt(q) + 1):
        if q % cand == 0:
            p = cand
            break
    e = 0
    v = q
    while v % p == 0:
        v //= p
        e += 1
    if v != 1:
        raise UsageError(f"--q {q} is not a prime power")
    return p, e


def _field_from_args(args, required: bool = True) -> FieldSpec | None:
    if args.q is not None and args.p is not None:
        raise UsageError("give either --q or --p, not both")
    if args.q is not None:
        p, e = _prime_power(args.q)
        if e == 1:
            return FieldSpec(p)
        return FieldSpec(p, e, default_modulus(p, e))
    if args.p is None:
        if required:
            raise UsageError("a field is required: pass --q or --p")
        return None
    e = args.e if args.e is not None else 1
    if args.modulus is not None:
        try:
            mod = tuple(int(c) for c in args.modulus.split(","))
        except ValueError:
            raise UsageError(f"--modulus: cannot parse {args.modulus!r}") from None
        return FieldSpec(args.p, e, mod)
    if e == 1:
        return FieldSpec(args.p)
    return FieldSpec(args.p, e, default_modulus(args.p, e))


def _poly_arg(fld: FieldSpec, text: str, what: str) -> Poly:
    try:
        return parse_poly(fld, text)
    except ValueError as exc:
        raise UsageError(f"--{what}: bad polynomial {text!r} ({exc})") from None


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.payload, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.header)
    for row in report.rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    target = os.path.abspath(out_path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".ffcount-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _paths_agree(exact: int, char_value: float) -> bool:
    # absolute slack for small counts, relative for counts past float precision
    return abs(char_value - exact) <= max(0.5, 1e-9 * abs(exact))


def cmd_count(args) -> Report:
    fld = _field_from_args(args)
    q = fld.q
    nrange = _parse_range(args.n, "--n")
    if min(nrange) < 0:
        raise UsageError("--n: degrees must be nonnegative")
    N = max(nrange)
    cap = max_omega(q, N) if N >= 1 else 0
    krange = _parse_range(args.k, "--k") if args.k else list(range(cap + 1))
    if min(krange) < 0:
        raise UsageError("--k: factor counts must be nonnegative")
    K = min(max(krange), cap)
    build = euler_product_squarefree if args.mode == "squarefree" else euler_product_allfactors
    series = build(q, max(N, 1), K, budget=args.budget)
    rows = []
    for n in nrange:
        table = series.row(n)
        for k in krange:
            count = table[k] if k <= K else 0
            rows.append((q, n, k, count))
    payload = {
        "command": "count",
        "q": q,
        "mode": args.mode,
        "rows": [{"n": n, "k": k, "count": str(c)} for _, n, k, c in rows],
    }
    return Report(payload, ("q", "n", "k", "count"), rows)


def cmd_asym(args) -> Report:
    fld = _field_from_args(args)
    q = fld.q
    cfg = AnalyticConfig(A=args.A)
    nrange = _parse_range(args.n, "--n")
    krange = _parse_range(args.k, "--k")
    rows = []
    for n in nrange:
        for k in krange:
            m = main_term_thm1(q, n, k, cfg, override=args.override)
            rows.append((q, n, k, m.ln_abs))
    payload = {
        "command": "asym",
        "q": q,
        "A": args.A,
        "rows": [{"n": n, "k": k, "main_term_lnAbs": v} for _, n, k, v in rows],
    }
    return Report(payload, ("q", "n", "k", "main_term_lnAbs"), rows)


def cmd_compare(args) -> Report:
    fld = _field_from_args(args)
    q = fld.q
    cfg = AnalyticConfig(A=args.A)
    nrange = _parse_range(args.n, "--n")
    krange = _parse_range(args.k, "--k")
    if min(nrange) < 2 or min(krange) < 1:
        raise UsageError("compare needs n >= 2 and k >= 1")
    N = max(nrange)
    K = min(max(krange), max_omega(q, N))
    series = euler_product_squarefree(q, N, K, budget=args.budget)
    rows = []
    for n in nrange:
        table = series.row(n)
        for k in krange:
            exact = table[k] if k <= K else 0
            m = main_term_thm1(q, n, k, cfg)
            rows.append((q, n, k, exact, m.ln_abs,
                         ratio_to_main(exact, m),
                         thm1_normalized_error(exact, q, n, k, cfg)))
    payload = {
        "command": "compare",
        "q": q,
        "A": args.A,
        "rows": [
            {"n": n, "k": k, "exact": str(e), "main_term_lnAbs": ml,
             "ratio": r, "normalized_error": ne}
            for _, n, k, e, ml, r, ne in rows
        ],
    }
    return Report(
        payload,
        ("q", "n", "k", "exact", "main_term_lnAbs", "ratio", "normalized_error"),
        rows)


def cmd_ap(args) -> Report:
    fld = _field_from_args(args)
    q = fld.q
    cfg = AnalyticConfig(A=args.A)
    d = _poly_arg(fld, args.d, "d")
    g = _poly_arg(fld, args.g, "g")
    n, k = args.n, args.k
    qy = APQuery(n, k, g, d)
    if n >= 1 and 1 <= k <= min(n, max_omega(q, n)):
        series = ap_series(d, n, max(1, min(k, max_omega(q, n))),
                           method=args.method, budget=args.budget)
        exact = pi_k_ap_exact(qy, series=series)
    elif k == 0 and n >= 1:
        exact = 0
    else:
        exact = pi_k_ap_exact(qy, budget=args.budget)
    char_value = pi_k_ap_chars(qy)
    if not _paths_agree(exact, char_value):
        raise ConsistencyError(
            f"progression paths disagree: exact {exact}, characters {char_value!r}")
    main_ln = None
    in_range = False
    if n >= 2 and k >= 1:
        try:
            main_ln = main_term_thm2(n, k, d, cfg).ln_abs
            in_range = True
        except ValueError as exc:
            if "override" not in str(exc):
                raise
            main_ln = main_term_thm2(n, k, d, cfg, override=True).ln_abs
    payload = {
        "command": "ap",
        "q": q,
        "d": d.text(),
        "g": g.text(),
        "n": n,
        "k": k,
        "exact": str(exact),
        "char_path": str(round(char_value)),
        "paths_agree": True,
        "main_term_lnAbs": main_ln,
        "in_proven_range": in_range,
    }
    header = ("q", "d", "g", "n", "k", "exact", "char_path",
              "main_term_lnAbs", "in_proven_range")
    row = (q, d.text(), g.text(), n, k, exact, round(char_value), main_ln, in_range)
    return Report(payload, header, [row])


def cmd_interval(args) -> Report:
    fld = _field_from_args(args)
    q = fld.q
    cfg = AnalyticConfig(A=args.A)
    g = _poly_arg(fld, args.g, "g")
    n = args.n if args.n is not None else g.degree
    k, h = args.k, args.h
    qy = IntervalQuery(n, k, g, h)
    exact = pi_k_interval_exact(qy, budget=args.budget)
    if k == 0:
        char_value = 0.0
    else:
        m = n - h
        d = Poly.x(fld, m)
        gstar = involute(g)
        char_value = 0.0
        for a in range(1, q):
            r = gstar.scale(fld.inv(a)) % d
            char_value += pi_k_ap_chars(APQuery(n, k, r, d))
            char_value += pi_k_ap_chars(APQuery(n - 1, k - 1, r, d))
    if not _paths_agree(exact, char_value):
        raise ConsistencyError(
            f"interval paths disagree: exact {exact}, characters {char_value!r}")
    main_ln = None
    in_range = False
    if n >= 2 and k >= 1:
        try:
            main_ln = main_term_thm3(q, n, k, h, cfg).ln_abs
            in_range = True
        except ValueError as exc:
            if "override" not in str(exc):
                raise
            main_ln = main_term_thm3(q, n, k, h, cfg, override=True).ln_abs
    payload = {
        "command": "interval",
        "q": q,
        "g": g.text(),
        "n": n,
        "h": h,
        "k": k,
        "exact": str(exact),
        "char_path": str(round(char_value)),
        "paths_agree": True,
        "main_term_lnAbs": main_ln,
        "in_proven_range": in_range,
    }
    header = ("q", "g", "n", "h", "k", "exact", "char_path",
              "main_term_lnAbs", "in_proven_range")
    row = (q, g.text(), n, h, k, exact, round(char_value), main_ln, in_range)
    return Report(payload, header, [row])


def cmd_weil(args) -> Report:
    fld = _field_from_args(args)
    d = _poly_arg(fld, args.d, "d")
    group = unit_group(d)
    reports = []
    rows = []
    all_ok = True
    for chi in characters(group):
        if chi.is_principal:
            continue
        rep = weil_check(chi, tol=args.tol)
        all_ok = all_ok and rep["ok"]
        reports.append({
            "exponents": rep["exponents"],
            "degree_deficit": rep["degree_deficit"],
            "ok": rep["ok"],
            "inverse_roots": rep["inverse_roots"],
        })
        exps = ";".join(str(e) for e in rep["exponents"])
        for root in rep["inverse_roots"]:
            rows.append((fld.q, d.text(), exps, root["re"], root["im"],
                         root["modulus"], root["class"],
                         rep["degree_deficit"], rep["ok"]))
    payload = {
        "command": "weil",
        "q": fld.q,
        "d": d.text(),
        "characters": reports,
        "all_ok": all_ok,
        "coefficient_convention": L_COEFF_NOTE,
    }
    header = ("q", "d", "exponents", "re", "im", "modulus", "class",
              "degree_deficit", "ok")
    return Report(payload, header, rows)


def cmd_omega_stats(args) -> Report:
    fld = _field_from_args(args)
    q = fld.q
    nrange = _parse_range(args.n, "--n")
    if min(nrange) < 1:
        raise UsageError("--n: omega-stats needs n >= 1")
    N = max(nrange)
    series = euler_product_allfactors(q, N, max_omega(q, N), budget=args.budget)
    rows = []
    jrows = []
    for n in nrange:
        mom = omega_moments(series, n)
        check = omega_mean_exact(q, n)
        if mom.mean != check:
            raise ConsistencyError(
                f"mean mismatch at n = {n}: table {mom.mean}, direct sum {check}")
        rows.append((q, n, float(mom.mean), float(mom.variance)))
        jrows.append({
            "n": n,
            "mean": str(mom.mean),
            "mean_float": float(mom.mean),
            "variance": str(mom.variance),
            "variance_float": float(mom.variance),
        })
    payload = {"command": "omega-stats", "q": q, "rows": jrows}
    return Report(payload, ("q", "n", "mean", "variance"), rows)


def cmd_qlimit(args) -> Report:
    fld = _field_from_args(args, required=False)
    n, k = args.n, args.k
    s = qlimit_sum(n, k)
    payload = {
        "command": "qlimit",
        "n": n,
        "k": k,
        "sum": str(s),
        "sum_float": float(s),
    }
    row = [n, k, float(s)]
    header = ["n", "k", "sum"]
    if fld is not None:
        m = qlimit_count(fld.q, n, k)
        payload["q"] = fld.q
        payload["count_lnAbs"] = m.ln_abs
        header += ["q", "count_lnAbs"]
        row += [fld.q, m.ln_abs]
    return Report(payload, tuple(header), [tuple(row)])


def _selftest_checks():
    f2 = FieldSpec(2)
    f3 = FieldSpec(3)

    def global_vs_brute():
        series = euler_product_squarefree(2, 5)
        return all(
            series.row(n)[k] == brute_force_count(f2, n, k)
            for n in range(6) for k in range(max_omega(2, 5) + 1))

    def global_identities():
        N = 40
        sq = euler_product_squarefree(2, N)
        al = euler_product_allfactors(2, N)
        ok = all(sum(al.row(n)) == 2 ** n for n in range(1, N + 1))
        return ok and all(
            sum(sq.row(n)) == 2 ** n - 2 ** (n - 1) for n in range(2, N + 1))

    def special_values():
        ok = abs(euler_F(1.0, 2) - 0.5) < 1e-10
        ok = ok and abs(bigG(0.0, 2) - 1.0) < 1e-10
        ok = ok and abs(bigH(0.0, 2) - 1.0) < 1e-10
        g45 = gamma_real(4.5)
        return ok and abs(g45 - 3.5 * gamma_real(3.5)) < 1e-12 * g45

    def weil_mod_x2_plus_1():
        group = unit_group(parse_poly(f3, "1,0,1"))
        chs = [c for c in characters(group) if not c.is_principal]
        return len(chs) == 7 and all(weil_check(c)["ok"] for c in chs)

    def progression_paths():
        qy = APQuery(4, 2, parse_poly(f3, "1"), parse_poly(f3, "0,1"))
        exact = pi_k_ap_exact(qy)
        if exact != ap_enumerate(qy):
            return False
        return _paths_agree(exact, pi_k_ap_chars(qy))

    def interval_involution():
        g = Poly.x(f2, 5)
        for h in range(5):
            for k in range(1, 6):
                qy = IntervalQuery(5, k, g, h)
                if pi_k_interval_exact(qy) != interval_enumerate(qy):
                    return False
        return True

    def qlimit_harmonic():
        return qlimit_sum(5, 2) == Fraction(25, 12)

    def cauchy_roundtrip():
        series = euler_product_squarefree(2, 8, 2)
        exact = series.row(8)[2]
        approx = cauchy_extract(series, 8, 2, M=64)
        return abs(approx - exact) <= 1e-6 * max(1, exact)

    return [
        ("global_vs_brute", global_vs_brute),
        ("global_identities", global_identities),
        ("special_values", special_values),
        ("weil_mod_x2_plus_1", weil_mod_x2_plus_1),
        ("progression_paths", progression_paths),
        ("interval_involution", interval_involution),
        ("qlimit_harmonic", qlimit_harmonic),
        ("cauchy_roundtrip", cauchy_roundtrip),
    ]


def cmd_selftest(args) -> Report:
    checks = []
    rows = []
    all_ok = True
    for name, fn in _selftest_checks():
        try:
            ok = bool(fn())
            entry = {"name": name, "ok": ok}
        except Exception as exc:  # a crashed check is a failed check
            ok = False
            entry = {"name": name, "ok": False,
                     "detail": f"{type(exc).__name__}: {exc}"}
        checks.append(entry)
        rows.append((name, ok))
        all_ok = all_ok and ok
    payload = {"command": "selftest", "checks": checks, "ok": all_ok}
    return Report(payload, ("name", "ok"), rows, exit_code=0 if all_ok else 4)


_DISPATCH = {
    "count": cmd_count,
    "asym": cmd_asym,
    "compare": cmd_compare,
    "ap": cmd_ap,
    "interval": cmd_interval,
    "weil": cmd_weil,
    "omega-stats": cmd_omega_stats,
    "qlimit": cmd_qlimit,
    "selftest": cmd_selftest,
}


def _add_common(p, with_field=True):
    if with_field:
        p.add_argument("--q", type=int, help="field size, a prime power")
        p.add_argument("--p", type=int, help="field characteristic")
        p.add_argument("--e", type=int, help="extension degree over F_p")
        p.add_argument("--modulus", help="defining modulus coefficients, comma separated")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report to this path atomically")
    p.add_argument("--budget", type=int, default=None,
                   help="memory cap in bytes for table builders")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffcount",
        description="Counts of monic polynomials over F_q by number of "
                    "distinct irreducible factors, with asymptotic checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact factor-count tables")
    p.add_argument("--n", required=True, help="degree or degree range")
    p.add_argument("--k", help="factor count or range; all columns when omitted")
    p.add_argument("--mode", choices=("squarefree", "all"), default="squarefree")
    _add_common(p)

    p = sub.add_parser("asym", help="predicted main terms in log space")
    p.add_argument("--n", required=True)
    p.add_argument("--k", required=True)
    p.add_argument("--A", type=float, default=2.0)
    p.add_argument("--override", action="store_true",
                   help="evaluate outside the proven k range")
    _add_common(p)

    p = sub.add_parser("compare", help="exact counts against predictions")
    p.add_argument("--n", required=True)
    p.add_argument("--k", required=True)
    p.add_argument("--A", type=float, default=2.0)
    _add_common(p)

    p = sub.add_parser("ap", help="progression count, dual path")
    p.add_argument("--d", required=True, help="modulus polynomial")
    p.add_argument("--g", required=True, help="residue polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--A", type=float, default=2.0)
    p.add_argument("--method", choices=("auto", "direct", "class"), default="auto")
    _add_common(p)

    p = sub.add_parser("interval", help="short interval count, dual path")
    p.add_argument("--g", required=True, help="monic center polynomial")
    p.add_argument("--n", type=int, help="degree; defaults to deg g")
    p.add_argument("--h", type=int, required=True, help="radius degree")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--A", type=float, default=2.0)
    _add_common(p)

    p = sub.add_parser("weil", help="L-polynomial inverse root moduli")
    p.add_argument("--d", required=True, help="modulus polynomial")
    p.add_argument("--tol", type=float, default=1e-6)
    _add_common(p)

    p = sub.add_parser("omega-stats", help="moments of the factor count")
    p.add_argument("--n", required=True)
    _add_common(p)

    p = sub.add_parser("qlimit", help="large-q limit of the k-factor count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("selftest", help="fast cross-module invariant suite")
    _add_common(p, with_field=False)

    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        report = _DISPATCH[args.command](args)
        _emit(_render(report, args.format), args.out)
        return report.exit_code
    except UsageError as exc:
        print(f"ffcount: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"ffcount: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"ffcount: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (ConsistencyError, RootFindingError) as exc:
        print(f"ffcount: consistency failure: {exc}", file=sys.stderr)
        return 4


def run(argv) -> int:
    return main(argv)
