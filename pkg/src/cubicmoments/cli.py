"""Command-line front end: verify, sweep, gauss-table, aq-eval, family-count, export."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .characters import (
    FamilySpec,
    family_count_inclusion_exclusion,
    family_members,
    member_char,
)
from .cyclo import CycloNumber, QuadExtNumber
from .field import field_of_order
from .gauss import gauss_full, gauss_full_conj_relation, gen_gauss, gen_gauss_many
from .lfun import (
    afe_check,
    family_batches,
    functional_equation_check,
    rh_diagnostic,
    root_number_from_lpoly,
    root_number_gauss,
)
from .moments import (
    BUDGET,
    BudgetExceeded,
    CacheCorrupt,
    LedgerStore,
    MomentLedger,
    compare_report,
    cube_term_via_series,
    decomposition_check,
    default_cache_dir,
    dual_routes,
    ledger_from_json,
    s_term_layers,
    s_terms,
    sweep,
)
from .polyring import Poly, encode_poly, enumerate_monic, frobenius_conjugate, is_squarefree, lift
from .series import a_q_value, b2_identity_check, family_count_genfun_check

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3
GAUSS_ROUTE_LIMIT = 5**4  # residues mod F sigma(F) per character


@dataclass
class CheckResult:
    name: str
    passed: bool
    gating: bool = True
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "gating": self.gating, "detail": self.detail}


# --- verify battery ----------------------------------------------------------------------

def _family_checks(spec: FamilySpec) -> list[CheckResult]:
    members = family_members(spec)
    conductors = [member_char(spec, m).conductor for m in members]
    keys = {F.key for F in conductors}
    closed = all(frobenius_conjugate(F).key in keys for F in conductors)
    n = len(members)
    oracle = family_count_inclusion_exclusion(spec.q, spec.m)
    literal = family_count_inclusion_exclusion(spec.q, spec.m, exclude_split_pairs=False)
    return [
        CheckResult("family count equals inclusion-exclusion oracle", n == oracle, detail=f"{n} vs {oracle}"),
        CheckResult("family closed under Frobenius conjugation", closed),
        CheckResult(
            "family count under the pair-allowed reading",
            n == literal,
            gating=False,
            detail=f"enumerated {n}, pair-allowed reading {literal}",
        ),
    ]


def _lfun_checks(spec: FamilySpec) -> list[CheckResult]:
    q, g = spec.q, spec.g
    counts = {k: 0 for k in ("a0", "top", "L1", "fe1", "fe2", "rh", "afe", "afe_plain", "omega_abs", "omega_gauss")}
    total = afe_total = gauss_total = 0
    members = family_members(spec)
    s_inv = q**-0.5
    for batch in family_batches(spec, members, g + 2):
        chars = batch.chars() if q ** (g + 2) <= GAUSS_ROUTE_LIMIT else None
        for j, L in enumerate(batch.lpolys):
            total += 1
            Lc = L.conj()
            counts["a0"] += L.coeffs[0] == (1, 0)
            counts["top"] += L.coeffs[g + 2] == (0, 0)
            counts["L1"] += L.value_at_one() == (0, 0)
            counts["fe1"] += functional_equation_check(L, 1, Lc)
            counts["fe2"] += functional_equation_check(L, 2, Lc)
            counts["rh"] += all(abs(r - s_inv) < 1e-6 for r in rh_diagnostic(L))
            w = root_number_from_lpoly(L)
            counts["omega_abs"] += abs(abs(w.to_complex()) - 1) < 1e-10
            for k in (1, 2):
                for A in range(k * g):
                    afe_total += 1
                    counts["afe"] += afe_check(L, k, A, layer_shift=True)
                    counts["afe_plain"] += afe_check(L, k, A)
            if chars is not None:
                gauss_total += 1
                counts["omega_gauss"] += root_number_gauss(chars[j]) == w
    out = [
        CheckResult("a_0 = 1", counts["a0"] == total, detail=f"{counts['a0']}/{total}"),
        CheckResult("a_{g+2} = 0", counts["top"] == total, detail=f"{counts['top']}/{total}"),
        CheckResult("L(1) = 0", counts["L1"] == total, detail=f"{counts['L1']}/{total}"),
        CheckResult("functional equation k=1", counts["fe1"] == total, detail=f"{counts['fe1']}/{total}"),
        CheckResult("functional equation k=2", counts["fe2"] == total, detail=f"{counts['fe2']}/{total}"),
        CheckResult("RH root moduli within 1e-6", counts["rh"] == total, detail=f"{counts['rh']}/{total}"),
        CheckResult("|root number| = 1 within 1e-10", counts["omega_abs"] == total, detail=f"{counts['omega_abs']}/{total}"),
        CheckResult(
            "approximate functional equation, layer weight binom(k+i-1,i) q^(-i/2)",
            counts["afe"] == afe_total,
            detail=f"{counts['afe']}/{afe_total}",
        ),
        CheckResult(
            "approximate functional equation, layer weight binom(k+i-1,i) as displayed",
            counts["afe_plain"] == afe_total,
            gating=False,
            detail=f"{counts['afe_plain']}/{afe_total}",
        ),
    ]
    if gauss_total:
        out.append(
            CheckResult(
                "root number: character sum equals Gauss-sum formula",
                counts["omega_gauss"] == gauss_total,
                detail=f"{counts['omega_gauss']}/{gauss_total}",
            )
        )
    return out


def _gauss_checks(spec: FamilySpec) -> list[CheckResult]:
    q, B, omega = spec.q, spec.char_field, spec.omega
    one = Poly.one(B)
    norm = CycloNumber.rational(q, q ** (2 * spec.m))
    counts = {"G": 0, "abs": 0, "w2": 0, "conj": 0}
    total = 0
    for m in family_members(spec):
        chi = member_char(spec, m)
        G = gauss_full(chi).value
        G1 = gen_gauss(one, chi.conductor, omega).value
        w = root_number_gauss(chi)
        total += 1
        counts["G"] += G == G1
        counts["abs"] += G1.abs2() == norm
        counts["w2"] += w * w == QuadExtNumber.from_cyclo(q, (G1 * G1).scale(Fraction(1, q ** (spec.g + 2))))
        counts["conj"] += gauss_full_conj_relation(chi)
    squarefree = [F for d in range(spec.m + 1) for F in enumerate_monic(spec.base_field, d) if is_squarefree(F)]
    rational = sum(gen_gauss(one, lift(F, B), omega).value == CycloNumber.rational(q, q**F.degree) for F in squarefree)
    return [
        CheckResult("G(chi_F) over F sigma(F) equals G(1, F)", counts["G"] == total, detail=f"{counts['G']}/{total}"),
        CheckResult("|G(1, F)|^2 = |F|", counts["abs"] == total, detail=f"{counts['abs']}/{total}"),
        CheckResult("root number squared = q^-(g+2) G(1, F)^2", counts["w2"] == total, detail=f"{counts['w2']}/{total}"),
        CheckResult("Gauss sum of the conjugate character", counts["conj"] == total, detail=f"{counts['conj']}/{total}"),
        CheckResult(
            f"G(1, F) = q^deg F for squarefree F in F_q[T], deg <= {spec.m}",
            rational == len(squarefree),
            detail=f"{rational}/{len(squarefree)}",
        ),
    ]


def _moment_checks(spec: FamilySpec, jobs: int, store: LedgerStore | None, force: bool) -> list[CheckResult]:
    q, g = spec.q, spec.g
    result = sweep(spec, jobs=jobs, store=store, force=force)
    M2 = result.second_moment
    out = [CheckResult("second moment is real", M2.is_real())]
    if g == 0:
        return out
    data = s_term_layers(spec)
    cube_ok = all(s_terms(data, t).prin_cube == cube_term_via_series(spec, t) for t in range(2 * g))
    out.append(CheckResult("cube term: enumeration equals generating series", cube_ok))
    As = range(2 * g)
    good = [A for A in As if decomposition_check(data, M2, A, layer_weight="shifted")]
    plain = [A for A in As if decomposition_check(data, M2, A)]
    out.append(CheckResult("decomposition, dual index A+i, weight (i+1) q^(-i/2)", len(good) == len(As), detail=f"A in {good}"))
    out.append(
        CheckResult("decomposition, dual index A+i, weight (i+1) as displayed", len(plain) == len(As), gating=False, detail=f"A in {plain}")
    )
    if q ** (2 * spec.m) <= GAUSS_ROUTE_LIMIT:
        routes = dual_routes(spec, data)
        prod_ok = [a == b for a, b in zip(routes.definition, routes.via_gauss_product)]
        lit_ok = [a == b for a, b in zip(routes.definition, routes.via_gauss_literal)]
        out.append(CheckResult("dual term: definition equals G(1,F) G(f,F) route", all(prod_ok), detail=str(prod_ok)))
        out.append(
            CheckResult("dual term: definition equals route with G(1,F) = q^deg F", all(lit_ok), gating=False, detail=str(lit_ok))
        )
    return out


def _series_checks(q: int, Nu: int, Nz: int) -> list[CheckResult]:
    F = field_of_order(q)
    T = Poly.T(F)
    ls = {"1": Poly.one(F), "T": T, "T(T+1)": T * (T + Poly.one(F))}
    out = [CheckResult(f"B_2 grid identity (u^{Nu}, z^{Nz})", b2_identity_check(q, Nu, Nz))]
    for name, l in ls.items():
        out.append(CheckResult(f"family generating function, l = {name}", family_count_genfun_check(q, l, Nz)))
    return out


def verify_battery(spec: FamilySpec, jobs: int = 1, store=None, force: bool = False, Nu: int = 4, Nz: int = 3) -> list[CheckResult]:
    checks = _family_checks(spec) + _lfun_checks(spec)
    if spec.q ** (2 * spec.m) <= GAUSS_ROUTE_LIMIT:
        checks += _gauss_checks(spec)
    checks += _moment_checks(spec, jobs, store, force)
    if spec.q == 5:
        checks += _series_checks(spec.q, Nu, Nz)
    return checks


# --- gauss table ----------------------------------------------------------------------------

GAUSS_COLUMNS = ["V", "f", "base", "coefficients", "float_re", "float_im"]


def gauss_table_rows(spec: FamilySpec, v_degree: int) -> list[list[str]]:
    base = spec.char_field
    Vs = [V for d in range(v_degree + 1) for V in enumerate_monic(spec.base_field, d)]
    lifted = [lift(V, base) for V in Vs]
    rows = []
    for m in family_members(spec):
        F = member_char(spec, m).conductor
        for V, G in zip(Vs, gen_gauss_many(lifted, F, spec.omega)):
            z = G.to_complex()
            rows.append([encode_poly(V), encode_poly(F), str(base.q), ";".join(G.to_strings()), repr(z.real), repr(z.imag)])
    return rows


# --- output helpers -----------------------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


S_TERM_COLUMNS = ["t", "part", "c_1", "c_omega", "c_s", "c_omega_s", "float"]


def report_csv(ledger: MomentLedger) -> str:
    rows = []
    for key in ("first_moment", "second_moment"):
        x = getattr(ledger, key)
        rows.append(["", key, *x.to_strings(), repr(x.to_complex().real)])
    for s in ledger.s_table:
        for part in ("prin", "prin_cube", "prin_noncube", "dual"):
            x = getattr(s, part)
            rows.append([s.t, part, *x.to_strings(), repr(x.to_complex().real)])
    if ledger.main is not None:
        rows.append(["", "main_term", "", "", "", "", repr(ledger.main.value)])
        rows.append(["", "relative_deviation", "", "", "", "", repr(ledger.relative_deviation)])
    return _csv_text(S_TERM_COLUMNS, rows)


# --- commands -------------------------------------------------------------------------------------

def _spec(args) -> FamilySpec:
    if args.q is None or args.g is None:
        raise ValueError("--q and --g are required")
    return FamilySpec(args.q, args.g)


def _store(args, spec: FamilySpec) -> LedgerStore:
    root = Path(args.cache_dir) if args.cache_dir else default_cache_dir()
    return LedgerStore(root, spec)


def cmd_verify(args) -> int:
    spec = _spec(args)
    t = time.time()
    checks = verify_battery(spec, args.jobs, _store(args, spec), args.force, args.trunc_u, args.trunc_z)
    failed = [c for c in checks if not c.passed and (c.gating or args.strict)]
    report = {
        "kind": "verify",
        "schema_version": "1.0",
        "q": spec.q,
        "g": spec.g,
        "checks": [c.to_json() for c in checks],
        "passed": not failed,
        "seconds_float": round(time.time() - t, 3),
    }
    if args.format == "csv":
        rows = [[c.name, c.passed, c.gating, c.detail] for c in checks]
        _emit(_csv_text(["name", "passed", "gating", "detail"], rows), args.out)
    else:
        _emit(_json_text(report), args.out)
    for c in checks:
        tag = "PASS" if c.passed else ("FAIL" if c.gating or args.strict else "FAIL (non-gating)")
        print(f"{tag}: {c.name} {c.detail}".rstrip(), file=sys.stderr)
    return EXIT_CHECK if failed else EXIT_OK


def cmd_sweep(args) -> int:
    spec = _spec(args)
    store = _store(args, spec)
    ledger = compare_report(spec, jobs=args.jobs, store=store, force=args.force, with_s_terms=not args.no_s_terms)
    if args.out:
        _emit(report_csv(ledger) if args.format == "csv" else _json_text(_report_json(ledger)), args.out)
    else:
        print(store.report_path)
    return EXIT_OK


def _report_json(ledger: MomentLedger) -> dict:
    return ledger.to_json()


def cmd_gauss_table(args) -> int:
    spec = _spec(args)
    if args.format == "json":
        raise ValueError("gauss-table writes CSV only")
    v_degree = args.trunc_u if args.trunc_u is not None else 1
    n_v = sum(spec.q**d for d in range(v_degree + 1))
    estimate = len(family_members(spec)) * spec.q ** (2 * spec.m) * n_v
    if estimate > BUDGET and not args.force:
        raise BudgetExceeded(estimate)
    rows = gauss_table_rows(spec, v_degree)
    _emit(_csv_text(GAUSS_COLUMNS, rows), args.out)
    return EXIT_OK


def cmd_aq_eval(args) -> int:
    if args.q is None:
        raise ValueError("--q is required")
    FamilySpec(args.q, 0)  # same admissibility gate as the family
    enc = a_q_value(args.q, args.tol)
    obj = {
        "kind": "aq-eval",
        "schema_version": "1.0",
        "q": args.q,
        "value_decimal": str(enc.value),
        "lower": str(enc.lower),
        "upper": str(enc.upper),
        "enclosure_width": enc.width,
        "truncation_degree": enc.truncation_degree,
    }
    _emit(_json_text(obj), args.out)
    return EXIT_OK


def cmd_family_count(args) -> int:
    spec = _spec(args)
    n = len(family_members(spec))
    if args.format == "json":
        obj = {
            "kind": "family-count",
            "schema_version": "1.0",
            "q": spec.q,
            "g": spec.g,
            "count": n,
            "inclusion_exclusion": family_count_inclusion_exclusion(spec.q, spec.m),
            "pair_allowed_reading": family_count_inclusion_exclusion(spec.q, spec.m, exclude_split_pairs=False),
        }
        _emit(_json_text(obj), args.out)
    elif args.format == "csv":
        _emit(_csv_text(["q", "g", "count"], [[spec.q, spec.g, n]]), args.out)
    else:
        _emit(f"{n}\n", args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    spec = _spec(args)
    store = _store(args, spec)
    if not store.report_path.exists():
        raise FileNotFoundError(f"no report at {store.report_path}; run sweep first")
    ledger = ledger_from_json(json.loads(store.report_path.read_text(encoding="utf-8")))
    text = report_csv(ledger) if args.format == "csv" else _json_text(_report_json(ledger))
    _emit(text, args.out)
    return EXIT_OK


COMMANDS: dict[str, Callable] = {
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "gauss-table": cmd_gauss_table,
    "aq-eval": cmd_aq_eval,
    "family-count": cmd_family_count,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubicmoments", description="Exact experiments on cubic L-function moments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--q", type=int)
        p.add_argument("--g", type=int)
        p.add_argument("--A", type=int)
        p.add_argument("--trunc-u", type=int, default=None)
        p.add_argument("--trunc-z", type=int, default=None)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--out")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--cache-dir")
        p.add_argument("--force", action="store_true")
        if name == "verify":
            p.add_argument("--strict", action="store_true", help="treat non-gating checks as failures")
        if name == "sweep":
            p.add_argument("--no-s-terms", action="store_true", help="skip the S-term table")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        args.trunc_u = 4 if args.trunc_u is None else args.trunc_u
        args.trunc_z = 3 if args.trunc_z is None else args.trunc_z
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"refused: {exc}; pass --force to run anyway", file=sys.stderr)
        return EXIT_BUDGET
    except CacheCorrupt as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
