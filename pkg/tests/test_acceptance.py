"""Acceptance criteria 1-8.

Each test prints one PASS/FAIL line for its criterion followed by the
individual checks.  Checks marked "gating" decide the criterion; the
corrected forms of identities that do not hold as displayed are printed
next to them as "info".
"""

import json
import time
from dataclasses import dataclass
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from cubicmoments.characters import FamilySpec, family_count_inclusion_exclusion, family_members, member_char
from cubicmoments.cli import main as cli_main
from cubicmoments.cyclo import CycloNumber, QuadExtNumber
from cubicmoments.field import make_field, make_omega_map
from cubicmoments.gauss import (
    GaussSumValue,
    char_sum_via_gauss,
    gauss_count_grids,
    gen_gauss,
    gen_gauss_closed_form,
    gen_gauss_prime_power_collapsed,
    gen_gauss_prime_power_collapsed_many,
    multiplicativity_check,
    twisted_relation_check,
)
from cubicmoments.lfun import (
    afe_check,
    family_batches,
    functional_equation_check,
    l_polynomial,
    rh_diagnostic,
    root_number_from_lpoly,
    root_number_gauss,
    root_number_sum,
)
from cubicmoments.moments import (
    LedgerStore,
    compare_report,
    cube_term_via_series,
    decomposition_check,
    dual_routes,
    s_terms,
)
from cubicmoments.polyring import (
    Poly,
    enumerate_monic,
    enumerate_squarefree,
    frobenius_conjugate,
    gcd,
    is_irreducible,
    lift,
)
from cubicmoments.series import (
    a_q_value,
    arithmetic_direct,
    arithmetic_series,
    b2_identity_check,
    character_series,
    family_count_genfun_check,
    perron_extract,
)


@dataclass
class Check:
    name: str
    passed: bool
    gating: bool = True


def report(number, title, checks, seconds):
    ok = all(c.passed for c in checks if c.gating)
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({seconds:.1f} s)")
    for c in checks:
        tag = ("ok  " if c.passed else "FAIL") if c.gating else ("info" if c.passed else "info FAIL")
        ACCEPTANCE_LINES.append(f"    {tag}  {c.name}")
    print(ACCEPTANCE_LINES[-len(checks) - 1])
    failed = [c.name for c in checks if c.gating and not c.passed]
    assert not failed, failed


SPEC52 = FamilySpec(5, 2)


def test_criterion_1_family_construction():
    t = time.time()
    n0 = len(family_members(FamilySpec(5, 0)))
    members = family_members(SPEC52)
    conductors = [member_char(SPEC52, m).conductor for m in members]
    keys = {F.key for F in conductors}
    closed = all(frobenius_conjugate(F).key in keys for F in conductors)
    oracle0 = family_count_inclusion_exclusion(5, 1)
    oracle2 = family_count_inclusion_exclusion(5, 2)
    pair_reading = family_count_inclusion_exclusion(5, 2, exclude_split_pairs=False)
    seconds = time.time() - t
    checks = [
        Check(f"(5,0) count {n0} = 20 and = inclusion-exclusion {oracle0}", n0 == 20 == oracle0),
        Check(f"(5,2) count {len(members)} = 490", len(members) == 490),
        Check(f"(5,2) count {len(members)} = inclusion-exclusion oracle {oracle2}", len(members) == oracle2, gating=False),
        Check(f"490 reproduced only when split pairs pi*sigma(pi) are admitted: {pair_reading}", pair_reading == 490, gating=False),
        Check("(5,2) family closed under sigma", closed),
        Check(f"runtime {seconds:.2f} s < 5 s", seconds < 5),
    ]
    report(1, "family construction", checks, seconds)


def test_criterion_2_l_function_suite():
    t = time.time()
    g = SPEC52.g
    tally = dict.fromkeys(["a0", "top", "L1", "fe1", "fe2", "rh", "afe", "afe_shift"], 0)
    total = afe_total = 0
    for batch in family_batches(SPEC52, family_members(SPEC52), g + 2):
        for L in batch.lpolys:
            total += 1
            Lc = L.conj()
            tally["a0"] += L.coeffs[0] == (1, 0)
            tally["top"] += L.coeffs[g + 2] == (0, 0)
            tally["L1"] += L.value_at_one() == (0, 0)
            tally["fe1"] += functional_equation_check(L, 1, Lc)
            tally["fe2"] += functional_equation_check(L, 2, Lc)
            tally["rh"] += all(abs(r - 5**-0.5) < 1e-6 for r in rh_diagnostic(L))
            for A in range(2 * g):
                afe_total += 1
                tally["afe"] += afe_check(L, 2, A)
                tally["afe_shift"] += afe_check(L, 2, A, layer_shift=True)
    seconds = time.time() - t

    def frac(key, n=total):
        return f"{tally[key]}/{n}"

    checks = [
        Check(f"family size {total} (490 under the pair-admitting count, see criterion 1)", total == 480, gating=False),
        Check(f"a_0 = 1: {frac('a0')}", tally["a0"] == total),
        Check(f"a_(g+2) = 0: {frac('top')}", tally["top"] == total),
        Check(f"L(1) = 0: {frac('L1')}", tally["L1"] == total),
        Check(f"functional equation k=1: {frac('fe1')}, k=2: {frac('fe2')}", tally["fe1"] == tally["fe2"] == total),
        Check(f"AFE k=2, A in 0..3, displayed weights binom(k+i-1,i): {frac('afe', afe_total)}", tally["afe"] == afe_total),
        Check(
            f"AFE k=2, A in 0..3, weights binom(k+i-1,i) q^(-i/2): {frac('afe_shift', afe_total)}",
            tally["afe_shift"] == afe_total,
            gating=False,
        ),
        Check(f"RH root moduli within 1e-6 of 5^(-1/2): {frac('rh')}", tally["rh"] == total),
        Check(f"runtime {seconds:.1f} s < 300 s", seconds < 300),
    ]
    report(2, "L-function suite over the (5,2) family", checks, seconds)


def test_criterion_3_root_numbers():
    t = time.time()
    tally = dict.fromkeys(["sum_gauss", "lpoly", "square", "abs"], 0)
    total = 0
    one = Poly.one(SPEC52.char_field)
    for m in family_members(SPEC52):
        chi = member_char(SPEC52, m)
        w_sum, w_gauss = root_number_sum(chi), root_number_gauss(chi)
        G = gen_gauss(one, chi.conductor, SPEC52.omega).value
        G2 = QuadExtNumber.from_cyclo(5, (G * G).scale(Fraction(1, 5 ** (SPEC52.g + 2))))
        total += 1
        tally["sum_gauss"] += w_sum == w_gauss
        tally["lpoly"] += w_sum == root_number_from_lpoly(l_polynomial(chi))
        tally["square"] += w_sum * w_sum == G2
        tally["abs"] += abs(abs(w_sum.to_complex()) - 1) < 1e-10
    seconds = time.time() - t
    checks = [
        Check(f"sum definition = Gauss-sum formula: {tally['sum_gauss']}/{total}", tally["sum_gauss"] == total),
        Check(f"sum definition = L-polynomial top coefficient: {tally['lpoly']}/{total}", tally["lpoly"] == total, gating=False),
        Check(f"omega^2 = q^(-g-2) G(1,F)^2: {tally['square']}/{total}", tally["square"] == total),
        Check(f"|omega| = 1 within 1e-10: {tally['abs']}/{total}", tally["abs"] == total),
        Check(f"all {total} characters of the family (490 under the pair-admitting count, see criterion 1)", total == 480, gating=False),
    ]
    report(3, "root numbers over the (5,2) family", checks, seconds)


def _closed_form_grid(omega):
    """Closed form vs direct sums: primes of degree <= 2 over F_25, i <= 4, V = 0 or monic of degree <= 2."""
    base = omega.spec
    primes = [P for d in (1, 2) for P in enumerate_monic(base, d) if is_irreducible(P)]
    Vs = [Poly.zero(base)] + [V for d in range(3) for V in enumerate_monic(base, d)]
    full = collapsed = mismatches = 0
    for P in primes:
        for i in range(1, 5):
            if P.degree * i <= 3:
                grids = gauss_count_grids(Vs, P**i, omega)
                direct = [GaussSumValue(CycloNumber.from_counts(5, gr), V, P**i, base.q) for gr, V in zip(grids, Vs)]
                full += len(Vs)
            else:
                direct = gen_gauss_prime_power_collapsed_many(Vs, P, i, omega)
                collapsed += len(Vs)
            for V, ref in zip(Vs, direct):
                mismatches += not gen_gauss_closed_form(V, P, i, omega).exact_equals(ref)
    return len(primes), full, collapsed, mismatches


def _collapsed_vs_full(omega):
    """The collapsed sum against full enumeration of 25^4 residues on sample moduli."""
    base = omega.spec
    T = Poly.T(base)
    lin = list(enumerate_monic(base, 1))[::9]
    quad = [P for P in enumerate_monic(base, 2) if is_irreducible(P)][::150]
    agree = total = 0
    for P, i in [(P, 4) for P in lin] + [(P, 2) for P in quad]:
        Vs = [Poly.zero(base), Poly.one(base), T, P, P * (T + Poly.one(base)), P**2, P**3, T**2 + Poly.const(base, 7)]
        grids = gauss_count_grids(Vs, P**i, omega)
        for V, gr in zip(Vs, grids):
            total += 1
            agree += CycloNumber.from_counts(5, gr) == gen_gauss_prime_power_collapsed(V, P, i, omega).value
    return agree, total


def test_criterion_4_gauss_sums():
    t = time.time()
    B, F5 = make_field(5, 2), make_field(5, 1)
    omega = make_omega_map(B)
    n_primes, full, collapsed, mismatches = _closed_form_grid(omega)
    agree, sampled = _collapsed_vs_full(omega)

    deg1 = list(enumerate_monic(B, 1))
    small_V = [Poly.zero(B)] + [V for d in range(2) for V in enumerate_monic(B, d)]
    mult = mult_ok = 0
    for a, f1 in enumerate(deg1):
        for f2 in deg1[a + 1 :]:
            for V in small_V:
                mult += 1
                mult_ok += multiplicativity_check(V, f1, f2, omega)
    twist = twist_ok = 0
    units = [Poly.const(B, c) for c in range(1, 25)]
    for f in deg1:
        for a in units + [h for h in deg1 if gcd(h, f).is_one()][::4]:
            for V in small_V[::3]:
                twist += 1
                twist_ok += twisted_relation_check(a, V, f, omega)

    rational = [F for d in range(4) for F in enumerate_squarefree(F5, d)]
    rational_ok = sum(gen_gauss(Poly.one(B), lift(F, B), omega).value == CycloNumber.rational(5, 5**F.degree) for F in rational)

    branches = []
    cubics = list(enumerate_monic(B, 3))[::1500]
    quadratics = list(enumerate_monic(B, 2))[::50]
    for f in cubics:
        branches.append(char_sum_via_gauss(f, 1, omega))
    for f in quadratics:
        branches.append(char_sum_via_gauss(f, 0, omega))
        branches.append(char_sum_via_gauss(f, 1, omega))
    branch_ok = sum(lhs == rhs for lhs, rhs in branches)
    seconds = time.time() - t
    checks = [
        Check(
            f"closed-form table = direct sums over {n_primes} primes, i <= 4, {full} fully enumerated and "
            f"{collapsed} collapsed cases: {full + collapsed - mismatches}/{full + collapsed}",
            mismatches == 0,
        ),
        Check(f"collapsed sum = full 25^4-residue enumeration on sample moduli: {agree}/{sampled}", agree == sampled),
        Check(f"multiplicativity, all coprime linear pairs x {len(small_V)} V: {mult_ok}/{mult}", mult_ok == mult),
        Check(f"twisted relation: {twist_ok}/{twist}", twist_ok == twist),
        Check(f"G(1,F) = 5^deg F, squarefree F in F_5[T], deg <= 3: {rational_ok}/{len(rational)}", rational_ok == len(rational)),
        Check(f"character sum through Gauss sums, both branches: {branch_ok}/{len(branches)}", branch_ok == len(branches)),
        Check(f"runtime {seconds:.1f} s < 120 s", seconds < 120),
    ]
    report(4, "Gauss sums", checks, seconds)


def test_criterion_5_generating_series():
    t = time.time()
    F5 = make_field(5, 1)
    T, one = Poly.T(F5), Poly.one(F5)
    grid = b2_identity_check(5, 4, 3)
    genfun = {name: family_count_genfun_check(5, l, 3) for name, l in [("1", one), ("T", T), ("T(T+1)", T * (T + one))]}
    perron = {}
    for name in ("one", "d2", "d3", "mobius"):
        series, direct = arithmetic_series(5, name, 4), arithmetic_direct(5, name, 4)
        perron[name] = all(perron_extract(series, n) == direct[n] for n in range(5)) and all(
            perron_extract(series, n, "up-to-n") == sum(direct[: n + 1]) for n in range(5)
        )
    chi = member_char(SPEC52, family_members(SPEC52)[17])
    codes = {R.key: chi.value(lift(R, SPEC52.char_field)).code for d in range(1, 5) for R in enumerate_monic(F5, d) if is_irreducible(R)}
    series = character_series(5, codes, 4)
    chi_ok = True
    for n in range(5):
        direct = QuadExtNumber(5)
        for f in enumerate_monic(F5, n):
            v = chi.value(lift(f, SPEC52.char_field))
            if not v.is_zero():
                direct = direct + QuadExtNumber.omega(5, v.exponent)
        chi_ok &= perron_extract(series, n) == direct
    perron["chi-weighted"] = chi_ok
    seconds = time.time() - t
    checks = [Check("B_2 coefficient grid i <= 4, j <= 3 at q = 5", grid)]
    checks += [Check(f"family generating function, l = {name}", ok) for name, ok in genfun.items()]
    checks += [Check(f"Perron extraction = enumeration, {name}, n <= 4", ok) for name, ok in perron.items()]
    checks.append(Check(f"runtime {seconds:.1f} s < 120 s", seconds < 120))
    report(5, "generating-series cross-validation", checks, seconds)


def test_criterion_6_decomposition(spec52, sweep52, layers52):
    t = time.time()
    M2 = sweep52.second_moment
    displayed = {A: decomposition_check(layers52, M2, A) for A in (1, 2)}
    shifted = {A: decomposition_check(layers52, M2, A, layer_weight="shifted") for A in range(4)}
    routes = dual_routes(spec52, layers52)
    literal = [a == b for a, b in zip(routes.definition, routes.via_gauss_literal)]
    product = [a == b for a, b in zip(routes.definition, routes.via_gauss_product)]
    cube = all(s_terms(layers52, t_).prin_cube == cube_term_via_series(spec52, t_) for t_ in range(4))
    seconds = time.time() - t
    checks = [
        Check(f"decomposition with displayed weights (i+1), dual index A+i, A=1: {displayed[1]}, A=2: {displayed[2]}", all(displayed.values())),
        Check(f"decomposition with weights (i+1) q^(-i/2), dual index A+i, A=0..3: {list(shifted.values())}", all(shifted.values()), gating=False),
        Check(f"dual term: definition = route with G(1,F)^2 replaced by q^(g+2), t=0..3: {literal}", all(literal)),
        Check(f"dual term: definition = route G(1,F) G(f,F) q^-(g+2), t=0..3: {product}", all(product), gating=False),
        Check("cube term: enumeration = generating-series coefficients, t=0..3", cube, gating=False),
        Check(f"runtime {seconds:.1f} s < 600 s", seconds < 600),
    ]
    report(6, "decomposition of the (5,2) second moment", checks, seconds)


@pytest.mark.slow
def test_criterion_7_main_term(cache_root):
    t = time.time()
    enc = a_q_value(5, 1e-8)
    ledgers, sweep_seconds = {}, {}
    for q, g in [(5, 2), (5, 4), (11, 2)]:
        spec = FamilySpec(q, g)
        start = time.time()
        ledgers[q, g] = compare_report(spec, jobs=4, store=LedgerStore(cache_root, spec), with_s_terms=(q, g) == (5, 2))
        sweep_seconds[q, g] = time.time() - start
    dev = {k: ledger.relative_deviation for k, ledger in ledgers.items()}
    raw = {
        f"{q},{g}": {"second_moment": led.second_moment.to_complex().real, "main_term": led.main.value, "relative_deviation": dev[q, g]}
        for (q, g), led in ledgers.items()
    }
    archived = all((cache_root / f"q{q}_g{g}" / "report.json").exists() for q, g in ledgers)
    trend = abs(dev[5, 4]) <= abs(dev[5, 2]) or abs(dev[5, 4]) < 0.5
    seconds = time.time() - t
    checks = [
        Check(f"A_q(1/25, 5^(-3/2)) in [{enc.lower:.12f}, {enc.upper:.12f}], width {enc.width:.2e} < 1e-8", enc.width < 1e-8),
        Check("relative deviations " + ", ".join(f"({q},{g}): {d:+.4f}" for (q, g), d in dev.items()), all(d is not None for d in dev.values())),
        Check(f"|dev(5,4)| = {abs(dev[5, 4]):.4f} <= |dev(5,2)| = {abs(dev[5, 2]):.4f} or < 0.5", trend),
        Check(f"raw numbers archived as report.json per (q,g): {json.dumps(raw, sort_keys=True)}", archived),
        Check(f"(5,4) sweep and report {sweep_seconds[5, 4]:.0f} s < 600 s at --jobs 4", sweep_seconds[5, 4] < 600),
    ]
    report(7, "main-term comparison", checks, seconds)


def test_criterion_8_determinism(tmp_path):
    t = time.time()
    one, four = tmp_path / "one", tmp_path / "four"
    codes = [
        cli_main(["sweep", "--q", "5", "--g", "2", "--jobs", "1", "--cache-dir", str(one)]),
        cli_main(["sweep", "--q", "5", "--g", "2", "--jobs", "4", "--cache-dir", str(four)]),
    ]
    same = all((one / "q5_g2" / n).read_bytes() == (four / "q5_g2" / n).read_bytes() for n in ("records.txt", "report.json"))
    before = {p.name: (p.stat().st_mtime_ns, p.read_bytes()) for p in (one / "q5_g2").iterdir()}
    codes.append(cli_main(["sweep", "--q", "5", "--g", "2", "--jobs", "4", "--cache-dir", str(one)]))
    after = {p.name: (p.stat().st_mtime_ns, p.read_bytes()) for p in (one / "q5_g2").iterdir()}
    seconds = time.time() - t
    checks = [
        Check(f"exit codes {codes}", codes == [0, 0, 0]),
        Check("--jobs 4 records and report byte-identical to --jobs 1", same),
        Check("rerun over the cache leaves every file untouched", before == after),
    ]
    report(8, "determinism", checks, seconds)
