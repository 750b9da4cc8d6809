"""Family sweeps, exact first and second moments, S-terms and the comparison report."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np
from mpmath import iv

from .characters import ZERO, FamilySpec, Member, family_members, member_char
from .cyclo import CycloNumber, QuadExtNumber
from .gauss import gauss_count_grids
from .lfun import (
    LPolynomial,
    central_value,
    lpoly_from_codes,
    member_codes,
    s_power,
)
from .polyring import Poly, lift, monic_table
from .series import (
    _to_interval,
    a_q_value,
    b2_rhs,
    outward_bounds,
    family_count_lhs,
    zeta_value,
)

BUDGET = 10**9
SCHEMA_VERSION = "1.0"


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, budget: int = BUDGET):
        super().__init__(f"estimated {estimate:.3e} character evaluations exceeds the budget {budget:.0e}")
        self.estimate = estimate


class CacheCorrupt(ValueError):
    def __init__(self, path: Path, problems: list[tuple[int, str]]):
        lines = "; ".join(f"line {n}: {msg}" for n, msg in problems[:10])
        super().__init__(f"corrupt cache {path}: {lines}")
        self.problems = problems


def sweep_cost(spec: FamilySpec) -> int:
    """Upper estimate: (monic F over F_{q^2} of degree m) x (monic f over F_q of degree <= g+2)."""
    q = spec.q
    return q ** (2 * spec.m) * (q ** (spec.g + 3) - 1) // (q - 1)


def check_budget(spec: FamilySpec, force: bool = False, budget: int = BUDGET) -> None:
    est = sweep_cost(spec)
    if est > budget and not force:
        raise BudgetExceeded(est, budget)


# --- per-character records ---------------------------------------------------------

@dataclass(frozen=True)
class CharRecord:
    conductor: str
    lpoly: LPolynomial
    central: QuadExtNumber

    def to_line(self) -> str:
        coeffs = ",".join(f"{a}:{b}" for a, b in self.lpoly.coeffs)
        return "\t".join([self.conductor, coeffs, ",".join(self.central.to_strings())])

    @classmethod
    def from_line(cls, line: str, q: int, g: int) -> CharRecord:
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 3:
            raise ValueError(f"expected 3 tab-separated fields, got {len(parts)}")
        conductor, coeffs, central = parts
        pairs = []
        for item in coeffs.split(","):
            a, b = item.split(":")
            pairs.append((int(a), int(b)))
        if len(pairs) != g + 3:
            raise ValueError(f"expected {g + 3} L-coefficients, got {len(pairs)}")
        L = LPolynomial(q, g, tuple(pairs))
        value = QuadExtNumber.from_strings(q, central.split(","))
        if value != central_value(L, 1):
            raise ValueError("central value does not match the L-coefficients")
        return cls(conductor, L, value)


def _conductor_string(spec: FamilySpec, member: Member) -> str:
    return member_char(spec, member).encode()


def _records_for(args) -> list[str]:
    q, g, alternate, start, stop, chunk = args
    spec = FamilySpec(q, g, alternate)
    members = family_members(spec)[start:stop]
    table = monic_table(spec.base_field, g + 2)
    out = []
    for i in range(0, len(members), chunk):
        part = members[i : i + chunk]
        lpolys = lpoly_from_codes(member_codes(spec, part, table), table, q, g)
        for m, L in zip(part, lpolys):
            out.append(CharRecord(_conductor_string(spec, m), L, central_value(L, 1)).to_line())
    return out


# --- the ledger store --------------------------------------------------------------

def default_cache_dir() -> Path:
    return Path(os.environ.get("CACHE_DIR", Path.home() / ".cache" / "cubicmoments"))


class LedgerStore:
    """One directory per (q, g, omega choice): records.txt and report.json."""

    def __init__(self, root: Path | str, spec: FamilySpec):
        tag = f"q{spec.q}_g{spec.g}" + ("_alt" if spec.alternate_omega else "")
        self.spec = spec
        self.dir = Path(root) / tag
        self.records_path = self.dir / "records.txt"
        self.report_path = self.dir / "report.json"

    def load(self) -> dict[str, CharRecord]:
        if not self.records_path.exists():
            return {}
        out: dict[str, CharRecord] = {}
        problems = []
        with open(self.records_path, encoding="utf-8") as fh:
            for n, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = CharRecord.from_line(line, self.spec.q, self.spec.g)
                except (ValueError, ZeroDivisionError) as exc:
                    problems.append((n, str(exc)))
                    continue
                out[rec.conductor] = rec
        if problems:
            raise CacheCorrupt(self.records_path, problems)
        return out

    @staticmethod
    def _write_if_changed(path: Path, text: str) -> bool:
        if path.exists() and path.read_text(encoding="utf-8") == text:
            return False
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)
        return True

    def save_records(self, lines: Sequence[str]) -> bool:
        return self._write_if_changed(self.records_path, "".join(line + "\n" for line in lines))

    def save_report(self, report: dict) -> bool:
        return self._write_if_changed(self.report_path, json.dumps(report, indent=2, sort_keys=True) + "\n")


# --- sweep --------------------------------------------------------------------------

@dataclass
class SweepResult:
    spec: FamilySpec
    records: list[CharRecord]

    @property
    def count(self) -> int:
        return len(self.records)

    @property
    def first_moment(self) -> QuadExtNumber:
        total = QuadExtNumber(self.spec.q)
        for r in self.records:
            total = total + r.central
        return total

    @property
    def second_moment(self) -> QuadExtNumber:
        total = QuadExtNumber(self.spec.q)
        for r in self.records:
            total = total + r.central * r.central
        return total

    def lines(self) -> list[str]:
        return [r.to_line() for r in self.records]


def sweep(
    spec: FamilySpec,
    jobs: int = 1,
    store: LedgerStore | None = None,
    force: bool = False,
    chunk: int = 512,
) -> SweepResult:
    """Every family character's L-polynomial and central value, in canonical order.

    With a store, characters already on disk are reused and the records file
    is rewritten only when its content would change.
    """
    check_budget(spec, force)
    members = family_members(spec)
    cached = store.load() if store else {}
    names = [_conductor_string(spec, m) for m in members] if cached else None
    todo = [i for i, name in enumerate(names) if name not in cached] if cached else list(range(len(members)))

    computed: dict[int, str] = {}
    if todo:
        # contiguous index ranges, reduced in index order
        ranges = _ranges(todo)
        pieces = []
        for lo, hi in ranges:
            step = max(chunk, -(-(hi - lo) // max(jobs, 1)))
            pieces.extend((lo_, min(lo_ + step, hi)) for lo_ in range(lo, hi, step))
        args = [(spec.q, spec.g, spec.alternate_omega, lo, hi, chunk) for lo, hi in pieces]
        if jobs > 1 and len(args) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_records_for, args))
        else:
            results = [_records_for(a) for a in args]
        for (lo, _), lines in zip(pieces, results):
            for k, line in enumerate(lines):
                computed[lo + k] = line

    records = []
    for i in range(len(members)):
        if i in computed:
            records.append(CharRecord.from_line(computed[i], spec.q, spec.g))
        else:
            records.append(cached[names[i]])
    result = SweepResult(spec, records)
    if store:
        store.save_records(result.lines())
    return result


def _ranges(indices: list[int]) -> list[tuple[int, int]]:
    out = []
    for i in indices:
        if out and out[-1][1] == i:
            out[-1] = (out[-1][0], i + 1)
        else:
            out.append((i, i + 1))
    return out


# --- S-terms ------------------------------------------------------------------------------

def _omega_pairs_mul(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0] - x[1] * y[1]


def _omega_weighted_rows(codes: np.ndarray, weights: np.ndarray, block: int = 16384) -> np.ndarray:
    """Per row: sum over columns of weights[col] * omega^codes[row, col] as int pairs."""
    out = np.zeros((codes.shape[0], 2), dtype=np.int64)
    for lo in range(0, codes.shape[0], block):
        blk = codes[lo : lo + block]
        parts = [(blk == k).astype(np.float64) @ weights for k in range(3)]
        # omega^1 * (a + b w) = -b + (a - b) w ;  omega^2 * (a + b w) = (b - a) - a w
        a = parts[0][:, 0] - parts[1][:, 1] + parts[2][:, 1] - parts[2][:, 0]
        b = parts[0][:, 1] + parts[1][:, 0] - parts[1][:, 1] - parts[2][:, 0]
        out[lo : lo + block, 0] = np.rint(a).astype(np.int64)
        out[lo : lo + block, 1] = np.rint(b).astype(np.int64)
    return out


@dataclass
class STermData:
    """Layer sums from which all S-terms at every t are assembled."""

    spec: FamilySpec
    prin: list[tuple[int, int]]  # sum_{f in M_n} d(f) sum_F chi_F(f)
    prin_cube: list[tuple[int, int]]
    dual_def: list[tuple[Fraction, Fraction]]  # sum_F omega_F^2 sum_{f in M_n} d(f) conj chi_F(f)
    cube_counts: dict[int, list[int]] = field(default_factory=dict)  # deg l -> [sum d(l^3) #coprime F]


def s_term_layers(spec: FamilySpec, chunk: int = 512) -> STermData:
    """Direct double sums over family members and monic f of degree <= 2g - 1."""
    q, g = spec.q, spec.g
    N = max(2 * g - 1, g + 2, 1)
    table = monic_table(spec.base_field, N)
    d2 = table.divisor_counts(2)
    members = family_members(spec)
    # cube indices: l^3 for l of degree <= N // 3
    cube_rows: dict[int, list[tuple[int, int]]] = {}
    for n in range(N // 3 + 1):
        for idx in range(table.layer(n).start, table.layer(n).stop):
            l = table.poly(idx)
            cube_rows.setdefault(n, []).append((idx, table.index_of(l**3)))
    prin = np.zeros((N + 1, 2), dtype=object)
    prin_cube = np.zeros((N + 1, 2), dtype=object)
    dual = [[Fraction(0), Fraction(0)] for _ in range(N + 1)]
    cube_counts = {n: 0 for n in cube_rows}
    is_cube = np.zeros(table.size, dtype=bool)
    for rows in cube_rows.values():
        for _, c in rows:
            is_cube[c] = True
    for start in range(0, len(members), chunk):
        part = members[start : start + chunk]
        codes = member_codes(spec, part, table)
        # X(f) = sum_F chi_F(f) as (count0 - count2, count1 - count2)
        cnt = [(codes == c).sum(axis=1).astype(np.int64) for c in range(3)]
        X = np.stack([cnt[0] - cnt[2], cnt[1] - cnt[2]])
        for n in range(N + 1):
            sl = table.layer(n)
            w = d2[sl]
            prin[n, 0] += int(w @ X[0, sl])
            prin[n, 1] += int(w @ X[1, sl])
            cw = w * is_cube[sl]
            prin_cube[n, 0] += int(cw @ X[0, sl])
            prin_cube[n, 1] += int(cw @ X[1, sl])
        for n, rows in cube_rows.items():
            for _, c in rows:
                # chi_F(l^3) is 1 or 0, so count0 counts F coprime to l
                cube_counts[n] += int(d2[c]) * int(cnt[0][c])
        # dual by definition: omega_F^2 = q^-g a_{g+1}^2, summed over F per f first.
        # Entries of a_{g+1}^2 are small integers, so float64 products are exact.
        lpolys = lpoly_from_codes(codes, table, q, g)
        top = np.array([L.coeffs[g + 1] for L in lpolys], dtype=np.int64).T
        w2 = np.stack(_omega_pairs_mul(top, top), axis=1).astype(np.float64)  # (members, 2)
        conj = np.where(codes == ZERO, ZERO, (2 * codes) % 3)
        Y = _omega_weighted_rows(conj, w2)  # (rows, 2): sum_F omega_F^2 conj chi_F(f)
        for n in range(N + 1):
            sl = table.layer(n)
            w = d2[sl]
            dual[n][0] += Fraction(int(w @ Y[sl, 0]), q**g)
            dual[n][1] += Fraction(int(w @ Y[sl, 1]), q**g)
    return STermData(
        spec,
        [(int(a), int(b)) for a, b in prin],
        [(int(a), int(b)) for a, b in prin_cube],
        [(a, b) for a, b in dual],
        {n: [v] for n, v in cube_counts.items()},
    )


def _accumulate(q: int, layers, upto: int) -> QuadExtNumber:
    total = QuadExtNumber(q)
    for n in range(0, min(upto, len(layers) - 1) + 1):
        a, b = layers[n]
        total = total + QuadExtNumber(q, a, b) * s_power(q, n)
    return total


@dataclass(frozen=True)
class STerms:
    t: int
    prin: QuadExtNumber
    prin_cube: QuadExtNumber
    prin_noncube: QuadExtNumber
    dual: QuadExtNumber


def s_terms(data: STermData, t: int) -> STerms:
    spec = data.spec
    q, g = spec.q, spec.g
    if not 0 <= t <= 2 * g - 1:
        raise ValueError(f"t must lie in 0..{2 * g - 1}")
    prin = _accumulate(q, data.prin, t)
    cube = _accumulate(q, data.prin_cube, t)
    dual = _accumulate(q, data.dual_def, 2 * g - t - 1)
    return STerms(t, prin, cube, prin - cube, dual)


def s_dual(data: STermData, t: int) -> QuadExtNumber:
    """S_{t,dual}; zero when the f-range M_{<= 2g-t-1} is empty."""
    q, g = data.spec.q, data.spec.g
    if 2 * g - t - 1 < 0:
        return QuadExtNumber(q)
    return _accumulate(q, data.dual_def, 2 * g - t - 1)


def s_prin(data: STermData, t: int) -> QuadExtNumber:
    return _accumulate(data.spec.q, data.prin, t)


def cube_term_via_series(spec: FamilySpec, t: int) -> QuadExtNumber:
    """S_{t,prin,cube} from B_2 coefficients: sum_{i <= t/3} q^(-3i/2) [u^i z^m] B_2."""
    q = spec.q
    t0 = t // 3
    B = b2_rhs(q, t0, spec.m)
    total = QuadExtNumber(q)
    for i in range(t0 + 1):
        total = total + QuadExtNumber(q, B[i, spec.m]) * s_power(q, 3 * i)
    return total


def cube_term_via_counts(spec: FamilySpec, t: int) -> QuadExtNumber:
    """sum over l of degree <= t/3 of d(l^3) q^(-3 deg l / 2) #{F coprime to l}, by enumeration."""
    q = spec.q
    small = spec.base_field
    table = monic_table(small, max(t // 3, 1))
    d2 = monic_table(small, max(3 * (t // 3), 1)).divisor_counts(2)
    big = monic_table(small, max(3 * (t // 3), 1))
    total = QuadExtNumber(q)
    for n in range(t // 3 + 1):
        layer_total = 0
        for idx in range(table.layer(n).start, table.layer(n).stop):
            l = table.poly(idx)
            coprime = family_count_lhs(q, l, spec.m)[spec.m]
            layer_total += int(d2[big.index_of(l**3)]) * coprime
        total = total + QuadExtNumber(q, layer_total) * s_power(q, 3 * n)
    return total


# --- dual terms through Gauss sums ---------------------------------------------------------

@dataclass(frozen=True)
class DualRoutes:
    """S_{t,dual} for every t by three routes."""

    definition: list[QuadExtNumber]
    via_gauss_product: list[QuadExtNumber]  # q^-(g+2) sum G(1,F) G(f,F), coprime pairs
    via_gauss_literal: list[QuadExtNumber]  # q^-(g/2+1) sum G(f,F), coprime pairs


def dual_routes(spec: FamilySpec, data: STermData) -> DualRoutes:
    """Gauss-sum evaluations of the dual layers, feasible when q^(2m) residues are few."""
    q, g = spec.q, spec.g
    base = spec.char_field
    omega = spec.omega
    p = base.p
    N = 2 * g - 1
    table = monic_table(spec.base_field, max(N, 1))
    d2 = table.divisor_counts(2)
    fs = [table.poly(i) for i in range(int(table.offsets[N + 1]))]
    Vs = [Poly.one(base)] + [lift(f, base) for f in fs]
    prod_layers = [CycloNumber.zero(p) for _ in range(N + 1)]
    lit_layers = np.zeros((N + 1, p, 3), dtype=np.int64)
    members = family_members(spec)
    for start in range(0, len(members), 512):
        part = members[start : start + 512]
        codes = member_codes(spec, part, table)[: len(fs)]
        for col, m in enumerate(part):
            chi = member_char(spec, m)
            grids = gauss_count_grids(Vs, chi.conductor, omega)
            g1 = CycloNumber.from_counts(p, grids[0])
            coprime = codes[:, col] != ZERO
            weights = d2[: len(fs)] * coprime
            per_layer = np.zeros((N + 1, p, 3), dtype=np.int64)
            for n in range(N + 1):
                sl = table.layer(n)
                per_layer[n] = np.tensordot(weights[sl], grids[1:][sl], axes=1)
            lit_layers += per_layer
            for n in range(N + 1):
                prod_layers[n] = prod_layers[n] + g1 * CycloNumber.from_counts(p, per_layer[n])

    def assemble(layers_q: list[QuadExtNumber], t: int) -> QuadExtNumber:
        total = QuadExtNumber(q)
        for n in range(0, 2 * g - t):
            total = total + layers_q[n] * s_power(q, n)
        return total

    prod_q = [QuadExtNumber.from_cyclo(q, x.scale(Fraction(1, q ** (g + 2)))) for x in prod_layers]
    lit_q = [
        QuadExtNumber.from_cyclo(q, CycloNumber.from_counts(p, lit_layers[n]).scale(Fraction(1, q ** (g // 2 + 1))))
        for n in range(N + 1)
    ]
    ts = range(0, 2 * g)
    return DualRoutes(
        [s_dual(data, t) for t in ts],
        [assemble(prod_q, t) for t in ts],
        [assemble(lit_q, t) for t in ts],
    )


# --- the decomposition -----------------------------------------------------------------------

def decomposition_value(data: STermData, A: int, dual_index: str = "A+i", layer_weight: str = "plain") -> QuadExtNumber:
    """(1 - q^-1/2)^2 (sum (i+1) S_{A-i,prin} + sum (i+1) S_{idx,dual}).

    dual_index: "A+i" (matches the approximate functional equation) or
    "2g-A-1+i" (as displayed).  layer_weight: "plain" uses i+1; "shifted"
    uses (i+1) q^(-i/2), the weight the expansion at u = q^(-1/2) produces.
    """
    q, g = data.spec.q, data.spec.g
    if not 0 <= A <= 2 * g - 1:
        raise ValueError(f"A must lie in 0..{2 * g - 1}")

    def weight(i: int) -> QuadExtNumber:
        w = QuadExtNumber(q, i + 1)
        return w * s_power(q, i) if layer_weight == "shifted" else w

    total = QuadExtNumber(q)
    for i in range(A + 1):
        total = total + weight(i) * s_prin(data, A - i)
    for i in range(2 * g - A):
        t = A + i if dual_index == "A+i" else 2 * g - A - 1 + i
        total = total + weight(i) * s_dual(data, t)
    return (1 - QuadExtNumber.s(q)) ** 2 * total


def decomposition_check(data: STermData, second_moment: QuadExtNumber, A: int, **kw) -> bool:
    return decomposition_value(data, A, **kw) == second_moment


# --- main term and report ----------------------------------------------------------------------

@dataclass
class MainTerm:
    lower: Decimal
    upper: Decimal
    a_q_lower: Decimal
    a_q_upper: Decimal
    a_q_degree: int

    @property
    def value(self) -> float:
        return float((self.lower + self.upper) / 2)

    @property
    def width(self) -> float:
        return float(self.upper - self.lower)


def main_term(spec: FamilySpec, tol: float = 1e-12) -> MainTerm:
    """g(g+2) A_q(1/q^2, 1/q^(3/2)) zeta_q(3/2)^2 / (8 zeta_q(3)) q^(g+2)."""
    q, g = spec.q, spec.g
    enc = a_q_value(q, tol)
    z32 = zeta_value(q, Fraction(3, 2))
    z3 = zeta_value(q, 3)
    exact = z32 * z32 / z3 * Fraction(g * (g + 2) * q ** (g + 2), 8)
    saved = iv.prec
    iv.prec = 120
    try:
        val = _to_interval(exact) * enc.interval()
        return MainTerm(*outward_bounds(val), enc.lower, enc.upper, enc.truncation_degree)
    finally:
        iv.prec = saved


def quad_json(x: QuadExtNumber) -> dict:
    return {"basis": ["1", "omega", "s", "omega*s"], "exact": x.to_strings(), "float": x.to_complex().real}


@dataclass
class MomentLedger:
    spec: FamilySpec
    family_count: int
    first_moment: QuadExtNumber
    second_moment: QuadExtNumber
    s_table: list[STerms] = field(default_factory=list)
    main: MainTerm | None = None

    @property
    def relative_deviation(self) -> float | None:
        if self.main is None or self.main.value == 0:
            return None
        return (self.second_moment.to_complex().real - self.main.value) / self.main.value

    def to_json(self) -> dict:
        q, g = self.spec.q, self.spec.g
        out = {
            "kind": "report",
            "schema_version": SCHEMA_VERSION,
            "q": q,
            "g": g,
            "alternate_omega": self.spec.alternate_omega,
            "family_count": self.family_count,
            "first_moment": quad_json(self.first_moment),
            "second_moment": quad_json(self.second_moment),
            "second_moment_is_real": self.second_moment.is_real(),
            "s_terms": [
                {
                    "t": s.t,
                    "t0": s.t // 3,
                    "t1": s.t % 3,
                    "prin": quad_json(s.prin),
                    "prin_cube": quad_json(s.prin_cube),
                    "prin_noncube": quad_json(s.prin_noncube),
                    "dual": quad_json(s.dual),
                    "noncube_envelope_float": abs(s.prin_noncube.to_complex()) / q ** (s.t / 2),
                }
                for s in self.s_table
            ],
        }
        if self.main is not None:
            out["main_term"] = {
                "lower": str(self.main.lower),
                "upper": str(self.main.upper),
                "value_float": self.main.value,
                "a_q_lower": str(self.main.a_q_lower),
                "a_q_upper": str(self.main.a_q_upper),
                "a_q_truncation_degree": self.main.a_q_degree,
            }
            out["relative_deviation_float"] = self.relative_deviation
        return out


def ledger_from_json(data: dict) -> MomentLedger:
    """Rebuild the exact fields of a report (floats are not read back)."""
    spec = FamilySpec(data["q"], data["g"], data.get("alternate_omega", False))
    q = spec.q

    def quad(d):
        return QuadExtNumber.from_strings(q, d["exact"])

    table = [
        STerms(s["t"], quad(s["prin"]), quad(s["prin_cube"]), quad(s["prin_noncube"]), quad(s["dual"]))
        for s in data.get("s_terms", [])
    ]
    main = None
    if "main_term" in data:
        m = data["main_term"]
        bounds = (Decimal(m[k]) for k in ("lower", "upper", "a_q_lower", "a_q_upper"))
        main = MainTerm(*bounds, m["a_q_truncation_degree"])
    return MomentLedger(spec, data["family_count"], quad(data["first_moment"]), quad(data["second_moment"]), table, main)


def compare_report(
    spec: FamilySpec,
    jobs: int = 1,
    store: LedgerStore | None = None,
    with_s_terms: bool = True,
    force: bool = False,
) -> MomentLedger:
    result = sweep(spec, jobs=jobs, store=store, force=force)
    ledger = MomentLedger(spec, result.count, result.first_moment, result.second_moment)
    if with_s_terms and spec.g > 0:
        data = s_term_layers(spec)
        ledger.s_table = [s_terms(data, t) for t in range(2 * spec.g)]
    ledger.main = main_term(spec)
    if store:
        store.save_report(ledger.to_json())
    return ledger
