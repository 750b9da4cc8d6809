"""L-polynomials of the restricted characters, root numbers, functional equations.

Elements of Z[omega] are carried as integer pairs (a, b) meaning a + b*omega
in the vectorized paths and as QuadExtNumber at the API boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Sequence

import numpy as np

from .characters import (
    ZERO,
    CubicChar,
    FamilySpec,
    Member,
    member_char,
    residue_model,
)
from .cyclo import QuadExtNumber
from .field import embedding, make_field
from .polyring import MonicTable, combine_codes, monic_table

OmegaInt = tuple[int, int]


def omega_mul(x: OmegaInt, y: OmegaInt) -> OmegaInt:
    a, b = x
    c, d = y
    return a * c - b * d, a * d + b * c - b * d


def omega_conj(x: OmegaInt) -> OmegaInt:
    a, b = x
    return a - b, -b


def as_quad(q: int, x) -> QuadExtNumber:
    return QuadExtNumber(q, x[0], x[1])


def s_power(q: int, n: int) -> QuadExtNumber:
    """s^n with s^2 = 1/q."""
    if n % 2 == 0:
        return QuadExtNumber(q, Fraction(1, q ** (n // 2)))
    return QuadExtNumber(q, 0, 0, Fraction(1, q ** (n // 2)))


# --- vectorized evaluation over a whole batch of characters ---------------------

def char_prime_codes(chars: Sequence[CubicChar], table: MonicTable) -> np.ndarray:
    """chi(R) codes for every prime R in `table` (rows) and character (columns)."""
    small = table.spec
    rows = table.coeffs[table.primes]
    cache: dict[tuple[int, int], np.ndarray] = {}
    out = np.zeros((rows.shape[0], len(chars)), dtype=np.int8)
    for col, chi in enumerate(chars):
        lifted = embedding(small, chi.base)[rows]
        acc = np.zeros(rows.shape[0], dtype=np.int8)
        for prime, e in zip(chi.primes, chi.exponents):
            k = (prime.degree, prime.key)
            if k not in cache:
                model = residue_model(chi.base, prime.degree, chi.omega)
                cache[k] = model.codes(lifted, model.root(prime))
            codes = cache[k]
            if e == 2:
                codes = np.where(codes == ZERO, ZERO, (2 * codes) % 3).astype(np.int8)
            acc = combine_codes(acc, codes)
        out[:, col] = acc
    return out


def member_codes(spec: FamilySpec, members: Sequence[Member], table: MonicTable) -> np.ndarray:
    from .characters import member_prime_codes

    prime_codes = member_prime_codes(spec, members, table.coeffs[table.primes])
    return table.multiplicative(prime_codes)


def layer_sums(codes: np.ndarray, table: MonicTable, n: int, weights: np.ndarray | None = None) -> np.ndarray:
    """Per column: sum over f in M_n of weight(f) * omega^code(f), as (2, cols) ints."""
    block = codes[table.layer(n)]
    w = None if weights is None else weights[table.layer(n)]
    cnt = []
    for c in range(3):
        mask = block == c
        cnt.append(mask.sum(axis=0) if w is None else w @ mask)
    c0, c1, c2 = (np.asarray(x, dtype=np.int64) for x in cnt)
    return np.stack([c0 - c2, c1 - c2])


# --- L-polynomial ---------------------------------------------------------------

@dataclass(frozen=True)
class LPolynomial:
    """L(u, chi) = sum a_n u^n; coefficients for n = 0..g+2 as pairs on {1, omega}."""

    q: int
    g: int
    coeffs: tuple[OmegaInt, ...]

    def a(self, n: int) -> QuadExtNumber:
        return as_quad(self.q, self.coeffs[n]) if n < len(self.coeffs) else QuadExtNumber(self.q)

    def conj(self) -> LPolynomial:
        return LPolynomial(self.q, self.g, tuple(omega_conj(c) for c in self.coeffs))

    def value_at_one(self) -> OmegaInt:
        return sum(a for a, _ in self.coeffs), sum(b for _, b in self.coeffs)

    def quotient(self) -> list[OmegaInt]:
        """Coefficients of L(u)/(1 - u) up to u^g (the trivial zero removed)."""
        out, a_acc, b_acc = [], 0, 0
        for a, b in self.coeffs[: self.g + 1]:
            a_acc += a
            b_acc += b
            out.append((a_acc, b_acc))
        return out

    def complex_coeffs(self) -> list[complex]:
        w = complex(-0.5, 3**0.5 / 2)
        return [a + b * w for a, b in self.coeffs]


def lpoly_from_codes(codes: np.ndarray, table: MonicTable, q: int, g: int) -> list[LPolynomial]:
    sums = [layer_sums(codes, table, n) for n in range(g + 3)]
    out = []
    for col in range(codes.shape[1]):
        out.append(LPolynomial(q, g, tuple((int(s[0, col]), int(s[1, col])) for s in sums)))
    return out


def l_polynomial(chi: CubicChar, q: int | None = None) -> LPolynomial:
    if not chi.primes:
        raise ValueError("trivial character has no primitive L-polynomial")
    small = make_field(chi.base.p, chi.base.e // 2)
    g = chi.genus
    table = monic_table(small, g + 2)
    codes = table.multiplicative(char_prime_codes([chi], table))
    return lpoly_from_codes(codes, table, small.q, g)[0]


def rh_diagnostic(L: LPolynomial) -> list[float]:
    """Moduli of the roots of L(u)/(1 - u); all should equal q^(-1/2)."""
    if L.value_at_one() != (0, 0):
        raise ValueError("L(1) != 0: trivial zero missing")
    w = complex(-0.5, 3**0.5 / 2)
    quot = [a + b * w for a, b in L.quotient()]
    while quot and quot[-1] == 0:
        quot.pop()
    if len(quot) <= 1:
        return []
    roots = np.roots(quot[::-1])
    return sorted(float(abs(r)) for r in roots)


def weil_product(L: LPolynomial) -> list[OmegaInt]:
    """Coefficients of L_C(u, chi) * L_C(u, conj chi); integers iff b-parts vanish."""
    a = L.quotient()
    b = L.conj().quotient()
    out = [(0, 0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            p = omega_mul(x, y)
            out[i + j] = (out[i + j][0] + p[0], out[i + j][1] + p[1])
    return out


# --- root numbers -----------------------------------------------------------------

def root_number_from_lpoly(L: LPolynomial) -> QuadExtNumber:
    """-q^(-g/2) a_{g+1}: the sum over monic f of degree deg(h) - 1 = g + 1."""
    if L.g % 2:
        raise ValueError("odd genus gives an irrational normalisation")
    a, b = L.coeffs[L.g + 1]
    scale = Fraction(-1, L.q ** (L.g // 2))
    return QuadExtNumber(L.q, a * scale, b * scale)


def root_number_sum(chi: CubicChar) -> QuadExtNumber:
    """Root number of an even character from its degree g+1 character sum.

    Characters built here restrict to F_q[T] with q = 2 mod 3 and so are
    always even; an odd restriction is rejected.
    """
    if any(e not in (1, 2) for e in chi.exponents):
        raise ValueError("not a primitive cubic character")
    small = make_field(chi.base.p, chi.base.e // 2)
    if small.q % 3 != 2:
        raise ValueError("odd characters are outside the supported family")
    return root_number_from_lpoly(l_polynomial(chi))


def root_number_gauss(chi: CubicChar) -> QuadExtNumber:
    """q^(-1/2) q^(-(deg h - 1)/2) G(chi) with h = F sigma(F), deg h = g + 2."""
    from .gauss import gauss_full

    q = make_field(chi.base.p, chi.base.e // 2).q
    G = gauss_full(chi)
    scale = Fraction(1, q ** ((chi.genus + 2) // 2))
    return QuadExtNumber.from_cyclo(q, G.value.scale(scale))


# --- b_n coefficients, functional equation, central values -----------------------

def power_coeffs(coeffs: Sequence[OmegaInt], k: int, length: int) -> list[OmegaInt]:
    out: list[OmegaInt] = [(1, 0)] + [(0, 0)] * (length - 1)
    for _ in range(k):
        new = [(0, 0)] * length
        for i, x in enumerate(out):
            if x == (0, 0):
                continue
            for j, y in enumerate(coeffs):
                if i + j >= length:
                    break
                p = omega_mul(x, y)
                new[i + j] = (new[i + j][0] + p[0], new[i + j][1] + p[1])
        out = new
    return out


def fe_coeffs(L: LPolynomial, k: int) -> list[OmegaInt]:
    """b_n of (L(u)/(1-u))^k for n = 0..kg."""
    return power_coeffs(L.quotient(), k, k * L.g + 1)


def functional_equation_check(L: LPolynomial, k: int, L_conj: LPolynomial | None = None) -> bool:
    """b_n(chi) == b_{kg-n}(conj chi) * omega(chi)^k * q^(n - kg/2) for all n."""
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    q, g = L.q, L.g
    kg = k * g
    Lc = L.conj() if L_conj is None else L_conj
    b = fe_coeffs(L, k)
    bc = fe_coeffs(Lc, k)
    w = root_number_from_lpoly(L) ** k
    for n in range(kg + 1):
        lhs = as_quad(q, b[n])
        e = n - kg // 2
        scale = Fraction(q) ** e
        rhs = as_quad(q, bc[kg - n]) * w * QuadExtNumber(q, scale)
        if lhs != rhs:
            return False
    # nothing beyond degree kg
    return all(x == (0, 0) for x in power_coeffs(L.quotient(), k, kg + 3)[kg + 1 :])


def central_value(L: LPolynomial, k: int = 1) -> QuadExtNumber:
    q = L.q
    v = QuadExtNumber(q)
    for n, c in enumerate(L.coeffs):
        if c != (0, 0):
            v = v + as_quad(q, c) * s_power(q, n)
    return v**k


def dk_sums_from_lpoly(L: LPolynomial, k: int, N: int) -> list[OmegaInt]:
    """sum_{f in M_n} chi(f) d_k(f) as coefficients of L(u)^k, n = 0..N."""
    return power_coeffs(L.coeffs, k, N + 1)


def afe_value(
    q: int,
    g: int,
    k: int,
    A: int,
    sums: Sequence[OmegaInt],
    conj_sums: Sequence[OmegaInt],
    root_number: QuadExtNumber,
    layer_shift: bool = False,
) -> QuadExtNumber:
    """Right side of the approximate functional equation for an even character.

    sums[n] = sum over f in M_n of chi(f) d_k(f); conj_sums likewise for
    the conjugate character.  Both are needed up to n = kg - 1.

    With layer_shift=False the i-th binomial layer is weighted by
    binom(k+i-1, i) alone.  Expanding (1-u)^(-k) L(u)^k at u = q^(-1/2)
    actually attaches binom(k+i-1, i) q^(-i/2) to that layer; layer_shift=True
    uses this weight and is the version that equals L(1/2)^k.
    """
    kg = k * g
    if not 0 <= A <= kg - 1:
        raise ValueError(f"A must lie in 0..{kg - 1}")
    weighted = [as_quad(q, x) * s_power(q, n) for n, x in enumerate(sums[:kg])]
    weighted_c = [as_quad(q, x) * s_power(q, n) for n, x in enumerate(conj_sums[:kg])]

    def prefix(vals, upto):
        acc = QuadExtNumber(q)
        for v in vals[: upto + 1]:
            acc = acc + v
        return acc

    def weight(i):
        w = QuadExtNumber(q, comb(k + i - 1, i))
        return w * s_power(q, i) if layer_shift else w

    first = QuadExtNumber(q)
    for i in range(A + 1):
        first = first + prefix(weighted, A - i) * weight(i)
    second = QuadExtNumber(q)
    for i in range(kg - A):
        second = second + prefix(weighted_c, kg - A - 1 - i) * weight(i)
    pre = (QuadExtNumber(q, 1) - QuadExtNumber.s(q)) ** k
    return pre * (first + root_number**k * second)


def afe_check(L: LPolynomial, k: int, A: int, sums=None, conj_sums=None, layer_shift: bool = False) -> bool:
    """Compare the approximate functional equation with L(1/2)^k exactly."""
    kg = k * L.g
    sums = dk_sums_from_lpoly(L, k, kg) if sums is None else sums
    conj_sums = dk_sums_from_lpoly(L.conj(), k, kg) if conj_sums is None else conj_sums
    rhs = afe_value(L.q, L.g, k, A, sums, conj_sums, root_number_from_lpoly(L), layer_shift)
    return rhs == central_value(L, k)


# --- family-level data --------------------------------------------------------------

@dataclass
class FamilyBatch:
    """Codes of a batch of family characters on every monic f up to degree N."""

    spec: FamilySpec
    members: list[Member]
    table: MonicTable
    codes: np.ndarray

    @cached_property
    def lpolys(self) -> list[LPolynomial]:
        return lpoly_from_codes(self.codes, self.table, self.spec.q, self.spec.g)

    def dk_sums(self, k: int) -> np.ndarray:
        """Array (N+1, 2, members) of sum_{f in M_n} chi(f) d_k(f)."""
        d = self.table.divisor_counts(k)
        return np.stack([layer_sums(self.codes, self.table, n, d) for n in range(self.table.N + 1)])

    def conj_codes(self) -> np.ndarray:
        c = self.codes
        return np.where(c == ZERO, ZERO, (2 * c) % 3).astype(np.int8)

    def chars(self) -> list[CubicChar]:
        return [member_char(self.spec, m) for m in self.members]


def family_batches(spec: FamilySpec, members: Sequence[Member], N: int, chunk: int = 512):
    table = monic_table(spec.base_field, N)
    for start in range(0, len(members), chunk):
        part = list(members[start : start + chunk])
        yield FamilyBatch(spec, part, table, member_codes(spec, part, table))
