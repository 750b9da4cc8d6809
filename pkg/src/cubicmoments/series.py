"""Truncated power series, zeta series, Euler products and the A_q factor.

Coefficients are exact: Fractions by default, anything with ring
operations (e.g. QuadExtNumber) when the caller supplies it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal

from mpmath import iv, libmp

from .cyclo import QuadExtNumber
from .field import field_of_order, make_field
from .polyring import (
    Poly,
    descend,
    frobenius_conjugate,
    irreducible_count,
    monic_table,
)


def _zero_like(x):
    return x - x


class TruncSeries1:
    """c_0 + c_1 u + ... + c_N u^N, everything beyond N discarded."""

    __slots__ = ("coeffs", "N")

    def __init__(self, coeffs: Sequence, N: int):
        if N < 0:
            raise ValueError("truncation order must be >= 0")
        cs = [c if not isinstance(c, int) else Fraction(c) for c in coeffs[: N + 1]]
        zero = _zero_like(cs[0]) if cs else Fraction(0)
        self.coeffs = tuple(cs) + (zero,) * (N + 1 - len(cs))
        self.N = N

    @classmethod
    def one(cls, N: int) -> TruncSeries1:
        return cls([Fraction(1)], N)

    @classmethod
    def monomial(cls, c, k: int, N: int) -> TruncSeries1:
        zero = _zero_like(Fraction(c) if isinstance(c, int) else c)
        return cls([zero] * k + [c], N) if k <= N else cls([zero], N)

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def _check(self, other: TruncSeries1) -> None:
        if self.N != other.N:
            raise ValueError(f"truncation mismatch: {self.N} vs {other.N}")

    def __add__(self, other: TruncSeries1) -> TruncSeries1:
        self._check(other)
        return TruncSeries1([a + b for a, b in zip(self.coeffs, other.coeffs)], self.N)

    def __neg__(self) -> TruncSeries1:
        return TruncSeries1([-a for a in self.coeffs], self.N)

    def __sub__(self, other: TruncSeries1) -> TruncSeries1:
        return self + (-other)

    def __mul__(self, other) -> TruncSeries1:
        if not isinstance(other, TruncSeries1):
            return TruncSeries1([a * other for a in self.coeffs], self.N)
        self._check(other)
        out = [_zero_like(self.coeffs[0])] * (self.N + 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j in range(self.N + 1 - i):
                out[i + j] = out[i + j] + a * other.coeffs[j]
        return TruncSeries1(out, self.N)

    __rmul__ = __mul__

    def inverse(self) -> TruncSeries1:
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("constant term is zero")
        inv0 = 1 / c0
        out = [inv0]
        for n in range(1, self.N + 1):
            acc = _zero_like(c0)
            for k in range(1, n + 1):
                acc = acc + self.coeffs[k] * out[n - k]
            out.append(-acc * inv0)
        return TruncSeries1(out, self.N)

    def __pow__(self, n: int) -> TruncSeries1:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = TruncSeries1([self.coeffs[0] ** 0], self.N)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def substitute_power(self, d: int) -> TruncSeries1:
        """f(u^d)."""
        zero = _zero_like(self.coeffs[0])
        out = [zero] * (self.N + 1)
        for i, c in enumerate(self.coeffs):
            if i * d > self.N:
                break
            out[i * d] = c
        return TruncSeries1(out, self.N)

    def prefix_sums(self) -> TruncSeries1:
        out, acc = [], _zero_like(self.coeffs[0])
        for c in self.coeffs:
            acc = acc + c
            out.append(acc)
        return TruncSeries1(out, self.N)

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncSeries1) and self.N == other.N and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"TruncSeries1({list(self.coeffs)})"


class TruncSeries2:
    """sum c[i][j] u^i z^j for i <= Nu, j <= Nz."""

    __slots__ = ("c", "Nu", "Nz")

    def __init__(self, c: Sequence[Sequence], Nu: int, Nz: int):
        self.Nu, self.Nz = Nu, Nz
        rows = []
        for i in range(Nu + 1):
            row = list(c[i][: Nz + 1]) if i < len(c) else []
            row = [Fraction(x) if isinstance(x, int) else x for x in row]
            rows.append(tuple(row + [Fraction(0)] * (Nz + 1 - len(row))))
        self.c = tuple(rows)

    @classmethod
    def zero(cls, Nu: int, Nz: int) -> TruncSeries2:
        return cls([], Nu, Nz)

    @classmethod
    def one(cls, Nu: int, Nz: int) -> TruncSeries2:
        return cls([[1]], Nu, Nz)

    @classmethod
    def monomial(cls, coef, i: int, j: int, Nu: int, Nz: int) -> TruncSeries2:
        if i > Nu or j > Nz:
            return cls.zero(Nu, Nz)
        rows = [[0] * (Nz + 1) for _ in range(Nu + 1)]
        rows[i][j] = coef
        return cls(rows, Nu, Nz)

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int], object], Nu: int, Nz: int) -> TruncSeries2:
        rows = [[0] * (Nz + 1) for _ in range(Nu + 1)]
        for (i, j), coef in terms.items():
            if i <= Nu and j <= Nz:
                rows[i][j] = rows[i][j] + coef
        return cls(rows, Nu, Nz)

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        return self.c[i][j]

    def _check(self, other: TruncSeries2) -> None:
        if (self.Nu, self.Nz) != (other.Nu, other.Nz):
            raise ValueError("truncation mismatch")

    def __add__(self, other: TruncSeries2) -> TruncSeries2:
        self._check(other)
        return TruncSeries2(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.c, other.c)], self.Nu, self.Nz
        )

    def __neg__(self) -> TruncSeries2:
        return TruncSeries2([[-a for a in r] for r in self.c], self.Nu, self.Nz)

    def __sub__(self, other: TruncSeries2) -> TruncSeries2:
        return self + (-other)

    def __mul__(self, other) -> TruncSeries2:
        if not isinstance(other, TruncSeries2):
            return TruncSeries2([[a * other for a in r] for r in self.c], self.Nu, self.Nz)
        self._check(other)
        Nu, Nz = self.Nu, self.Nz
        out = [[Fraction(0)] * (Nz + 1) for _ in range(Nu + 1)]
        for i1 in range(Nu + 1):
            for j1 in range(Nz + 1):
                a = self.c[i1][j1]
                if a == 0:
                    continue
                for i2 in range(Nu + 1 - i1):
                    row = other.c[i2]
                    dst = out[i1 + i2]
                    for j2 in range(Nz + 1 - j1):
                        if row[j2]:
                            dst[j1 + j2] += a * row[j2]
        return TruncSeries2(out, Nu, Nz)

    __rmul__ = __mul__

    def inverse(self) -> TruncSeries2:
        c0 = self.c[0][0]
        if c0 == 0:
            raise ZeroDivisionError("constant term is zero")
        # 1/(c0 (1 + x)) = (1/c0) sum (-x)^k, x nilpotent modulo truncation
        x = self * (1 / c0) - TruncSeries2.one(self.Nu, self.Nz)
        term = TruncSeries2.one(self.Nu, self.Nz)
        total = TruncSeries2.one(self.Nu, self.Nz)
        for _ in range(self.Nu + self.Nz):
            term = term * (-x)
            total = total + term
        return total * (1 / c0)

    def __pow__(self, n: int) -> TruncSeries2:
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = TruncSeries2.one(self.Nu, self.Nz)
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncSeries2) and (self.Nu, self.Nz) == (other.Nu, other.Nz) and self.c == other.c

    def __repr__(self) -> str:
        return f"TruncSeries2({[list(r) for r in self.c]})"


# --- zeta -------------------------------------------------------------------------------

def zeta_series(q: int, N: int) -> TruncSeries1:
    """1/(1 - q u): coefficient q^n counts monic polynomials of degree n."""
    return TruncSeries1([Fraction(q**n) for n in range(N + 1)], N)


def q_power(q: int, t: Fraction) -> Fraction | QuadExtNumber:
    """q^t exactly for t in (1/2) Z."""
    t = Fraction(t)
    if t.denominator == 1:
        return Fraction(q) ** int(t)
    if t.denominator != 2:
        raise ValueError(f"q^{t} is not in Q(sqrt q)")
    # q^(m/2) = q^((m+1)/2) * q^(-1/2)
    return QuadExtNumber(q, 0, 0, Fraction(q) ** ((t.numerator + 1) // 2))


def zeta_value(q: int, s) -> Fraction | QuadExtNumber:
    """1/(1 - q^(1-s)) for s in (1/2) Z."""
    x = q_power(q, 1 - Fraction(s))
    if x == 1:
        raise ZeroDivisionError(f"zeta_{q} has a pole at s = {s}")
    return 1 / (1 - x)


# --- Perron --------------------------------------------------------------------------------

def perron_extract(series: TruncSeries1, n: int, mode: str = "exact-n"):
    """Coefficient of u^n, or the sum of coefficients up to u^n."""
    if n < 0 or n > series.N:
        raise ValueError(f"n = {n} outside the truncation 0..{series.N}")
    if mode == "exact-n":
        return series[n]
    if mode == "up-to-n":
        return series.prefix_sums()[n]
    raise ValueError(f"unknown mode {mode!r}")


# --- Euler products ---------------------------------------------------------------------------

def _is_one_at_origin(s) -> bool:
    return (s[0] if isinstance(s, TruncSeries1) else s[0, 0]) == 1


def euler_product(
    local_factor: Callable[[int], TruncSeries1 | TruncSeries2],
    max_degree: int,
    q: int,
    parity: str = "all",
    counts: Callable[[int], int] | None = None,
):
    """prod over degrees d <= max_degree of local_factor(d)^(number of primes of degree d).

    `counts` overrides the number of primes per degree (irreducible
    monics over F_q by default).
    """
    if parity not in ("odd", "even", "all"):
        raise ValueError(f"unknown parity filter {parity!r}")
    counts = counts or (lambda d: irreducible_count(q, d))
    result = None
    for d in range(1, max_degree + 1):
        if parity == "odd" and d % 2 == 0 or parity == "even" and d % 2:
            continue
        f = local_factor(d)
        if not _is_one_at_origin(f):
            raise ValueError(f"local factor at degree {d} has constant term != 1")
        term = f ** counts(d)
        result = term if result is None else result * term
    if result is None:
        f = local_factor(1)
        result = f**0
    return result


def _poly2(terms: dict[tuple[int, int], int], Nu: int, Nz: int) -> TruncSeries2:
    return TruncSeries2.from_terms({k: Fraction(v) for k, v in terms.items()}, Nu, Nz)


def a_q_local(d: int, Nu: int, Nz: int) -> TruncSeries2:
    """Local factor of A_q(z, u) for a prime of F_q[T] of degree d."""
    one_minus = _poly2({(0, 0): 1, (2 * d, 0): -3, (3 * d, 0): 2}, Nu, Nz)
    if d % 2:
        return one_minus * _poly2({(0, 0): 1, (0, d): 1}, Nu, Nz).inverse()
    h = d // 2
    quartic = _poly2({(0, 0): 1, (d, 0): -1}, Nu, Nz) ** 4
    num = _poly2({(0, h): 2}, Nu, Nz) * quartic + one_minus
    return num * (_poly2({(0, 0): 1, (0, h): 1}, Nu, Nz) ** -2)


def b2_local_product_form(d: int, Nu: int, Nz: int) -> TruncSeries2:
    """Local factor of the product form of B_2 (before pulling out Z_q(u)^4)."""
    if d % 2:
        num = _poly2({(0, 0): 1, (d, 0): 2}, Nu, Nz)
        den = _poly2({(0, 0): 1, (0, d): 1}, Nu, Nz) * _poly2({(0, 0): 1, (d, 0): -1}, Nu, Nz) ** 2
        return num * den.inverse()
    h = d // 2
    ud = _poly2({(d, 0): 1}, Nu, Nz)
    frac = ud * (_poly2({(0, 0): 4, (d, 0): -1}, Nu, Nz)) * (_poly2({(0, 0): 1, (d, 0): -1}, Nu, Nz) ** -2)
    inner = _poly2({(0, 0): 1, (0, h): 2}, Nu, Nz) + frac
    return inner * (_poly2({(0, 0): 1, (0, h): 1}, Nu, Nz) ** -2)


def _relevant_degree(Nu: int, Nz: int) -> int:
    return max(Nu, 2 * Nz, 1)


def a_q_series(q: int, Nu: int, Nz: int) -> TruncSeries2:
    return euler_product(lambda d: a_q_local(d, Nu, Nz), _relevant_degree(Nu, Nz), q)


def _zeta2(q: int, Nu: int, Nz: int, var: str, d: int = 1) -> TruncSeries2:
    """Z_q(var^d) as a bivariate series."""
    terms = {}
    n = 0
    while True:
        e = n * d
        key = (e, 0) if var == "u" else (0, e)
        if key[0] > Nu or key[1] > Nz:
            break
        terms[key] = q**n
        n += 1
    return _poly2(terms, Nu, Nz)


def squarefree_ratio(q2: int, Nu: int, Nz: int) -> TruncSeries2:
    """Z_{q^2}(z) / Z_{q^2}(z^2)."""
    return _zeta2(q2, Nu, Nz, "z") * _zeta2(q2, Nu, Nz, "z", 2).inverse()


def b2_rhs(q: int, Nu: int, Nz: int) -> TruncSeries2:
    return (_zeta2(q, Nu, Nz, "u") ** 4) * squarefree_ratio(q * q, Nu, Nz) * a_q_series(q, Nu, Nz)


def b2_product_form(q: int, Nu: int, Nz: int) -> TruncSeries2:
    prod = euler_product(lambda d: b2_local_product_form(d, Nu, Nz), _relevant_degree(Nu, Nz), q)
    return squarefree_ratio(q * q, Nu, Nz) * prod


# --- brute-force generating functions ------------------------------------------------------

@dataclass(frozen=True)
class _FamilyShape:
    """Admissible F over F_{q^2} grouped by degree and the F_q-primes they meet."""

    groups: dict[tuple[int, frozenset], int]


def _prime_factor_indices(table, idx: int) -> list[int]:
    out = []
    while idx > 0:
        out.append(int(table.spf[idx]))
        idx = int(table.cof[idx])
    return out


@lru_cache(maxsize=8)
def family_shape(q: int, Nz: int) -> _FamilyShape:
    """Squarefree F over F_{q^2}, deg <= Nz, with no prime factor coming from F_q[T].

    A prime pi over F_{q^2} lying in F_q[T] is excluded outright; pi and its
    conjugate together make up an F_q-prime and are excluded as a pair.
    Each admissible F is recorded by the set of F_q-primes (keys) it shares
    a factor with, which is all that coprimality to l in F_q[T] depends on.
    """
    small = field_of_order(q)
    big = make_field(small.p, 2 * small.e)
    table = monic_table(big, Nz)
    norm_prime: dict[int, int | None] = {}
    for idx in table.primes.tolist():
        pi = table.poly(idx)
        if descend(pi, small) is not None:
            norm_prime[idx] = None
        else:
            R = descend(pi * frobenius_conjugate(pi), small)
            norm_prime[idx] = R.key
    groups: dict[tuple[int, frozenset], int] = {}
    for idx in range(table.size):
        ps = _prime_factor_indices(table, idx)
        if len(set(ps)) != len(ps):
            continue
        Rs = [norm_prime[p] for p in ps]
        if any(R is None for R in Rs) or len(set(Rs)) != len(Rs):
            continue
        key = (int(table.degree[idx]), frozenset(Rs))
        groups[key] = groups.get(key, 0) + 1
    return _FamilyShape(groups)


def _fq_primes_of(l: Poly) -> dict[int, int]:
    """F_q-prime keys of l with multiplicities."""
    table = monic_table(l.spec, max(l.degree, 1))
    out: dict[int, int] = {}
    for idx in _prime_factor_indices(table, table.index_of(l)):
        k = table.poly(idx).key
        out[k] = out.get(k, 0) + 1
    return out


def family_count_lhs(q: int, l: Poly, Nz: int) -> list[int]:
    """#{admissible F of degree j coprime to l}, j = 0..Nz, by enumeration."""
    shape = family_shape(q, Nz)
    bad = set(_fq_primes_of(l))
    out = [0] * (Nz + 1)
    for (deg, Rs), n in shape.groups.items():
        if not (Rs & bad):
            out[deg] += n
    return out


def family_count_rhs(q: int, l: Poly, Nz: int) -> TruncSeries1:
    """The closed form for the same counts, as a series in z."""
    small = field_of_order(q)
    one = TruncSeries1.one(Nz)

    def z_pow(k: int) -> TruncSeries1:
        return TruncSeries1.monomial(Fraction(1), k, Nz)

    def ab_factor(d: int) -> TruncSeries1:
        if d % 2:
            return (one + z_pow(d)).inverse()
        h = d // 2
        return (one + z_pow(h) * 2) * ((one + z_pow(h)) ** -2)

    Z = TruncSeries1([Fraction(q * q) ** n for n in range(Nz + 1)], Nz)
    ratio = Z * Z.substitute_power(2).inverse()
    prod = euler_product(ab_factor, 2 * Nz, q)
    for key in _fq_primes_of(l):
        R = _poly_from_key(small, key)
        prod = prod * ab_factor(R.degree).inverse()
        big_primes = 1 if R.degree % 2 else 2
        h = R.degree if R.degree % 2 else R.degree // 2
        prod = prod * ((one + z_pow(h)) ** -big_primes)
    return ratio * prod


def _poly_from_key(spec, key: int) -> Poly:
    coeffs = []
    while key:
        coeffs.append(key % spec.q)
        key //= spec.q
    return Poly(spec, tuple(coeffs))


def family_count_genfun_check(q: int, l: Poly, Nz: int) -> bool:
    lhs = family_count_lhs(q, l, Nz)
    rhs = family_count_rhs(q, l, Nz)
    return all(Fraction(lhs[j]) == rhs[j] for j in range(Nz + 1))


def b2_lhs(q: int, Nu: int, Nz: int) -> TruncSeries2:
    """sum over monic l of degree <= Nu of d(l^3) u^deg l * (admissible F coprime to l) z^deg F."""
    small = field_of_order(q)
    table = monic_table(small, max(Nu, 1))
    shape = family_shape(q, Nz)
    terms: dict[tuple[int, int], int] = {}
    for idx in range(int(table.offsets[Nu + 1])):
        l = table.poly(idx)
        mult = _fq_primes_of(l) if l.degree else {}
        d_cube = 1
        for a in mult.values():
            d_cube *= 3 * a + 1
        bad = set(mult)
        for (deg, Rs), n in shape.groups.items():
            if not (Rs & bad):
                k = (l.degree, deg)
                terms[k] = terms.get(k, 0) + d_cube * n
    return _poly2(terms, Nu, Nz)


def b2_identity_check(q: int, Nu: int, Nz: int) -> bool:
    """Brute-force double sum equals both the product form and Z^4 * ratio * A_q."""
    lhs = b2_lhs(q, Nu, Nz)
    return lhs == b2_rhs(q, Nu, Nz) and lhs == b2_product_form(q, Nu, Nz)


# --- arithmetic-function registry for Perron checks ---------------------------------------

def arithmetic_series(q: int, name: str, N: int) -> TruncSeries1:
    """Generating function sum a(f) u^deg f from its Euler product."""
    one = TruncSeries1.one(N)

    def geom(d: int) -> TruncSeries1:
        return (one - TruncSeries1.monomial(Fraction(1), d, N)).inverse()

    if name == "one":
        return euler_product(geom, N, q)
    if name.startswith("d") and name[1:].isdigit():
        k = int(name[1:])
        return euler_product(lambda d: geom(d) ** k, N, q)
    if name == "mobius":
        return euler_product(lambda d: one - TruncSeries1.monomial(Fraction(1), d, N), N, q)
    raise ValueError(f"unknown arithmetic function {name!r}")


def arithmetic_direct(q: int, name: str, N: int) -> list[int]:
    """sum over monic f of degree n of a(f), n = 0..N, by enumeration."""
    table = monic_table(field_of_order(q), max(N, 1))
    if name == "one":
        vals = [1] * table.size
    elif name.startswith("d") and name[1:].isdigit():
        vals = table.divisor_counts(int(name[1:])).tolist()
    elif name == "mobius":
        vals = table.mobius.tolist()
    else:
        raise ValueError(f"unknown arithmetic function {name!r}")
    return [sum(vals[table.layer(n)]) for n in range(N + 1)]


def character_series(q: int, prime_values: dict[int, int], N: int) -> TruncSeries1:
    """prod over primes R of (1 - chi(R) u^deg R)^-1 with chi(R) = omega^j (or 0 for j = 3).

    `prime_values` maps F_q-prime keys to codes; coefficients are QuadExtNumbers.
    """
    small = field_of_order(q)
    one = TruncSeries1([QuadExtNumber(q, 1)], N)
    result = one
    for key, code in prime_values.items():
        R = _poly_from_key(small, key)
        if code == 3 or R.degree > N:
            continue
        term = TruncSeries1.monomial(QuadExtNumber.omega(q, code), R.degree, N)
        result = result * (one - term).inverse()
    return result


# --- A_q at (1/q^2, 1/q^(3/2)) ------------------------------------------------------------

TAIL_CONSTANT = 7


def a_q_local_value(q: int, d: int, z: QuadExtNumber, u: QuadExtNumber) -> QuadExtNumber:
    zd, ud = z**d, u**d
    if d % 2:
        return (1 - 3 * ud**2 + 2 * ud**3) / (1 + zd)
    zh = z ** (d // 2)
    num = 2 * zh * (1 - ud) ** 4 + 1 - 3 * ud**2 + 2 * ud**3
    return num / ((1 + zh) ** 2)


def _to_interval(x: QuadExtNumber):
    if not x.is_real():
        raise ArithmeticError("A_q factor left the real field")
    s = iv.sqrt(iv.mpf(1) / x.q)
    return _iv_fraction(x.a) + _iv_fraction(x.c) * s


def _iv_fraction(r: Fraction):
    return iv.mpf(r.numerator) / iv.mpf(r.denominator)


def tail_bound(q: int, D: int) -> float:
    """Bound on |log| of the product over degrees > D at (1/q^2, 1/q^(3/2)).

    With x = q^-d <= 1/5 each local factor is 1 + y with |y| <= 5.3 x^2,
    so |log| <= 6.8 x^2; times at most q^d/d primes this is 7 q^-d / d.
    """
    return TAIL_CONSTANT * q ** (-D) / ((D + 1) * (q - 1))


BOUND_DIGITS = 30


def _endpoint_fraction(x, upper: bool) -> Fraction:
    man, exp = libmp.to_man_exp(x._mpi_[1 if upper else 0])
    man = int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def outward_bounds(x, digits: int = BOUND_DIGITS) -> tuple[Decimal, Decimal]:
    """Decimal endpoints of an mpmath interval, rounded outward."""
    lo, hi = _endpoint_fraction(x, False), _endpoint_fraction(x, True)
    down = Context(prec=digits, rounding=ROUND_FLOOR)
    up = Context(prec=digits, rounding=ROUND_CEILING)
    return (
        down.divide(Decimal(lo.numerator), Decimal(lo.denominator)),
        up.divide(Decimal(hi.numerator), Decimal(hi.denominator)),
    )


def decimal_interval(lower: Decimal, upper: Decimal):
    """mpmath interval containing [lower, upper] at the current iv precision."""
    return iv.mpf([str(lower), str(upper)])


@dataclass
class AqEnclosure:
    q: int
    truncation_degree: int
    lower: Decimal
    upper: Decimal
    widths: list[float] = field(default_factory=list)

    @property
    def width(self) -> float:
        return float(self.upper - self.lower)

    @property
    def value(self) -> Decimal:
        return (self.lower + self.upper) / 2

    def interval(self):
        return decimal_interval(self.lower, self.upper)


def a_q_partial(q: int, D: int, z: QuadExtNumber, u: QuadExtNumber, prec: int = 120):
    """Interval for prod over degrees 1..D at the point (z, u)."""
    saved = iv.prec
    iv.prec = prec
    try:
        acc = iv.mpf(1)
        for d in range(1, D + 1):
            acc = acc * _to_interval(a_q_local_value(q, d, z, u)) ** irreducible_count(q, d)
        return acc
    finally:
        iv.prec = saved


def a_q_value(q: int, tol: float = 1e-8, max_degree: int = 200, prec: int = 120) -> AqEnclosure:
    """Certified enclosure of A_q(1/q^2, 1/q^(3/2))."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if q < 5:
        raise ValueError("the tail bound assumes q >= 5")
    z = QuadExtNumber(q, Fraction(1, q * q))
    u = QuadExtNumber(q, 0, 0, Fraction(1, q))  # q^(-3/2) = q^-1 * q^(-1/2)
    widths: list[float] = []
    saved = iv.prec
    iv.prec = prec
    try:
        acc = iv.mpf(1)
        for D in range(1, max_degree + 1):
            acc = acc * _to_interval(a_q_local_value(q, D, z, u)) ** irreducible_count(q, D)
            t = iv.mpf(tail_bound(q, D)) * (1 + iv.mpf(2) ** -40)
            enc = acc * iv.exp(iv.mpf([-t.b, t.b]))
            width = float(enc.b - enc.a)
            if widths and width > widths[-1]:
                raise ArithmeticError("enclosure width failed to shrink")
            widths.append(width)
            if width < tol:
                return AqEnclosure(q, D, *outward_bounds(enc), widths)
    finally:
        iv.prec = saved
    raise ArithmeticError(f"no certified enclosure below {tol} by degree {max_degree}")
