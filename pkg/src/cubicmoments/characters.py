"""Cubic residue symbols over F_{q^2}[T] and the genus-g family of cubic characters.

Values are handled as omega-exponent codes: 0, 1, 2 for omega^j and 3 for
the value zero.  A prime pi of degree d is evaluated through a root beta
of pi in F_{q^{2d}}, where a(beta) is the residue of a modulo pi.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .field import FieldSpec, OmegaMap, embedding, field_of_order, make_field, make_omega_map
from .polyring import (
    Poly,
    combine_codes,
    descend,
    factorize,
    frobenius_conjugate,
    is_irreducible,
    is_squarefree,
    lift,
)

ZERO = 3


@dataclass(frozen=True)
class CharValue:
    """omega^exponent, or zero when exponent is None."""

    exponent: int | None

    @classmethod
    def from_code(cls, code: int) -> CharValue:
        return cls(None if code == ZERO else int(code) % 3)

    @property
    def code(self) -> int:
        return ZERO if self.exponent is None else self.exponent

    def is_zero(self) -> bool:
        return self.exponent is None

    def __mul__(self, other: CharValue) -> CharValue:
        if self.is_zero() or other.is_zero():
            return CharValue(None)
        return CharValue((self.exponent + other.exponent) % 3)

    def __pow__(self, n: int) -> CharValue:
        if self.is_zero():
            return CharValue(None) if n else CharValue(0)
        return CharValue(self.exponent * n % 3)

    def conj(self) -> CharValue:
        return self if self.is_zero() else CharValue(-self.exponent % 3)


# --- residue fields F_{q'}[T]/(pi) --------------------------------------------

class ResidueModel:
    """Primes of degree d over `base`, each with a chosen root in K = F_{|base|^d}."""

    def __init__(self, base: FieldSpec, d: int, omega: OmegaMap):
        if omega.spec != base:
            raise ValueError("omega map must live in the base field")
        self.base = base
        self.d = d
        self.omega = omega
        self.K = make_field(base.p, base.e * d)
        self.iota = embedding(base, self.K)
        self.cube_table = OmegaMap(self.K, int(self.iota[omega.zeta])).cube_class_table()

    @cached_property
    def _inverse_iota(self) -> np.ndarray:
        inv = np.full(self.K.q, -1, dtype=np.int64)
        inv[self.iota] = np.arange(self.base.q, dtype=np.int64)
        return inv

    @cached_property
    def _prime_data(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        K, d, qb = self.K, self.d, self.base.q
        beta = np.arange(K.q, dtype=np.int64)
        mask = np.ones(K.q, dtype=bool)
        for j in range(1, d):
            if d % j == 0:
                mask &= K.vpow(beta, qb**j) != beta
        beta = beta[mask]
        coeffs = [np.ones_like(beta)]
        conj = beta
        for _ in range(d):
            # multiply by (T - conj)
            shifted = [np.zeros_like(beta)] + coeffs
            scaled = [K.vmul(K.vneg(conj), c) for c in coeffs] + [np.zeros_like(beta)]
            coeffs = [K.vadd(a, b) for a, b in zip(shifted, scaled)]
            conj = K.vpow(conj, qb)
        mat = np.stack([self._inverse_iota[c] for c in coeffs], axis=1)
        if (mat < 0).any():
            raise ArithmeticError("minimal polynomial outside the base field")
        weights = np.array([qb**i for i in range(d + 1)], dtype=object)
        keys = np.array([int(v) for v in (mat.astype(object) @ weights)], dtype=object)
        order = sorted(range(len(beta)), key=lambda i: (keys[i], beta[i]))
        seen: dict[int, int] = {}
        for i in order:
            seen.setdefault(int(keys[i]), i)
        firsts = np.array(sorted(seen.values(), key=lambda i: keys[i]), dtype=np.int64)
        return mat[firsts], beta[firsts], np.array([int(keys[i]) for i in firsts], dtype=object)

    @property
    def prime_coeffs(self) -> np.ndarray:
        return self._prime_data[0]

    @property
    def roots(self) -> np.ndarray:
        return self._prime_data[1]

    @cached_property
    def _root_by_key(self) -> dict[int, int]:
        _, roots, keys = self._prime_data
        return {int(k): int(r) for k, r in zip(keys, roots)}

    def primes(self) -> list[Poly]:
        return [Poly(self.base, tuple(int(c) for c in row)) for row in self.prime_coeffs]

    def root(self, prime: Poly) -> int:
        try:
            return self._root_by_key[prime.key]
        except KeyError:
            raise ValueError(f"{prime} is not a monic prime of degree {self.d}") from None

    def evaluate(self, coeffs: np.ndarray, beta) -> np.ndarray:
        """Residues a(beta) for rows of base-field coefficient keys (constant first).

        `beta` may be a scalar or an array of roots; the result has shape
        (rows,) or (rows, len(beta)).
        """
        K = self.K
        coeffs = np.asarray(coeffs, dtype=np.int64)
        beta = np.asarray(beta, dtype=np.int64)
        lifted = self.iota[coeffs]
        if beta.ndim:
            lifted = lifted[:, :, None]
        val = np.zeros(lifted.shape[:1] + beta.shape, dtype=np.int64)
        for i in range(coeffs.shape[1] - 1, -1, -1):
            val = K.vadd(K.vmul(val, beta), lifted[:, i])
        return val

    def codes(self, coeffs: np.ndarray, beta) -> np.ndarray:
        return self.cube_table[self.evaluate(coeffs, beta)]

    def symbol(self, prime: Poly, a: Poly) -> int:
        beta = self.root(prime)
        K = self.K
        acc = 0
        for c in reversed(lift(a, self.base).coeffs):
            acc = K.add(K.mul(acc, beta), int(self.iota[c]))
        return int(self.cube_table[acc])


@lru_cache(maxsize=None)
def residue_model(base: FieldSpec, d: int, omega: OmegaMap) -> ResidueModel:
    return ResidueModel(base, d, omega)


def cubic_symbol(prime: Poly, a: Poly, omega: OmegaMap) -> CharValue:
    """chi_P(a) by modular exponentiation a^((|P|-1)/3) mod P."""
    base = prime.spec
    if (base.q**prime.degree - 1) % 3:
        raise ValueError("3 does not divide |P| - 1")
    if not prime.is_monic() or not is_irreducible(prime):
        raise ValueError(f"{prime} is not a monic prime")
    a = lift(a, base) if a.spec != base else a
    r = a % prime
    if r.is_zero():
        return CharValue(None)
    power = r.powmod((base.q**prime.degree - 1) // 3, prime)
    if power.degree != 0:
        raise ArithmeticError("power residue is not a constant")
    return CharValue(omega.exponent(power.coeffs[0]))


# --- characters ---------------------------------------------------------------

@dataclass(frozen=True)
class CubicChar:
    """chi_F = prod chi_{pi_i}^{e_i} for distinct monic primes pi_i over F_{q^2}."""

    primes: tuple[Poly, ...]
    exponents: tuple[int, ...]
    omega: OmegaMap

    def __post_init__(self):
        if len(self.primes) != len(self.exponents):
            raise ValueError("one exponent per prime")
        if any(e not in (1, 2) for e in self.exponents):
            raise ValueError("exponents must be 1 or 2")
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("conductor primes must be distinct")

    @property
    def base(self) -> FieldSpec:
        return self.omega.spec

    @cached_property
    def conductor(self) -> Poly:
        f = Poly.one(self.base)
        for p in self.primes:
            f = f * p
        return f

    @property
    def degree(self) -> int:
        return self.conductor.degree

    @property
    def genus(self) -> int:
        """Genus of the restriction to F_q[T]; conductor degree there is 2 deg F."""
        return 2 * self.degree - 2

    def conj(self) -> CubicChar:
        return CubicChar(self.primes, tuple(3 - e for e in self.exponents), self.omega)

    def value(self, f: Poly) -> CharValue:
        out = CharValue(0)
        for prime, e in zip(self.primes, self.exponents):
            model = residue_model(self.base, prime.degree, self.omega)
            out = out * CharValue.from_code(model.symbol(prime, f)) ** e
        return out

    def value_slow(self, f: Poly) -> CharValue:
        out = CharValue(0)
        for prime, e in zip(self.primes, self.exponents):
            out = out * cubic_symbol(prime, f, self.omega) ** e
        return out

    @cached_property
    def restricted_modulus(self) -> Poly:
        """F * sigma(F), which lies in F_q[T]."""
        F = self.conductor
        h = F * frobenius_conjugate(F)
        small = make_field(self.base.p, self.base.e // 2)
        down = descend(h, small)
        if down is None:
            raise ArithmeticError("F * sigma(F) is not defined over F_q")
        return down

    def encode(self) -> str:
        from .polyring import encode_poly

        return ";".join(f"{encode_poly(p)}^{e}" for p, e in zip(self.primes, self.exponents))


def char_eval(chi: CubicChar, f: Poly) -> CharValue:
    return chi.value(f)


def make_char(conductor: Poly, omega: OmegaMap, exponents: Sequence[int] | None = None) -> CubicChar:
    if not conductor.is_monic():
        raise ValueError("conductor must be monic")
    fac = factorize(conductor)
    if not fac.is_squarefree():
        raise ValueError("conductor must be squarefree")
    primes = fac.primes
    exps = tuple(exponents) if exponents is not None else (1,) * len(primes)
    return CubicChar(primes, exps, omega)


def restriction_triviality_check(F: Poly, f: Poly, omega: OmegaMap) -> bool:
    """Whether chi_F(f) = 1 for squarefree F, f in F_q[T] lifted to F_{q^2}[T].

    chi_F is the product of the residue symbols of the primes of F_{q^2}[T]
    dividing F.  Returns False when gcd(F, f) != 1 (value zero).
    """
    if not is_squarefree(F) or not is_squarefree(f):
        raise ValueError("inputs must be squarefree")
    big = omega.spec
    chi = make_char(lift(F, big), omega)
    return chi.value(lift(f, big)) == CharValue(0)


def conjugation_symmetry(chi: CubicChar, f: Poly) -> bool:
    """chi_{sigma F}(f) == conj(chi_F(f)) for f in F_q[T]."""
    sigma_chi = CubicChar(tuple(frobenius_conjugate(p) for p in chi.primes), chi.exponents, chi.omega)
    g = lift(f, chi.base)
    return sigma_chi.value(g) == chi.value(g).conj()


# --- the family ---------------------------------------------------------------

@dataclass(frozen=True)
class FamilySpec:
    q: int
    g: int
    alternate_omega: bool = False

    def __post_init__(self):
        if self.q % 2 == 0:
            raise ValueError(f"q must be odd, got {self.q}")
        try:
            field_of_order(self.q)
        except ValueError:
            raise ValueError(f"q must be a prime power, got {self.q}") from None
        if self.q % 3 != 2:
            raise ValueError(f"q must be 2 mod 3, got q = {self.q} = {self.q % 3} mod 3")
        if self.g < 0 or self.g % 2:
            raise ValueError(f"genus must be even and non-negative, got {self.g}")

    @property
    def m(self) -> int:
        return self.g // 2 + 1

    @property
    def base_field(self) -> FieldSpec:
        return field_of_order(self.q)

    @property
    def char_field(self) -> FieldSpec:
        F = self.base_field
        return make_field(F.p, 2 * F.e)

    @property
    def omega(self) -> OmegaMap:
        return make_omega_map(self.char_field, alternate=self.alternate_omega)


@dataclass(frozen=True)
class PrimePool:
    """Primes of F_{q^2}[T] of degree d that are not defined over F_q."""

    d: int
    coeffs: np.ndarray  # rows of base-field keys
    roots: np.ndarray
    conj_index: np.ndarray  # position of sigma(pi) in the pool


@lru_cache(maxsize=None)
def prime_pool(char_field: FieldSpec, d: int, omega: OmegaMap) -> PrimePool:
    model = residue_model(char_field, d, omega)
    coeffs = model.prime_coeffs
    qs = char_field.sqrt_order()
    conj = char_field.vpow(coeffs, qs)
    keep = ~(conj == coeffs).all(axis=1)
    coeffs, roots, conj = coeffs[keep], model.roots[keep], conj[keep]
    weights = np.array([char_field.q**i for i in range(d + 1)], dtype=object)
    keys = {int(k): i for i, k in enumerate(coeffs.astype(object) @ weights)}
    conj_index = np.array([keys[int(k)] for k in conj.astype(object) @ weights], dtype=np.int64)
    return PrimePool(d, coeffs, roots, conj_index)


def _partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


@dataclass(frozen=True)
class Member:
    """A family conductor as (degree, pool index) pairs with its polynomial key."""

    parts: tuple[tuple[int, int], ...]
    key: int


def conductors_of_degree(char_field: FieldSpec, n: int, omega: OmegaMap) -> list[Member]:
    """Squarefree monic F of degree n over F_{q^2} with no prime factor from F_q[T].

    Primes of F_q[T] are either primes of F_{q^2}[T] (odd degree) or split as
    pi * sigma(pi); both kinds are excluded.  Sorted by conductor key.
    """
    pools = {d: prime_pool(char_field, d, omega) for d in range(1, n + 1)}
    members = []
    for part in _partitions(n):
        groups: dict[int, int] = {}
        for d in part:
            groups[d] = groups.get(d, 0) + 1
        choices = []
        for d, k in groups.items():
            pool = pools[d]
            opts = [
                c
                for c in combinations(range(len(pool.coeffs)), k)
                if not any(pool.conj_index[i] in c for i in c)
            ]
            choices.append([tuple((d, i) for i in c) for c in opts])
        for combo in _product(choices):
            members.append(tuple(x for grp in combo for x in grp))
    out = []
    for parts in members:
        f = Poly.one(char_field)
        for d, i in parts:
            f = f * Poly(char_field, tuple(int(c) for c in pools[d].coeffs[i]))
        out.append(Member(tuple(sorted(parts)), f.key))
    out.sort(key=lambda m: m.key)
    return out


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield (head,) + tail


def family_members(spec: FamilySpec) -> list[Member]:
    return conductors_of_degree(spec.char_field, spec.m, spec.omega)


def member_char(spec: FamilySpec, member: Member) -> CubicChar:
    F = spec.char_field
    primes = []
    for d, i in member.parts:
        pool = prime_pool(F, d, spec.omega)
        primes.append(Poly(F, tuple(int(c) for c in pool.coeffs[i])))
    primes.sort(key=lambda p: p.sort_key())
    return CubicChar(tuple(primes), (1,) * len(primes), spec.omega)


def family_iter(spec: FamilySpec) -> Iterator[CubicChar]:
    for m in family_members(spec):
        yield member_char(spec, m)


def family_count(spec: FamilySpec) -> int:
    return len(family_members(spec))


def member_prime_codes(spec: FamilySpec, members: Sequence[Member], prime_coeffs: np.ndarray) -> np.ndarray:
    """Codes chi_F(R) for rows R of F_q-coefficients and each member F (columns)."""
    F = spec.char_field
    small = spec.base_field
    lifted = embedding(small, F)[np.asarray(prime_coeffs, dtype=np.int64)]
    needed: dict[int, set[int]] = {}
    for m in members:
        for d, i in m.parts:
            needed.setdefault(d, set()).add(i)
    per_prime: dict[tuple[int, int], np.ndarray] = {}
    for d, idxs in needed.items():
        pool = prime_pool(F, d, spec.omega)
        model = residue_model(F, d, spec.omega)
        idxs = sorted(idxs)
        roots = pool.roots[idxs]
        for start in range(0, len(idxs), 256):
            block = model.codes(lifted, roots[start : start + 256])
            for j, i in enumerate(idxs[start : start + 256]):
                per_prime[(d, i)] = block[:, j]
    out = np.zeros((lifted.shape[0], len(members)), dtype=np.int8)
    for col, m in enumerate(members):
        acc = np.zeros(lifted.shape[0], dtype=np.int8)
        for part in m.parts:
            acc = combine_codes(acc, per_prime[part])
        out[:, col] = acc
    return out


def family_count_inclusion_exclusion(q: int, n: int, exclude_split_pairs: bool = True) -> int:
    """Count squarefree monic F of degree n over F_{q^2} with no F_q[T]-prime factor.

    Works from prime counts alone: F_q-primes of odd degree d stay prime
    over F_{q^2} and are forbidden; those of even degree d split into two
    conjugate primes of degree d/2, of which at most one may divide F (or
    both, when `exclude_split_pairs` is False).  Independent of any
    enumeration of polynomials.
    """
    from .polyring import irreducible_count

    # local generating polynomial per F_{q^2}-prime kind, multiplied with
    # exponents given by prime counts, truncated at z^n
    def mul(a, b):
        out = [0] * (n + 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b[: n + 1 - i]):
                    out[i + j] += x * y
        return out

    def power(a, k):
        out = [1] + [0] * n
        for _ in range(k):
            out = mul(out, a)
        return out

    total = [1] + [0] * n
    for d in range(1, 2 * n + 1):
        if d % 2 == 0:
            h = d // 2
            if h > n:
                continue
            local = [0] * (n + 1)
            local[0] = 1
            local[h] += 2
            if not exclude_split_pairs and 2 * h <= n:
                local[2 * h] += 1
            total = mul(total, power(local, irreducible_count(q, d)))
    # primes of F_{q^2}[T] not coming from F_q[T] at all are the ones just
    # counted; odd-degree F_q primes contribute the factor 1
    return total[n]
