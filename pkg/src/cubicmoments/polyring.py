"""Dense polynomials over a finite field, factorization and arithmetic functions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .field import FieldSpec, embedding, make_field


def _trim(c: Sequence[int]) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Poly:
    """Polynomial with coefficients (field keys) listed constant term first."""

    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    # --- constructors ----------------------------------------------------
    @classmethod
    def from_ints(cls, spec: FieldSpec, coeffs: Sequence[int]) -> Poly:
        """Coefficients given as field keys (prime field: plain residues)."""
        return cls(spec, tuple(int(c) % spec.q for c in coeffs))

    @classmethod
    def T(cls, spec: FieldSpec) -> Poly:
        return cls(spec, (0, 1))

    @classmethod
    def const(cls, spec: FieldSpec, c: int) -> Poly:
        return cls(spec, (c,))

    @classmethod
    def one(cls, spec: FieldSpec) -> Poly:
        return cls(spec, (1,))

    @classmethod
    def zero(cls, spec: FieldSpec) -> Poly:
        return cls(spec, ())

    @classmethod
    def from_roots(cls, spec: FieldSpec, roots: Sequence[int]) -> Poly:
        f = cls.one(spec)
        for r in roots:
            f = f * cls(spec, (spec.neg(r), 1))
        return f

    # --- basic properties --------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lc == 1

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    @property
    def norm(self) -> int:
        if self.is_zero():
            return 0
        return self.spec.q**self.degree

    @cached_property
    def key(self) -> int:
        q = self.spec.q
        k = 0
        for c in reversed(self.coeffs):
            k = k * q + c
        return k

    def sort_key(self) -> tuple[int, int]:
        return (self.degree, self.key)

    def __lt__(self, other: Poly) -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        return f"Poly({encode_poly(self)})"

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    # --- arithmetic -------------------------------------------------------
    def _check(self, other: Poly) -> None:
        if other.spec != self.spec:
            raise ValueError("polynomials over different fields")

    def __add__(self, other: Poly) -> Poly:
        self._check(other)
        F = self.spec
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(F, tuple(F.add(self[i], other[i]) for i in range(n)))

    def __neg__(self) -> Poly:
        return Poly(self.spec, tuple(self.spec.neg(c) for c in self.coeffs))

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.spec)
        F = self.spec
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = F.add(out[i + j], F.mul(a, b))
        return Poly(F, tuple(out))

    def scale(self, c: int) -> Poly:
        return Poly(self.spec, tuple(self.spec.mul(c, a) for a in self.coeffs))

    def shift(self, n: int) -> Poly:
        return Poly(self.spec, (0,) * n + self.coeffs) if self.coeffs else self

    def __divmod__(self, other: Poly) -> tuple[Poly, Poly]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        F = self.spec
        r = list(self.coeffs)
        dv = other.degree
        inv = F.inv(other.lc)
        quot = [0] * max(len(r) - dv, 0)
        for k in range(len(r) - 1, dv - 1, -1):
            c = r[k]
            if c == 0:
                continue
            c = F.mul(c, inv)
            quot[k - dv] = c
            for j, b in enumerate(other.coeffs):
                if b:
                    r[k - dv + j] = F.sub(r[k - dv + j], F.mul(c, b))
        return Poly(F, tuple(quot)), Poly(F, tuple(r[:dv]))

    def __mod__(self, other: Poly) -> Poly:
        return divmod(self, other)[1]

    def __floordiv__(self, other: Poly) -> Poly:
        return divmod(self, other)[0]

    def __pow__(self, n: int) -> Poly:
        result, base = Poly.one(self.spec), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def powmod(self, n: int, m: Poly) -> Poly:
        result, base = Poly.one(self.spec) % m, self % m
        while n:
            if n & 1:
                result = (result * base) % m
            base = (base * base) % m
            n >>= 1
        return result

    def monic(self) -> Poly:
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no monic associate")
        return self.scale(self.spec.inv(self.lc))

    def derivative(self) -> Poly:
        F = self.spec
        return Poly(F, tuple(F.mul(F.from_int(i), c) for i, c in enumerate(self.coeffs))[1:])

    def __call__(self, x: int) -> int:
        F = self.spec
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def divides(self, other: Poly) -> bool:
        return (other % self).is_zero()


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero only if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a if a.is_zero() else a.monic()


def xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """(d, s, t) with s*a + t*b = d = gcd(a, b), d monic."""
    F = a.spec
    r0, r1 = a, b
    s0, s1 = Poly.one(F), Poly.zero(F)
    t0, t1 = Poly.zero(F), Poly.one(F)
    while not r1.is_zero():
        qt, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - qt * s1
        t0, t1 = t1, t0 - qt * t1
    if r0.is_zero():
        return r0, s0, t0
    c = F.inv(r0.lc)
    return r0.scale(c), s0.scale(c), t0.scale(c)


def inverse_mod(a: Poly, m: Poly) -> Poly:
    d, s, _ = xgcd(a % m, m)
    if not d.is_one():
        raise ZeroDivisionError("not invertible modulo m")
    return s % m


# --- text encoding -----------------------------------------------------------

def encode_elem(spec: FieldSpec, k: int) -> str:
    if spec.e == 1:
        return str(k)
    return "[" + ",".join(map(str, spec.digits(k))) + "]"


def encode_poly(f: Poly) -> str:
    if f.is_zero():
        return "0"
    return ",".join(encode_elem(f.spec, c) for c in f.coeffs)


def decode_poly(spec: FieldSpec, text: str) -> Poly:
    text = text.strip()
    if text == "0":
        return Poly.zero(spec)
    if spec.e == 1:
        return Poly(spec, tuple(int(t) % spec.p for t in text.split(",")))
    out = []
    for chunk in text.split("]"):
        chunk = chunk.strip(",").strip()
        if not chunk:
            continue
        if not chunk.startswith("["):
            raise ValueError(f"malformed extension-field coefficient in {text!r}")
        digits = [int(t) for t in chunk[1:].split(",")]
        if len(digits) != spec.e:
            raise ValueError(f"expected {spec.e} digits per coefficient in {text!r}")
        out.append(spec.key(digits))
    return Poly(spec, tuple(out))


# --- enumeration -------------------------------------------------------------

def monic_from_index(spec: FieldSpec, n: int, idx: int) -> Poly:
    q = spec.q
    coeffs = []
    for _ in range(n):
        coeffs.append(idx % q)
        idx //= q
    return Poly(spec, tuple(coeffs) + (1,))


def enumerate_monic(spec: FieldSpec, n: int, start: int = 0, stop: int | None = None) -> Iterator[Poly]:
    """Monic polynomials of degree n in canonical order; [start, stop) selects a slice."""
    stop = spec.q**n if stop is None else min(stop, spec.q**n)
    for idx in range(start, stop):
        yield monic_from_index(spec, n, idx)


def is_squarefree(f: Poly) -> bool:
    if f.degree <= 0:
        return not f.is_zero()
    return gcd(f, f.derivative()).is_one()


def enumerate_squarefree(spec: FieldSpec, n: int, start: int = 0, stop: int | None = None) -> Iterator[Poly]:
    return (f for f in enumerate_monic(spec, n, start, stop) if is_squarefree(f))


def monic_count(q: int, n: int) -> int:
    return q**n


def squarefree_count(q: int, n: int) -> int:
    return 1 if n == 0 else q if n == 1 else q**n - q ** (n - 1)


# --- factorization -----------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    unit: int
    factors: tuple[tuple[Poly, int], ...]

    def expand(self, spec: FieldSpec) -> Poly:
        f = Poly.const(spec, self.unit)
        for prime, m in self.factors:
            f = f * prime**m
        return f

    @property
    def primes(self) -> tuple[Poly, ...]:
        return tuple(p for p, _ in self.factors)

    def is_squarefree(self) -> bool:
        return all(m == 1 for _, m in self.factors)


def _pth_root(f: Poly) -> Poly:
    F = f.spec
    p = F.p
    inv_frob = p ** (F.e - 1)  # x -> x^(1/p)
    return Poly(F, tuple(F.pow(f.coeffs[i], inv_frob) for i in range(0, len(f.coeffs), p)))


def squarefree_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    """Monic f -> [(g_i, i)] with g_i squarefree, pairwise coprime, f = prod g_i^i."""
    out: list[tuple[Poly, int]] = []
    if f.degree <= 0:
        return out
    c = gcd(f, f.derivative())
    w = f // c
    i = 1
    while not w.is_one():
        y = gcd(w, c)
        z = w // y
        if not z.is_one():
            out.append((z, i))
        i += 1
        w, c = y, c // y
    if not c.is_one():
        for g, m in squarefree_decomposition(_pth_root(c)):
            out.append((g, m * f.spec.p))
    return out


def distinct_degree(f: Poly) -> list[tuple[Poly, int]]:
    """Squarefree monic f -> [(product of all prime factors of degree d, d)]."""
    F = f.spec
    out = []
    x = Poly.T(F)
    h = x % f if f.degree > 1 else x
    d = 0
    while f.degree >= 2 * (d + 1):
        d += 1
        h = h.powmod(F.q, f)
        g = gcd(h - x, f)
        if not g.is_one():
            out.append((g, d))
            f = f // g
            h = h % f
    if f.degree >= 1:
        out.append((f, f.degree))
    return out


def _split_candidates(F: FieldSpec, n: int) -> Iterator[Poly]:
    for deg in range(1, n):
        yield from enumerate_monic(F, deg)


def equal_degree(f: Poly, d: int) -> list[Poly]:
    """Split squarefree monic f, all of whose prime factors have degree d."""
    if f.degree == d:
        return [f]
    F = f.spec
    if F.q % 2 == 0:
        raise NotImplementedError("characteristic 2")
    expo = (F.q**d - 1) // 2
    one = Poly.one(F)
    for a in _split_candidates(F, f.degree):
        b = a.powmod(expo, f)
        g = gcd(b - one, f)
        if 0 < g.degree < f.degree:
            return equal_degree(g, d) + equal_degree(f // g, d)
    raise ArithmeticError("deterministic splitting failed")


def factorize(f: Poly) -> Factorization:
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    unit = f.lc
    f = f.monic()
    merged: dict[Poly, int] = {}
    for part, mult in squarefree_decomposition(f):
        for block, d in distinct_degree(part):
            for prime in equal_degree(block, d):
                merged[prime] = merged.get(prime, 0) + mult
    factors = tuple(sorted(merged.items(), key=lambda kv: kv[0].sort_key()))
    return Factorization(unit, factors)


def is_irreducible(f: Poly) -> bool:
    if f.degree < 1:
        return False
    fac = factorize(f)
    return len(fac.factors) == 1 and fac.factors[0][1] == 1


# --- arithmetic functions -------------------------------------------------------

def _nonzero(f: Poly) -> None:
    if f.is_zero():
        raise ValueError("zero polynomial")


def mobius(f: Poly) -> int:
    _nonzero(f)
    fac = factorize(f)
    if not fac.is_squarefree():
        return 0
    return (-1) ** len(fac.factors)


def divisor_count(f: Poly, k: int = 2) -> int:
    """d_k(f): ordered factorizations of the monic f into k monic factors."""
    _nonzero(f)
    if not f.is_monic():
        raise ValueError("d_k is only defined for monic polynomials")
    if k < 1:
        raise ValueError("k must be positive")
    out = 1
    for _, a in factorize(f).factors:
        out *= comb(a + k - 1, k - 1)
    return out


def euler_phi(f: Poly) -> int:
    _nonzero(f)
    q = f.spec.q
    out = 1
    for prime, a in factorize(f).factors:
        n = q**prime.degree
        out *= n**a - n ** (a - 1)
    return out


def _mobius_int(n: int) -> int:
    out, d = 1, 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    return -out if n > 1 else out


def irreducible_count(q: int | FieldSpec, d: int) -> int:
    if isinstance(q, FieldSpec):
        q = q.q
    if d <= 0:
        raise ValueError("degree must be positive")
    total = sum(_mobius_int(d // e) * q**e for e in range(1, d + 1) if d % e == 0)
    return total // d


# --- Frobenius conjugation and subfields ---------------------------------------

def frobenius_conjugate(f: Poly) -> Poly:
    """Apply x -> x^q' to every coefficient, where F = F_{q'^2}."""
    F = f.spec
    if F.e % 2:
        raise ValueError("conjugation needs a quadratic extension as base field")
    qs = F.sqrt_order()
    return Poly(F, tuple(F.pow(c, qs) for c in f.coeffs))


@lru_cache(maxsize=None)
def _inverse_embedding(small: FieldSpec, big: FieldSpec) -> dict[int, int]:
    return {int(b): a for a, b in enumerate(embedding(small, big))}


def lift(f: Poly, big: FieldSpec) -> Poly:
    """View f over a subfield as a polynomial over `big`."""
    if f.spec == big:
        return f
    emb = embedding(f.spec, big)
    return Poly(big, tuple(int(emb[c]) for c in f.coeffs))


def descend(f: Poly, small: FieldSpec) -> Poly | None:
    """The polynomial over `small` whose lift is f, or None."""
    inv = _inverse_embedding(small, f.spec)
    try:
        return Poly(small, tuple(inv[c] for c in f.coeffs))
    except KeyError:
        return None


def subfield_spec(F: FieldSpec) -> FieldSpec:
    """F_{q'} inside F = F_{q'^2}."""
    if F.e % 2:
        raise ValueError("not a quadratic extension")
    return make_field(F.p, F.e // 2)


# --- vectorized table of all monic polynomials up to a degree -----------------

_COMBINE = np.array(
    [[0, 1, 2, 3], [1, 2, 0, 3], [2, 0, 1, 3], [3, 3, 3, 3]], dtype=np.int8
)


def combine_codes(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Multiply character values coded as omega exponents, 3 meaning zero."""
    return _COMBINE[a, b]


class MonicTable:
    """All monic polynomials of degree <= N in canonical order, with a factor sieve.

    Index of a monic f of degree n with lower coefficient key k is
    offsets[n] + k.  For each f of positive degree, `spf` is the index of
    its smallest prime factor and `cof` the index of f / spf.
    """

    def __init__(self, spec: FieldSpec, N: int):
        self.spec = spec
        self.N = N
        q = spec.q
        self.offsets = np.array([(q**n - 1) // (q - 1) for n in range(N + 2)], dtype=np.int64)
        total = int(self.offsets[-1])
        self.size = total
        self.degree = np.zeros(total, dtype=np.int64)
        self.coeffs = np.zeros((total, N + 1), dtype=np.int64)
        for n in range(N + 1):
            lo, hi = self.offsets[n], self.offsets[n + 1]
            self.degree[lo:hi] = n
            idx = np.arange(q**n, dtype=np.int64)
            for i in range(n):
                self.coeffs[lo:hi, i] = (idx // q**i) % q
            self.coeffs[lo:hi, n] = 1
        self._sieve()

    def layer(self, n: int) -> slice:
        return slice(int(self.offsets[n]), int(self.offsets[n + 1]))

    def index_of(self, f: Poly) -> int:
        if not f.is_monic() or f.degree > self.N:
            raise KeyError(f)
        return int(self.offsets[f.degree]) + (f.key - self.spec.q**f.degree)

    def poly(self, idx: int) -> Poly:
        n = int(self.degree[idx])
        return Poly(self.spec, tuple(int(c) for c in self.coeffs[idx, : n + 1]))

    def _products(self, prime: np.ndarray, n: int, k: int) -> np.ndarray:
        """Indices of prime * g for every monic g of degree k."""
        F = self.spec
        g = self.coeffs[self.layer(k), : k + 1]
        out = np.zeros((g.shape[0], n + k + 1), dtype=np.int64)
        for i, c in enumerate(prime[: n + 1]):
            if c:
                out[:, i : i + k + 1] = F.vadd(out[:, i : i + k + 1], F.vmul(np.int64(c), g))
        q = F.q
        weights = np.array([q**j for j in range(n + k)], dtype=np.int64)
        return self.offsets[n + k] + out[:, : n + k] @ weights

    def _sieve(self) -> None:
        total = self.size
        spf = np.full(total, -1, dtype=np.int64)
        cof = np.full(total, -1, dtype=np.int64)
        primes = []
        for n in range(1, self.N + 1):
            layer = np.arange(self.offsets[n], self.offsets[n + 1], dtype=np.int64)
            new = layer[spf[layer] < 0]
            spf[new] = new
            cof[new] = 0
            primes.extend(new.tolist())
            for idx in new:
                for k in range(1, self.N - n + 1):
                    prod = self._products(self.coeffs[idx], n, k)
                    fresh = spf[prod] < 0
                    spf[prod[fresh]] = idx
                    cof[prod[fresh]] = np.arange(self.offsets[k], self.offsets[k + 1])[fresh]
        self.spf = spf
        self.cof = cof
        self.primes = np.array(primes, dtype=np.int64)
        is_prime = np.zeros(total, dtype=bool)
        is_prime[self.primes] = True
        self.is_prime = is_prime
        # multiplicity of the smallest prime factor
        mult = np.zeros(total, dtype=np.int64)
        for n in range(1, self.N + 1):
            sl = self.layer(n)
            c = cof[sl]
            same = (spf[c] == spf[sl]) & (c > 0)
            mult[sl] = np.where(same, mult[c] + 1, 1)
        self.spf_mult = mult

    @cached_property
    def mobius(self) -> np.ndarray:
        mu = np.zeros(self.size, dtype=np.int64)
        mu[0] = 1
        for n in range(1, self.N + 1):
            sl = self.layer(n)
            mu[sl] = np.where(self.spf_mult[sl] >= 2, 0, -mu[self.cof[sl]])
        return mu

    def divisor_counts(self, k: int = 2) -> np.ndarray:
        d = np.ones(self.size, dtype=np.int64)
        for n in range(1, self.N + 1):
            sl = self.layer(n)
            a = self.spf_mult[sl]
            d[sl] = d[self.cof[sl]] * (a + k - 1) // a
        return d

    def multiplicative(self, prime_codes: np.ndarray) -> np.ndarray:
        """Extend character codes given on primes to every monic polynomial.

        prime_codes has one row per entry of `self.primes` (any trailing
        shape); the result has one row per table entry.
        """
        prime_codes = np.asarray(prime_codes, dtype=np.int8)
        out = np.zeros((self.size,) + prime_codes.shape[1:], dtype=np.int8)
        out[self.primes] = prime_codes
        for n in range(1, self.N + 1):
            sl = self.layer(n)
            comp = np.nonzero(~self.is_prime[sl])[0] + sl.start
            if comp.size:
                out[comp] = _COMBINE[out[self.spf[comp]], out[self.cof[comp]]]
        return out


@lru_cache(maxsize=8)
def monic_table(spec: FieldSpec, N: int) -> MonicTable:
    return MonicTable(spec, N)
