"""Finite fields F_{p^e} with elements stored as integer keys.

An element c_0 + c_1 x + ... + c_{e-1} x^{e-1} of F_p[x]/(modulus) is
stored as the integer key sum(c_i * p**i).  Keys double as the canonical
ordering used throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

ADD_TABLE_LIMIT = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- dense polynomials over Z/p, lists low -> high ---------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    dm = len(m) - 1
    inv = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(a: list[int], n: int, m: list[int], p: int) -> list[int]:
    result, base = [1], _pmod(a, m, p)
    while n:
        if n & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        n >>= 1
    return result


def _is_irreducible_mod_p(f: list[int], p: int) -> bool:
    """Rabin's test for a monic f over F_p."""
    n = len(f) - 1
    if n == 1:
        return True
    x = [0, 1]
    for r in prime_factors(n):
        h = _ppowmod(x, p ** (n // r), f, p)
        if len(_pgcd(f, _psub(h, x, p), p)) != 1:
            return False
    h = _ppowmod(x, p**n, f, p)
    return not _psub(h, x, p)


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Monic irreducible of degree e, smallest when compared from x^{e-1} down."""
    for idx in range(p**e):
        # c_{e-1} is the most significant digit of idx
        f = [(idx // p**i) % p for i in range(e)] + [1]
        if _is_irreducible_mod_p(f, p):
            return tuple(f)
    raise ArithmeticError(f"no irreducible of degree {e} over F_{p}")


class FieldSpec:
    """The field F_{p^e}; elements are ints in range(q).

    Scalar operations take and return keys.  The `v*` methods are the
    numpy counterparts on integer arrays of keys.
    """

    def __init__(self, p: int, e: int, modulus: tuple[int, ...]):
        self.p = p
        self.e = e
        self.modulus = tuple(modulus)
        self.q = p**e
        self._pw = [p**i for i in range(e)]

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, e={self.e})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldSpec) and (self.p, self.e, self.modulus) == (
            other.p,
            other.e,
            other.modulus,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __reduce__(self):
        # tables are rebuilt lazily in worker processes
        return (make_field, (self.p, self.e))

    # --- encoding ---------------------------------------------------------
    def digits(self, k: int) -> list[int]:
        p = self.p
        return [(k // w) % p for w in self._pw]

    def key(self, digits) -> int:
        p = self.p
        return sum((int(c) % p) * w for c, w in zip(digits, self._pw))

    def elem(self, k: int) -> FieldElem:
        return FieldElem(self, k % self.q if self.e == 1 else k)

    @property
    def one(self) -> int:
        return 1

    def _mulmod_digits(self, a: list[int], b: list[int]) -> list[int]:
        r = _pmod(_pmul(a, b, self.p), list(self.modulus), self.p)
        return r + [0] * (self.e - len(r))

    def _slow_mul(self, a: int, b: int) -> int:
        return self.key(self._mulmod_digits(self.digits(a), self.digits(b)))

    # --- tables -------------------------------------------------------------
    @cached_property
    def generator(self) -> int:
        order = self.q - 1
        for g in range(1, self.q):
            if all(self._slow_pow(g, order // r) != 1 for r in prime_factors(order)):
                return g
        raise ArithmeticError("no generator found")

    def _slow_pow(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            n >>= 1
        return result

    def mul_matrix(self, c: int) -> np.ndarray:
        """Matrix M over F_p with digits(c*y) = M @ digits(y) mod p."""
        cols = []
        xj = [1] + [0] * (self.e - 1)
        cd = self.digits(c)
        for _ in range(self.e):
            cols.append(self._mulmod_digits(cd, xj))
            xj = self._mulmod_digits(xj, [0, 1] if self.e > 1 else [0])
        return np.array(cols, dtype=np.int64).T

    @cached_property
    def exp_table(self) -> np.ndarray:
        n = self.q - 1
        out = np.empty(n, dtype=np.int64)
        out[0] = 1
        filled = 1
        pw = np.array(self._pw, dtype=np.int64)
        while filled < n:
            step = min(filled, n - filled)
            m = self.mul_matrix(self._exp_scalar_slow(filled))
            block = self.vdigits(out[:step]) @ m.T % self.p
            out[filled : filled + step] = block @ pw
            filled += step
        return out

    def _exp_scalar_slow(self, k: int) -> int:
        return self._slow_pow(self.generator, k)

    @cached_property
    def log_table(self) -> np.ndarray:
        log = np.full(self.q, -1, dtype=np.int64)
        log[self.exp_table] = np.arange(self.q - 1, dtype=np.int64)
        return log

    @cached_property
    def _exp_list(self) -> list[int]:
        return self.exp_table.tolist()

    @cached_property
    def _log_list(self) -> list[int]:
        return self.log_table.tolist()

    @cached_property
    def _add_list(self) -> list[list[int]] | None:
        if self.q > ADD_TABLE_LIMIT:
            return None
        keys = np.arange(self.q, dtype=np.int64)
        return [self.vadd(np.full(self.q, a, dtype=np.int64), keys).tolist() for a in range(self.q)]

    @cached_property
    def _neg_list(self) -> list[int]:
        keys = np.arange(self.q, dtype=np.int64)
        return self.vneg(keys).tolist()

    # --- scalar arithmetic ---------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        table = self._add_list
        if table is not None:
            return table[a][b]
        p = self.p
        out, w = 0, 1
        for _ in range(self.e):
            out += ((a % p + b % p) % p) * w
            a //= p
            b //= p
            w *= p
        return out

    def neg(self, a: int) -> int:
        if self.e == 1:
            return -a % self.p
        return self._neg_list[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        lg = self._log_list
        return self._exp_list[(lg[a] + lg[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp_list[-self._log_list[a] % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if n == 0 else 0
        if self.e == 1:
            return pow(a, n % (self.p - 1), self.p)
        return self._exp_list[self._log_list[a] * n % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime subfield."""
        return n % self.p

    # --- vectorized arithmetic on key arrays ---------------------------------
    def vdigits(self, keys: np.ndarray) -> np.ndarray:
        keys = np.asarray(keys, dtype=np.int64)
        pw = np.array(self._pw, dtype=np.int64)
        return (keys[..., None] // pw) % self.p

    def vkeys(self, digits: np.ndarray) -> np.ndarray:
        pw = np.array(self._pw, dtype=np.int64)
        return (np.asarray(digits, dtype=np.int64) % self.p) @ pw

    def vadd(self, a, b) -> np.ndarray:
        if self.e == 1:
            return (np.asarray(a) + np.asarray(b)) % self.p
        return self.vkeys(self.vdigits(a) + self.vdigits(b))

    def vneg(self, a) -> np.ndarray:
        if self.e == 1:
            return -np.asarray(a) % self.p
        return self.vkeys(-self.vdigits(a))

    def vmul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return a * b % self.p
        lg = self.log_table
        out = self.exp_table[(lg[a] + lg[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpow(self, a, n: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if n == 0:
            return np.ones_like(a)
        lg = self.log_table
        out = self.exp_table[(lg[a] * (n % (self.q - 1))) % (self.q - 1)]
        return np.where(a == 0, 0, out)

    # --- trace and Frobenius -------------------------------------------------
    @cached_property
    def trace_vector(self) -> np.ndarray:
        """tr(x^j) for the power basis; the trace is linear in the digits."""
        basis = [self.key([1 if i == j else 0 for i in range(self.e)]) for j in range(self.e)]
        return np.array([int(np.trace(self.mul_matrix(b))) % self.p for b in basis], dtype=np.int64)

    def trace(self, a: int) -> int:
        return int(np.dot(self.digits(a), self.trace_vector)) % self.p

    def vtrace(self, keys) -> np.ndarray:
        return self.vdigits(keys) @ self.trace_vector % self.p

    def frobenius(self, a: int, times: int = 1) -> int:
        """a -> a^(p^times)."""
        return self.pow(a, self.p**times)

    def sqrt_order(self) -> int:
        """q' with q'^2 == q for an even-degree field (the subfield size)."""
        if self.e % 2:
            raise ValueError(f"F_{self.q} is not a quadratic extension")
        return self.p ** (self.e // 2)

    def in_subfield(self, a: int, sub_e: int) -> bool:
        return self.frobenius(a, sub_e) == a

    def elements(self) -> range:
        return range(self.q)


@lru_cache(maxsize=None)
def make_field(p: int, e: int) -> FieldSpec:
    if not isinstance(p, int) or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"characteristic must be an odd prime, got {p}")
    if e <= 0:
        raise ValueError(f"extension degree must be positive, got {e}")
    return FieldSpec(p, e, smallest_irreducible(p, e))


def field_of_order(q: int) -> FieldSpec:
    for p in prime_factors(q)[:1]:
        e, n = 0, q
        while n % p == 0:
            n //= p
            e += 1
        if n == 1:
            return make_field(p, e)
    raise ValueError(f"{q} is not a prime power")


def check_family_base(q: int) -> FieldSpec:
    spec = field_of_order(q)
    if q % 3 != 2:
        raise ValueError(f"family base needs q = 2 mod 3, got q = {q}")
    return spec


@dataclass(frozen=True)
class FieldElem:
    spec: FieldSpec
    key: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.spec != self.spec:
                raise ValueError("elements of different fields")
            return other.key
        if isinstance(other, int):
            return self.spec.from_int(other)
        return NotImplemented

    @property
    def coeffs(self) -> list[int]:
        return self.spec.digits(self.key)

    def __add__(self, other):
        return FieldElem(self.spec, self.spec.add(self.key, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.spec, self.spec.sub(self.key, self._coerce(other)))

    def __rsub__(self, other):
        return FieldElem(self.spec, self.spec.sub(self._coerce(other), self.key))

    def __neg__(self):
        return FieldElem(self.spec, self.spec.neg(self.key))

    def __mul__(self, other):
        return FieldElem(self.spec, self.spec.mul(self.key, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElem(self.spec, self.spec.div(self.key, self._coerce(other)))

    def __pow__(self, n: int):
        return FieldElem(self.spec, self.spec.pow(self.key, n))

    def inverse(self) -> FieldElem:
        return FieldElem(self.spec, self.spec.inv(self.key))

    def trace(self) -> int:
        return self.spec.trace(self.key)

    def __bool__(self) -> bool:
        return self.key != 0

    def __repr__(self) -> str:
        return f"FieldElem({self.coeffs})"


def trace_to_prime(x: FieldElem) -> int:
    return x.spec.trace(x.key)


@dataclass(frozen=True)
class OmegaMap:
    """Identification of the abstract cube root omega with zeta in the field."""

    spec: FieldSpec
    zeta: int

    def image(self, j: int) -> int:
        return self.spec.pow(self.zeta, j % 3)

    def exponent(self, x: int) -> int:
        for j in range(3):
            if self.image(j) == x:
                return j
        raise ValueError(f"{x} is not a cube root of unity")

    def alternate(self) -> OmegaMap:
        return OmegaMap(self.spec, self.spec.mul(self.zeta, self.zeta))

    def cube_class_table(self) -> np.ndarray:
        """For every key x: j with x^((q-1)/3) = zeta^j, or 3 when x = 0."""
        return _cube_class_table(self.spec, self.zeta)


@lru_cache(maxsize=64)
def _cube_class_table(spec: FieldSpec, zeta: int) -> np.ndarray:
    g_zeta = spec.pow(spec.generator, (spec.q - 1) // 3)
    if g_zeta == zeta:
        scale = 1
    elif spec.mul(g_zeta, g_zeta) == zeta:
        scale = 2
    else:
        raise ValueError("zeta is not a primitive cube root of unity")
    table = np.full(spec.q, 3, dtype=np.int8)
    k = np.arange(spec.q - 1, dtype=np.int64)
    table[spec.exp_table] = (scale * k % 3).astype(np.int8)
    return table


def primitive_cube_roots(spec: FieldSpec) -> list[int]:
    if (spec.q - 1) % 3:
        raise ValueError(f"3 does not divide |F_{spec.q}^*|")
    return sorted(x for x in (spec.pow(spec.generator, (spec.q - 1) // 3 * j) for j in (1, 2)))


def make_omega_map(spec: FieldSpec, alternate: bool = False) -> OmegaMap:
    roots = primitive_cube_roots(spec)
    return OmegaMap(spec, roots[1] if alternate else roots[0])


@lru_cache(maxsize=None)
def embedding(small: FieldSpec, big: FieldSpec) -> np.ndarray:
    """Keys of the image of each element of `small` inside `big`.

    The generator of `small` goes to the smallest-key root of its modulus.
    """
    if small.p != big.p or big.e % small.e:
        raise ValueError(f"F_{small.q} does not embed in F_{big.q}")
    if small.e == 1:
        return np.arange(small.p, dtype=np.int64)
    theta = None
    for x in range(big.q):
        acc = 0
        for c in reversed(small.modulus):
            acc = big.add(big.mul(acc, x), c)
        if acc == 0:
            theta = x
            break
    powers = [1]
    for _ in range(small.e - 1):
        powers.append(big.mul(powers[-1], theta))
    digits = small.vdigits(np.arange(small.q))
    big_digits = big.vdigits(np.array(powers))  # e_small x e_big
    return big.vkeys(digits @ big_digits)
