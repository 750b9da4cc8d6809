"""Exact arithmetic in Q(zeta_p, omega) and in Q(omega)[s]/(s^2 - 1/q)."""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

OMEGA = cmath.exp(2j * cmath.pi / 3)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    num, _, den = text.strip().partition("/")
    return Fraction(int(num), int(den or 1))


class CycloNumber:
    """Element of Q(zeta_p, omega).

    Coefficients sit on the basis zeta_p^i * omega^j with 0 <= i <= p-2 and
    j in {0, 1}, stored at position i + (p-1)*j.
    """

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Sequence):
        if p < 5:
            raise ValueError("characteristic must be at least 5")
        if len(coeffs) != 2 * (p - 1):
            raise ValueError(f"expected {2 * (p - 1)} coefficients")
        self.p = p
        self.coeffs = tuple(_frac(c) for c in coeffs)

    # --- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, p: int) -> CycloNumber:
        return _zero(p)

    @classmethod
    def rational(cls, p: int, r) -> CycloNumber:
        c = [Fraction(0)] * (2 * (p - 1))
        c[0] = _frac(r)
        return cls(p, c)

    @classmethod
    def from_grid(cls, p: int, grid) -> CycloNumber:
        """grid[i][j] is the coefficient of zeta^i omega^j, i < p, j < 3."""
        g = [[_frac(grid[i][j]) for j in range(3)] for i in range(p)]
        for i in range(p):
            g[i][0] -= g[i][2]
            g[i][1] -= g[i][2]
        for j in range(2):
            top = g[p - 1][j]
            if top:
                for i in range(p - 1):
                    g[i][j] -= top
        return cls(p, [g[i][0] for i in range(p - 1)] + [g[i][1] for i in range(p - 1)])

    @classmethod
    def from_counts(cls, p: int, counts: np.ndarray, scale=1) -> CycloNumber:
        """Integer counts[i, j] of terms zeta^i omega^j; reduction is done in integers."""
        c = np.asarray(counts, dtype=object).reshape(p, 3).copy()
        c[:, 0] -= c[:, 2]
        c[:, 1] -= c[:, 2]
        c[: p - 1, 0] -= c[p - 1, 0]
        c[: p - 1, 1] -= c[p - 1, 1]
        s = _frac(scale)
        return cls(p, [s * int(x) for x in c[: p - 1, 0]] + [s * int(x) for x in c[: p - 1, 1]])

    @classmethod
    def root_of_unity(cls, p: int, i: int, j: int = 0) -> CycloNumber:
        return _root_of_unity(p, i % p, j % 3)

    @classmethod
    def omega_power(cls, p: int, j: int) -> CycloNumber:
        return cls.root_of_unity(p, 0, j)

    @classmethod
    def from_omega_pair(cls, p: int, a, b) -> CycloNumber:
        c = [Fraction(0)] * (2 * (p - 1))
        c[0] = _frac(a)
        c[p - 1] = _frac(b)
        return cls(p, c)

    # --- structure ---------------------------------------------------------------
    def _grid(self) -> list[list[Fraction]]:
        p = self.p
        g = [[Fraction(0)] * 3 for _ in range(p)]
        for i in range(p - 1):
            g[i][0] = self.coeffs[i]
            g[i][1] = self.coeffs[p - 1 + i]
        return g

    def _same(self, other: CycloNumber) -> None:
        if other.p != self.p:
            raise ValueError(f"mismatched characteristic: {self.p} vs {other.p}")

    def _coerce(self, other) -> CycloNumber:
        if isinstance(other, CycloNumber):
            self._same(other)
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNumber.rational(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloNumber(self.p, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> CycloNumber:
        return CycloNumber(self.p, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, r) -> CycloNumber:
        r = _frac(r)
        return CycloNumber(self.p, [r * a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        grid = [[Fraction(0)] * 3 for _ in range(p)]
        a, b = self._grid(), other._grid()
        nz_a = [(i, j, a[i][j]) for i in range(p) for j in range(2) if a[i][j]]
        nz_b = [(i, j, b[i][j]) for i in range(p) for j in range(2) if b[i][j]]
        for i1, j1, x in nz_a:
            for i2, j2, y in nz_b:
                grid[(i1 + i2) % p][(j1 + j2) % 3] += x * y
        return CycloNumber.from_grid(p, grid)

    __rmul__ = __mul__

    def __truediv__(self, r) -> CycloNumber:
        if isinstance(r, (int, Fraction)):
            return self.scale(1 / _frac(r))
        raise TypeError("only division by rationals is supported")

    def __pow__(self, n: int) -> CycloNumber:
        if n < 0:
            raise ValueError("negative powers are not supported")
        result, base = CycloNumber.rational(self.p, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> CycloNumber:
        p = self.p
        a = self._grid()
        grid = [[Fraction(0)] * 3 for _ in range(p)]
        for i in range(p):
            for j in range(2):
                if a[i][j]:
                    grid[-i % p][-j % 3] += a[i][j]
        return CycloNumber.from_grid(p, grid)

    def abs2(self) -> CycloNumber:
        return self * self.conj()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return self.coeffs[0]

    def in_omega_field(self) -> bool:
        p = self.p
        return not any(self.coeffs[i] for i in range(1, p - 1)) and not any(
            self.coeffs[p - 1 + i] for i in range(1, p - 1)
        )

    def omega_pair(self) -> tuple[Fraction, Fraction]:
        """(a, b) with self = a + b*omega; raises if zeta_p occurs."""
        if not self.in_omega_field():
            raise ValueError("value involves zeta_p")
        return self.coeffs[0], self.coeffs[self.p - 1]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycloNumber.rational(self.p, other)
        if not isinstance(other, CycloNumber):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.p)
        p = self.p
        return sum(
            complex(float(self.coeffs[i + (p - 1) * j])) * z**i * OMEGA**j
            for i in range(p - 1)
            for j in range(2)
            if self.coeffs[i + (p - 1) * j]
        ) + 0j

    def to_strings(self) -> list[str]:
        return [fraction_str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, p: int, items: Iterable[str]) -> CycloNumber:
        return cls(p, [parse_fraction(s) for s in items])

    def __repr__(self) -> str:
        return f"CycloNumber(p={self.p}, {self.to_complex():.6g})"


# instances are immutable, so the common constants are shared
@lru_cache(maxsize=None)
def _zero(p: int) -> CycloNumber:
    return CycloNumber(p, [0] * (2 * (p - 1)))


@lru_cache(maxsize=None)
def _root_of_unity(p: int, i: int, j: int) -> CycloNumber:
    grid = [[0, 0, 0] for _ in range(p)]
    grid[i][j] = 1
    return CycloNumber.from_grid(p, grid)


class QuadExtNumber:
    """a + b*omega + c*s + d*omega*s with s^2 = 1/q; s stands for q^(-1/2)."""

    __slots__ = ("q", "a", "b", "c", "d")

    def __init__(self, q: int, a=0, b=0, c=0, d=0):
        self.q = q
        self.a, self.b, self.c, self.d = _frac(a), _frac(b), _frac(c), _frac(d)

    @classmethod
    def s(cls, q: int) -> QuadExtNumber:
        return cls(q, 0, 0, 1, 0)

    @classmethod
    def omega(cls, q: int, j: int = 1) -> QuadExtNumber:
        j %= 3
        return cls(q, *((1, 0), (0, 1), (-1, -1))[j])

    @classmethod
    def from_cyclo(cls, q: int, x: CycloNumber) -> QuadExtNumber:
        a, b = x.omega_pair()
        return cls(q, a, b)

    @property
    def parts(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def _same(self, other: QuadExtNumber) -> None:
        if other.q != self.q:
            raise ValueError(f"mismatched q: {self.q} vs {other.q}")

    def _coerce(self, other):
        if isinstance(other, QuadExtNumber):
            self._same(other)
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExtNumber(self.q, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExtNumber(self.q, self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self) -> QuadExtNumber:
        return QuadExtNumber(self.q, -self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    @staticmethod
    def _omul(x0, x1, y0, y1):
        return x0 * y0 - x1 * y1, x0 * y1 + x1 * y0 - x1 * y1

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        m = QuadExtNumber._omul
        r0, r1 = m(self.a, self.b, o.a, o.b)
        t0, t1 = m(self.c, self.d, o.c, o.d)
        u0, u1 = m(self.a, self.b, o.c, o.d)
        v0, v1 = m(self.c, self.d, o.a, o.b)
        inv_q = Fraction(1, self.q)
        return QuadExtNumber(self.q, r0 + t0 * inv_q, r1 + t1 * inv_q, u0 + v0, u1 + v1)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> QuadExtNumber:
        if n < 0:
            raise ValueError("negative powers are not supported")
        result, base = QuadExtNumber(self.q, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> QuadExtNumber:
        # x = X + Y s with X, Y in Q(omega): 1/x = (X - Y s) / (X^2 - Y^2 / q)
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        q = self.q
        X = QuadExtNumber(q, self.a, self.b)
        Y = QuadExtNumber(q, self.c, self.d)
        n = X * X - Y * Y * Fraction(1, q)
        # n lies in Q(omega); divide through by its norm n * conj(n)
        norm = (n * n.conj()).a
        n_inv = n.conj() * Fraction(1, norm)
        return (X - Y * QuadExtNumber.s(q)) * n_inv

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def conj(self) -> QuadExtNumber:
        return QuadExtNumber(self.q, self.a - self.b, -self.b, self.c - self.d, -self.d)

    def is_real(self) -> bool:
        return self.b == 0 and self.d == 0

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QuadExtNumber(self.q, other)
        if not isinstance(other, QuadExtNumber):
            return NotImplemented
        return self.q == other.q and self.parts == other.parts

    def __hash__(self) -> int:
        return hash((self.q,) + self.parts)

    def to_complex(self) -> complex:
        s = self.q**-0.5
        return complex(float(self.a) + float(self.b) * OMEGA + s * (float(self.c) + float(self.d) * OMEGA))

    def eval_at_s(self, s_value: float | None = None) -> complex:
        s = self.q**-0.5 if s_value is None else s_value
        return complex(float(self.a) + float(self.b) * OMEGA + s * (float(self.c) + float(self.d) * OMEGA))

    def to_strings(self) -> list[str]:
        return [fraction_str(x) for x in self.parts]

    @classmethod
    def from_strings(cls, q: int, items: Sequence[str]) -> QuadExtNumber:
        if len(items) != 4:
            raise ValueError("expected four fractions")
        return cls(q, *(parse_fraction(s) for s in items))

    def __repr__(self) -> str:
        return f"QuadExtNumber(q={self.q}, {self.a} + {self.b}w + ({self.c} + {self.d}w)s)"


def to_complex(x: CycloNumber | QuadExtNumber) -> complex:
    return x.to_complex()


def omega_int_from_counts(counts: Sequence[int]) -> tuple[int, int]:
    """c0 + c1*omega + c2*omega^2 as (a, b) on {1, omega}."""
    c0, c1, c2 = counts
    return c0 - c2, c1 - c2
