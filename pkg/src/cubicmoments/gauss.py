"""Hayes exponential, Gauss sums G(chi), generalized Gauss sums G_q(V, f).

Direct sums enumerate all residues u mod f.  For a fixed modulus the map
u -> tr(head(u V / f)) is F_p-linear in the F_p-digits of u, so a whole
sum reduces to one integer vector of exponents and a bincount over
(zeta_p exponent, omega exponent).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from math import isqrt
from typing import Iterable, Sequence

import numpy as np

from .characters import ZERO, CubicChar, residue_model
from .cyclo import CycloNumber
from .field import FieldSpec, OmegaMap, embedding
from .polyring import Poly, enumerate_monic, euler_phi, factorize, gcd, lift

DIRECT_LIMIT = 25**4


def _check_base(base: FieldSpec) -> None:
    if base.q % 6 != 1:
        raise ValueError(f"generalized Gauss sums need |base| = 1 mod 6, got {base.q}")


# --- Hayes exponential ------------------------------------------------------------

def laurent_head(a: Poly, h: Poly) -> int:
    """Coefficient of 1/T in a/h (as a field key)."""
    if h.is_zero():
        raise ValueError("modulus must be nonzero")
    if h.degree == 0:
        return 0
    r = a % h
    F = h.spec
    return F.div(r[h.degree - 1], h.lc)


def hayes_e(a: Poly, h: Poly) -> CycloNumber:
    F = h.spec
    return CycloNumber.root_of_unity(F.p, F.trace(laurent_head(a, h)))


# --- the vectorized engine -----------------------------------------------------------

def residue_keys(base: FieldSpec, n: int) -> np.ndarray:
    """Coefficient keys (rows: residues in index order, columns: T^0..T^{n-1})."""
    idx = np.arange(base.q**n, dtype=np.int64)
    return np.stack([(idx // base.q**i) % base.q for i in range(n)], axis=1) if n else np.zeros((1, 0), np.int64)


def head_functionals(base: FieldSpec, modulus: Poly, Vs: Sequence[Poly]) -> np.ndarray:
    """Matrix W (n*e, len(Vs)) with tr(head(u V / M)) = digits(u) @ W mod p."""
    n, e = modulus.degree, base.e
    W = np.zeros((n * e, len(Vs)), dtype=np.int64)
    basis_keys = [base.key([1 if t == j else 0 for t in range(e)]) for j in range(e)]
    for col, V in enumerate(Vs):
        Vr = V % modulus
        for i in range(n):
            for j, theta_j in enumerate(basis_keys):
                u = Poly(base, (0,) * i + (theta_j,))
                W[i * e + j, col] = base.trace(laurent_head(u * Vr, modulus))
    return W


def _digit_matrix(base: FieldSpec, keys: np.ndarray) -> np.ndarray:
    N, n = keys.shape
    return base.vdigits(keys).reshape(N, n * base.e)


def character_codes(keys: np.ndarray, factors: Iterable[tuple[Poly, int]], omega: OmegaMap) -> np.ndarray:
    """chi_f(u) codes for residues u given by coefficient keys; chi_f = prod chi_P^a."""
    codes = np.zeros(keys.shape[0], dtype=np.int8)
    base = omega.spec
    for prime, a in factors:
        model = residue_model(base, prime.degree, omega)
        c = model.codes(keys, model.root(prime))
        c = np.where(c == ZERO, ZERO, (a * c.astype(np.int64)) % 3).astype(np.int8)
        codes = np.where((codes == ZERO) | (c == ZERO), ZERO, (codes + c) % 3).astype(np.int8)
    return codes


def sums_from_codes(p: int, codes: np.ndarray, exps: np.ndarray) -> list[CycloNumber]:
    """sum_u omega^codes(u) zeta_p^exps(u, V) for each column V of exps."""
    live = codes != ZERO
    c = codes[live].astype(np.int64)
    out = []
    for col in range(exps.shape[1]):
        bins = np.bincount(exps[live, col] * 3 + c, minlength=3 * p)
        out.append(CycloNumber.from_counts(p, bins.reshape(p, 3)))
    return out


@dataclass(frozen=True)
class GaussSumValue:
    """value * sqrt(N)^sqrt_power, N the base cardinality."""

    value: CycloNumber
    V: Poly | None
    f: Poly | None
    base_q: int
    sqrt_power: int = 0

    def to_complex(self) -> complex:
        return self.value.to_complex() * self.base_q ** (self.sqrt_power / 2)

    def normalized(self) -> GaussSumValue:
        r = isqrt(self.base_q)
        k = self.sqrt_power
        if r * r == self.base_q and k:
            scale = Fraction(r) ** k
            return GaussSumValue(self.value.scale(scale), self.V, self.f, self.base_q, 0)
        if k and k % 2 == 0:
            return GaussSumValue(self.value.scale(Fraction(self.base_q) ** (k // 2)), self.V, self.f, self.base_q, 0)
        return self

    def exact_equals(self, other: GaussSumValue) -> bool:
        a, b = self.normalized(), other.normalized()
        if (a.sqrt_power - b.sqrt_power) % 2 == 0:
            k = (a.sqrt_power - b.sqrt_power) // 2
            if k == 0:
                return a.value == b.value
            return a.value.scale(Fraction(self.base_q) ** k) == b.value if k >= 0 else a.value == b.value.scale(
                Fraction(self.base_q) ** (-k)
            )
        # genuinely irrational ratio: exact |.|^2 plus a float phase check
        na = a.value.abs2().scale(Fraction(self.base_q) ** a.sqrt_power)
        nb = b.value.abs2().scale(Fraction(self.base_q) ** b.sqrt_power)
        return na == nb and abs(a.to_complex() - b.to_complex()) < 1e-10 * max(1.0, abs(b.to_complex()))


def gen_gauss_many(Vs: Sequence[Poly], f: Poly, omega: OmegaMap, limit: int = DIRECT_LIMIT) -> list[CycloNumber]:
    """G_q(V, f) for several V by direct summation over all residues mod f."""
    base = omega.spec
    _check_base(base)
    if not f.is_monic():
        raise ValueError("modulus must be monic")
    if f.degree == 0:
        return [CycloNumber.rational(base.p, 1) for _ in Vs]
    if base.q**f.degree > limit:
        raise ValueError(f"{base.q}^{f.degree} residues exceed the direct-summation limit")
    keys = residue_keys(base, f.degree)
    codes = character_codes(keys, factorize(f).factors, omega)
    W = head_functionals(base, f, [lift(V, base) for V in Vs])
    exps = _digit_matrix(base, keys) @ W % base.p
    return sums_from_codes(base.p, codes, exps)


def gauss_count_grids(Vs: Sequence[Poly], f: Poly, omega: OmegaMap, limit: int = DIRECT_LIMIT) -> np.ndarray:
    """Counts (len(Vs), p, 3) of residues by (zeta_p exponent, omega exponent).

    G_q(V, f) is CycloNumber.from_counts of the V-th slice; grids add, so
    weighted sums of Gauss sums can be formed before any exact arithmetic.
    """
    base = omega.spec
    _check_base(base)
    if not f.is_monic():
        raise ValueError("modulus must be monic")
    p = base.p
    if f.degree == 0:
        grids = np.zeros((len(Vs), p, 3), dtype=np.int64)
        grids[:, 0, 0] = 1
        return grids
    if base.q**f.degree > limit:
        raise ValueError(f"{base.q}^{f.degree} residues exceed the direct-summation limit")
    keys = residue_keys(base, f.degree)
    codes = character_codes(keys, factorize(f).factors, omega)
    live = codes != ZERO
    W = head_functionals(base, f, [lift(V, base) for V in Vs])
    exps = _digit_matrix(base, keys[live]) @ W % p
    flat = exps * 3 + codes[live].astype(np.int64)[:, None]
    grids = np.zeros((len(Vs), 3 * p), dtype=np.int64)
    for col in range(len(Vs)):
        grids[col] = np.bincount(flat[:, col], minlength=3 * p)
    return grids.reshape(len(Vs), p, 3)


def gen_gauss(V: Poly, f: Poly, omega: OmegaMap, limit: int = DIRECT_LIMIT) -> GaussSumValue:
    return GaussSumValue(gen_gauss_many([V], f, omega, limit)[0], V, f, omega.spec.q)


@lru_cache(maxsize=4096)
def _prime_power(P: Poly, i: int) -> Poly:
    return P**i


def gen_gauss_prime_power_collapsed(V: Poly, P: Poly, i: int, omega: OmegaMap) -> GaussSumValue:
    """G_q(V, P^i) summed over u0 mod P after summing out u = u0 + P t.

    The t-sum is an additive character sum mod P^(i-1): |P|^(i-1) when
    P^(i-1) | V and 0 otherwise.  Only residues mod P are enumerated.
    """
    return gen_gauss_prime_power_collapsed_many([V], P, i, omega)[0]


def gen_gauss_prime_power_collapsed_many(Vs: Sequence[Poly], P: Poly, i: int, omega: OmegaMap) -> list[GaussSumValue]:
    """The collapsed sum for several V sharing one prime power; residues mod P are coded once."""
    base = omega.spec
    _check_base(base)
    Vs = [lift(V, base) for V in Vs]
    if i == 0:
        return [GaussSumValue(CycloNumber.rational(base.p, 1), V, Poly.one(base), base.q) for V in Vs]
    N = base.q**P.degree
    Pi1, f = _prime_power(P, i - 1), _prime_power(P, i)
    reduced = {}
    for k, V in enumerate(Vs):
        if V.is_zero():
            reduced[k] = V
        else:
            Vq, Vr = divmod(V, Pi1)
            if Vr.is_zero():
                reduced[k] = Vq
    out = [GaussSumValue(CycloNumber.zero(base.p), V, f, base.q) for V in Vs]
    if reduced:
        keys = residue_keys(base, P.degree)
        codes = character_codes(keys, [(P, i)], omega)
        W = head_functionals(base, P, list(reduced.values()))
        exps = _digit_matrix(base, keys) @ W % base.p
        for k, val in zip(reduced, sums_from_codes(base.p, codes, exps)):
            out[k] = GaussSumValue(val.scale(N ** (i - 1)), Vs[k], f, base.q)
    return out


# --- closed-form prime-power table ------------------------------------------------------

def _valuation(V: Poly, P: Poly) -> tuple[int | None, Poly]:
    if V.is_zero():
        return None, V
    a = 0
    while (V % P).is_zero():
        V = V // P
        a += 1
    return a, V


def constant_character_exponent(P: Poly, i: int) -> int:
    """chi_{P^i}(c) = chi_3(c)^(deg(P) i) on constants; returns deg(P) i mod 3."""
    return P.degree * i % 3


@lru_cache(maxsize=64)
def tau(base: FieldSpec, omega: OmegaMap, power: int) -> CycloNumber:
    """sum over a in base^* of chi_3(a)^power e(tr a), chi_3(a) = Omega^-1(a^((N-1)/3))."""
    table = omega.cube_class_table()
    keys = np.arange(1, base.q, dtype=np.int64)
    codes = (table[keys].astype(np.int64) * power) % 3
    exps = base.vtrace(keys)
    bins = np.bincount(exps * 3 + codes, minlength=3 * base.p)
    return CycloNumber.from_counts(base.p, bins.reshape(base.p, 3))


@lru_cache(maxsize=4096)
def root_number_prime_power(P: Poly, i: int, omega: OmegaMap, odd_sign: int = 1) -> tuple[CycloNumber, int]:
    """omega(chi_P^i) as (x, k) meaning x * sqrt(N)^k, N = |base|.

    Uses the character sum over monic f of degree deg(P) - 1 with the
    normalisation -N^(-(deg P - delta)/2), delta = 2 (even) or 1 (odd).
    `odd_sign` is the sign used for odd characters.  The functional
    equation forces +1 there (for deg P = 1 the L-polynomial is 1, so the
    root number is 1); -1 is kept selectable for comparison.
    """
    base = omega.spec
    d = P.degree
    even = constant_character_exponent(P, i) == 0
    model = residue_model(base, d, omega)
    beta = model.root(P)
    if d - 1 >= 0:
        keys = np.array([list(f.coeffs) for f in enumerate_monic(base, d - 1)], dtype=np.int64)
        codes = model.codes(keys, beta)
        codes = np.where(codes == ZERO, ZERO, (codes.astype(np.int64) * i) % 3)
        counts = [int((codes == c).sum()) for c in range(3)]
    s = CycloNumber.from_omega_pair(base.p, counts[0] - counts[2], counts[1] - counts[2])
    delta = 2 if even else 1
    sign = -1 if even else odd_sign
    return s.scale(sign), -(d - delta)


@lru_cache(maxsize=16384)
def _top_layer(P: Poly, i: int, omega: OmegaMap, odd_sign: int, c: int) -> tuple[CycloNumber, int]:
    """eps * omega(chi_P^i) * conj chi_P^i(V1) as (x, k), x * sqrt(N)^k, for chi_P(V1) = omega^c."""
    base = omega.spec
    p = base.p
    w, w_pow = root_number_prime_power(P, i, omega, odd_sign)
    even = constant_character_exponent(P, i) == 0
    if even:
        eps, eps_pow = CycloNumber.rational(p, 1), 0
    else:
        eps, eps_pow = tau(base, omega, constant_character_exponent(P, i)), -1
    chi_inv = CycloNumber.omega_power(p, -(c * i) % 3)
    # |P|^(i - 1/2) = sqrt(N)^(deg P (2i - 1))
    return eps * w * chi_inv, w_pow + eps_pow + P.degree * (2 * i - 1)


def gen_gauss_closed_form(V: Poly, P: Poly, i: int, omega: OmegaMap, odd_sign: int = 1) -> GaussSumValue:
    """G_q(V, P^i) from the five-case prime-power table."""
    base = omega.spec
    _check_base(base)
    V = lift(V, base)
    N = base.q
    norm = N**P.degree
    alpha, V1 = _valuation(V, P)
    p = base.p
    f = _prime_power(P, i)
    zero = GaussSumValue(CycloNumber.zero(p), V, f, N)
    below = alpha is None or i <= alpha
    if below:
        if i % 3:
            return zero
        return GaussSumValue(CycloNumber.rational(p, euler_phi(f)), V, f, N)
    if i >= alpha + 2:
        return zero
    # i == alpha + 1
    if i % 3 == 0:
        return GaussSumValue(CycloNumber.rational(p, -(norm ** (i - 1))), V, f, N)
    c = residue_model(base, P.degree, omega).symbol(P, V1)
    value, total_pow = _top_layer(P, i, omega, odd_sign, c)
    return GaussSumValue(value, V, f, N, total_pow).normalized()


# --- full Gauss sum of a restricted character ------------------------------------------

def gauss_full(chi: CubicChar) -> GaussSumValue:
    """G(chi) = sum over a mod h of chi(a) e_q(a/h), h = F sigma(F) in F_q[T]."""
    h = chi.restricted_modulus
    small = h.spec
    n = h.degree
    keys = residue_keys(small, n)
    lifted = embedding(small, chi.base)[keys]
    codes = np.zeros(keys.shape[0], dtype=np.int8)
    for prime, e in zip(chi.primes, chi.exponents):
        model = residue_model(chi.base, prime.degree, chi.omega)
        c = model.codes(lifted, model.root(prime))
        c = np.where(c == ZERO, ZERO, (e * c.astype(np.int64)) % 3).astype(np.int8)
        codes = np.where((codes == ZERO) | (c == ZERO), ZERO, (codes + c) % 3).astype(np.int8)
    W = head_functionals(small, h, [Poly.one(small)])
    exps = _digit_matrix(small, keys) @ W % small.p
    return GaussSumValue(sums_from_codes(small.p, codes, exps)[0], None, h, small.q)


def gauss_full_conj_relation(chi: CubicChar) -> bool:
    """conj(G(chi)) == chi(-1) G(conj chi); chi(-1) = 1 for these even characters."""
    return gauss_full(chi).value.conj() == gauss_full(chi.conj()).value


# --- character sums through Gauss sums ------------------------------------------------------

def character_sum(f: Poly, m: int, omega: OmegaMap) -> CycloNumber:
    """sum over monic h of degree m of chi_f(h)."""
    base = omega.spec
    keys = np.array([list(h.coeffs) for h in enumerate_monic(base, m)], dtype=np.int64)
    codes = character_codes(keys, factorize(f).factors, omega)
    counts = [int((codes == c).sum()) for c in range(3)]
    return CycloNumber.from_omega_pair(base.p, counts[0] - counts[2], counts[1] - counts[2])


def _monic_upto(base: FieldSpec, n: int) -> list[Poly]:
    return [V for d in range(0, n + 1) for V in enumerate_monic(base, d)] if n >= 0 else []


def char_sum_via_gauss(f: Poly, m: int, omega: OmegaMap) -> tuple[CycloNumber, CycloNumber]:
    """(left side, Gauss-sum side) of the character-sum formula for monic f over the base."""
    base = omega.spec
    _check_base(base)
    N = base.q
    n = f.degree
    lhs = character_sum(f, m, omega)
    top = list(enumerate_monic(base, n - m - 1)) if n - m - 1 >= 0 else []
    if n % 3 == 0:
        low = _monic_upto(base, n - m - 2)
        vals = gen_gauss_many([Poly.zero(base)] + low + top, f, omega)
        g0 = vals[0]
        s_low = sum(vals[1 : 1 + len(low)], CycloNumber.zero(base.p))
        s_top = sum(vals[1 + len(low) :], CycloNumber.zero(base.p))
        rhs = (g0 + s_low.scale(N - 1) - s_top).scale(Fraction(N**m, N**n))
    else:
        vals = gen_gauss_many(top, f, omega) if top else []
        s_top = sum(vals, CycloNumber.zero(base.p))
        # N^(m + 1/2) / |f| * conj(eps), eps = N^(-1/2) tau(chi_f restricted to constants)
        eps_tau = tau(base, omega, n % 3)
        rhs = (eps_tau.conj() * s_top).scale(Fraction(N**m, N**n))
    return lhs, rhs


def gauss_average_direct(f: Poly, d: int, omega: OmegaMap) -> CycloNumber:
    """sum over monic F of degree d with gcd(F, f) = 1 of G_q(f, F)."""
    base = omega.spec
    f = lift(f, base)
    total = CycloNumber.zero(base.p)
    for F in enumerate_monic(base, d):
        if gcd(F, f).is_one():
            total = total + gen_gauss_many([f], F, omega)[0]
    return total


# --- identity checks ---------------------------------------------------------------

def _char_value(f: Poly, a: Poly, omega: OmegaMap) -> int:
    """chi_f(a) code via the residue models (3 for zero)."""
    keys = np.array([list(lift(a, omega.spec).coeffs) or [0]], dtype=np.int64)
    return int(character_codes(keys, factorize(f).factors, omega)[0])


def multiplicativity_check(V: Poly, f1: Poly, f2: Poly, omega: OmegaMap) -> bool:
    """G(V, f1 f2) = chi_{f1}(f2)^2 G(V, f1) G(V, f2) for coprime f1, f2."""
    if not gcd(f1, f2).is_one():
        raise ValueError("moduli must be coprime")
    p = omega.spec.p
    lhs = gen_gauss_many([V], f1 * f2, omega)[0]
    c = _char_value(f1, f2, omega)
    rhs = CycloNumber.omega_power(p, 2 * c) * gen_gauss_many([V], f1, omega)[0] * gen_gauss_many([V], f2, omega)[0]
    return lhs == rhs


def twisted_relation_check(a: Poly, V: Poly, f: Poly, omega: OmegaMap) -> bool:
    """G(aV, f) = conj(chi_f(a)) G(V, f) for gcd(a, f) = 1."""
    base = omega.spec
    a = lift(a, base)
    if not gcd(a, f).is_one():
        raise ValueError("a must be coprime to f")
    lhs, g = gen_gauss_many([a * lift(V, base), V], f, omega)
    c = _char_value(f, a, omega)
    return lhs == CycloNumber.omega_power(base.p, -c) * g


def eqn_gauss_char_check(f: Poly, F: Poly, omega: OmegaMap) -> bool:
    """G(1, F) conj(chi_F(f)) = G(f, F) for (f, F) = 1."""
    base = omega.spec
    f = lift(f, base)
    g1, gf = gen_gauss_many([Poly.one(base), f], F, omega)
    c = _char_value(F, f, omega)
    return g1 * CycloNumber.omega_power(base.p, -c) == gf
