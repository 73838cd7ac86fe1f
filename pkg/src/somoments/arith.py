"""Dirichlet characters and the exponential sums feeding the expansion lemmas.

Character tables are built from prime-power components (primitive roots for
odd prime powers, the <-1> x <5> decomposition for 2^k, k >= 3) and stored
densely.  All angles are reduced rational multiples of 2 pi before any
trigonometry, so the roots of unity carry no accumulated phase error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


class WeilBoundError(RuntimeError):
    """The computed Kloosterman sum violates the divisor-weighted Weil bound."""


class ConsistencyError(RuntimeError):
    """Two independent evaluations of the same quantity disagree."""


# -- elementary number theory ---------------------------------------------


def factorize(n):
    """Prime factorization as a list of (p, exponent)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n):
    phi = 1
    for p, e in factorize(n):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def mobius(n):
    mu = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        mu = -mu
    return mu


def divisor_count(n):
    return math.prod(e + 1 for _, e in factorize(n))


def is_prime(n):
    return n >= 2 and factorize(n) == [(n, 1)]


def modinv(a, q):
    """Modular inverse by the extended Euclid algorithm."""
    a %= q
    old_r, r = a, q
    old_s, s = 1, 0
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
    if old_r != 1:
        raise ValueError(f"{a} is not invertible modulo {q}")
    return old_s % q


def _primitive_root_mod_pk(p, k):
    """Generator of the cyclic unit group mod p^k, p an odd prime."""
    order = p - 1
    fac = [f for f, _ in factorize(order)]
    g = None
    for cand in range(2, p):
        if all(pow(cand, order // f, p) != 1 for f in fac):
            g = cand
            break
    if k == 1:
        return g
    # lift: g must not satisfy g^(p-1) = 1 mod p^2
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _unit_group_factors(q):
    """Cyclic factors of (Z/q)^* as (generator mod q, order) pairs."""
    if q == 1:
        return []
    factors = []
    comps = factorize(q)
    for p, k in comps:
        pk = p**k
        rest = q // pk
        # CRT embedding: g on this component, 1 elsewhere
        def lift(g0):
            if rest == 1:
                return g0 % q
            inv = modinv(pk % rest, rest) if rest > 1 else 0
            # x = g0 mod pk, x = 1 mod rest
            return (g0 + pk * ((1 - g0) * inv % rest)) % q

        if p == 2:
            if k == 1:
                continue
            if k == 2:
                factors.append((lift(3), 2))
            else:
                factors.append((lift(pk - 1), 2))          # <-1>
                factors.append((lift(5), 2 ** (k - 2)))    # <5>
        else:
            g = _primitive_root_mod_pk(p, k)
            factors.append((lift(g), (p - 1) * p ** (k - 1)))
    return factors


@lru_cache(maxsize=256)
def _roots_of_unity(L):
    r = np.arange(L)
    return np.cos(2 * np.pi * r / L) + 1j * np.sin(2 * np.pi * r / L)


def e_frac(num, den):
    """e(num/den) from the reduced rational angle."""
    return complex(_roots_of_unity(den)[num % den])


# -- characters ------------------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacter:
    q: int
    values: np.ndarray  # length q, roots of unity on units, 0 elsewhere
    is_principal: bool
    order: int

    def __call__(self, a):
        return self.values[int(a) % self.q]


@dataclass(frozen=True)
class CharacterGroup:
    q: int
    characters: tuple

    def __iter__(self):
        return iter(self.characters)

    def __len__(self):
        return len(self.characters)

    @property
    def principal(self):
        return self.characters[0]


@lru_cache(maxsize=64)
def character_group(q):
    """All phi(q) Dirichlet characters mod q as dense value tables."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    if q > 10**4:
        raise ValueError("modulus capped at 10^4")
    if q == 1:
        chi = DirichletCharacter(1, np.array([1.0 + 0j]), True, 1)
        return CharacterGroup(1, (chi,))
    factors = _unit_group_factors(q)
    orders = [o for _, o in factors]
    L = math.lcm(*orders) if orders else 1
    units = np.array([a for a in range(q) if math.gcd(a, q) == 1])
    # discrete logs of every unit with respect to the cyclic factors
    logs = np.zeros((len(units), len(factors)), dtype=np.int64)
    index_of = {int(a): i for i, a in enumerate(units)}
    if factors:
        exps = [range(o) for o in orders]
        gen_pows = []
        for (g, o) in factors:
            pows = [1]
            for _ in range(o - 1):
                pows.append(pows[-1] * g % q)
            gen_pows.append(pows)

        def fill(i, residue, evec):
            if i == len(factors):
                logs[index_of[residue]] = evec
                return
            for e in range(orders[i]):
                fill(i + 1, residue * gen_pows[i][e] % q, evec + [e])

        fill(0, 1, [])
    roots = _roots_of_unity(L)
    chars = []
    for cvec in np.ndindex(*orders) if orders else [()]:
        weights = np.array(
            [c * (L // o) for c, o in zip(cvec, orders)], dtype=np.int64
        )
        ang = (logs @ weights) % L if factors else np.zeros(len(units), dtype=np.int64)
        table = np.zeros(q, dtype=complex)
        table[units] = roots[ang]
        order = 1
        for c, o in zip(cvec, orders):
            order = math.lcm(order, o // math.gcd(c, o))
        chars.append(
            DirichletCharacter(
                q=q,
                values=table,
                is_principal=all(c == 0 for c in cvec),
                order=order,
            )
        )
    chars.sort(key=lambda ch: not ch.is_principal)
    return CharacterGroup(q, tuple(chars))


# -- exponential sums -------------------------------------------------------


def gauss_sum(chi: DirichletCharacter, n):
    """G_chi(n) = sum_a chi(a) e(a n / q) by direct summation."""
    q = chi.q
    roots = _roots_of_unity(q)
    a = np.arange(q)
    return complex(np.sum(chi.values * roots[(a * (n % q)) % q]))


def ramanujan_sum(n, q):
    """R(n, q), computed both as the unit exponential sum and the Mobius
    divisor sum; the two must agree to 1e-9."""
    if q < 1:
        raise ValueError("q must be >= 1")
    roots = _roots_of_unity(q)
    a = np.arange(q)
    units = np.array([math.gcd(int(x), q) == 1 for x in a])
    exp_side = np.sum(roots[(a[units] * (n % q)) % q])
    g = math.gcd(n, q)
    div_side = sum(mobius(q // d) * d for d in range(1, g + 1) if g % d == 0)
    if abs(exp_side - div_side) > 1e-9:
        raise ConsistencyError(
            f"R({n},{q}): exponential sum {exp_side} vs divisor sum {div_side}"
        )
    return div_side


@lru_cache(maxsize=512)
def _units_and_inverses(q):
    units = np.array([d for d in range(1, q + 1) if math.gcd(d, q) == 1], dtype=np.int64)
    invs = np.array([modinv(int(d), q) for d in units], dtype=np.int64)
    return units % q, invs


def kloosterman_sum(m, n, q):
    """S(m, n; q) = sum over units d of e((m d + n d^-1)/q).

    The imaginary part must vanish (conjugate symmetry) and the result must
    satisfy the divisor-weighted Weil bound, else the computation is in error.
    """
    if q < 1 or q > 10**5:
        raise ValueError("q must be in 1..10^5")
    roots = _roots_of_unity(q)
    units, invs = _units_and_inverses(q)
    total = complex(np.sum(roots[(m * units + n * invs) % q]))
    if abs(total.imag) > 1e-9:
        raise ConsistencyError(f"S({m},{n};{q}) has imaginary part {total.imag}")
    value = float(total.real)
    g = math.gcd(m, math.gcd(n, q))
    gm, gn = math.gcd(m, q), math.gcd(n, q)
    bound = g * math.sqrt(min(q / gm, q / gn)) * divisor_count(q) + 1e-6
    if abs(value) > bound:
        raise WeilBoundError(
            f"|S({m},{n};{q})| = {abs(value):.6g} exceeds the Weil bound {bound:.6g}"
        )
    return value


@dataclass(frozen=True)
class SumParams:
    """Parameter bundle for the Kloosterman expansion identities."""

    m: int = 1
    N: int = 3
    b: int = 1
    P: int = 1
    Q: int = 1
    n: int = 0
    r: int = 0

    def validate_c1(self):
        if not is_prime(self.N):
            raise ValueError("N must be prime")
        if math.gcd(self.P, self.b) != 1:
            raise ValueError("(P, b) must be 1")
        if math.gcd(self.N, self.b) != 1:
            raise ValueError("(N, b) must be 1")

    def validate_c4(self):
        if not is_prime(self.N):
            raise ValueError("N must be prime")
        if math.gcd(self.Q, self.N) != 1:
            raise ValueError("(Q, N) must be 1")
        if math.gcd(self.N, self.b) != 1:
            raise ValueError("(N, b) must be 1")
        r = math.gcd(self.Q, self.b)
        if self.r and self.r != r:
            raise ValueError(f"supplied r = {self.r} but gcd(Q, b) = {r}")
        if math.gcd(r, self.b // r) != 1:
            raise ValueError("(r, b/r) must be 1")
        return r


def kloosterman_char_expansion_residual(p: SumParams):
    """|LHS - RHS| of the prime-level Kloosterman-to-character expansion:

    S(m^2, P N; N b) = -(1/phi(b)) sum_{chi mod b} chi(N) G_chi(m^2)
                        G_chi(1) conj(chi)(P).
    """
    p.validate_c1()
    lhs = kloosterman_sum(p.m**2, p.P * p.N, p.N * p.b)
    group = character_group(p.b)
    acc = 0j
    for chi in group:
        acc += (
            chi(p.N)
            * gauss_sum(chi, p.m**2)
            * gauss_sum(chi, 1)
            * np.conj(chi(p.P))
        )
    rhs = -acc / euler_phi(p.b)
    return abs(lhs - rhs)


def kloosterman_char_expansion_r_residual(p: SumParams):
    """|LHS - RHS| of the gcd-r refinement:

    S(m^2, Q; N b) = (1/phi(N b / r)) sum_{chi mod N b / r}
        conj(chi)(Q/r) chi(r) R(m^2, r) G_chi(m^2) G_chi(1),  r = (Q, b).
    """
    r = p.validate_c4()
    lhs = kloosterman_sum(p.m**2, p.Q, p.N * p.b)
    mod = p.N * p.b // r
    group = character_group(mod)
    ram = ramanujan_sum(p.m**2, r)
    acc = 0j
    for chi in group:
        acc += (
            np.conj(chi(p.Q // r))
            * chi(r)
            * ram
            * gauss_sum(chi, p.m**2)
            * gauss_sum(chi, 1)
        )
    rhs = acc / euler_phi(mod)
    return abs(lhs - rhs)


def gauss_square_identity(q, n):
    """sum_chi |G_chi(n)|^2 - phi(q)^2, which vanishes when (n, q) = 1."""
    if math.gcd(n, q) != 1:
        raise ValueError("identity requires (n, q) = 1")
    group = character_group(q)
    total = sum(abs(gauss_sum(chi, n)) ** 2 for chi in group)
    return float(total - euler_phi(q) ** 2)


def hecke_power_coeffs(n):
    """Integer coefficients c_r with lambda(p)^n = sum_r c_r lambda(p^(2r)) for
    even n, lambda(p^(2r+1)) for odd n.

    Self-checks against the Chebyshev realization lambda(p^j) =
    sin((j+1)theta)/sin(theta) with lambda(p) = 2 cos(theta).
    """
    if n < 1 or n > 30:
        raise ValueError("n must be in 1..30")
    m = n // 2
    coeffs = []
    for r in range(m + 1):
        c = math.comb(n, m - r) - (math.comb(n, m - r - 1) if m - r - 1 >= 0 else 0)
        coeffs.append((r, c))
    rng = np.random.default_rng(1693)
    theta = rng.uniform(0.1, math.pi - 0.1, size=50)
    lam = lambda j: np.sin((j + 1) * theta) / np.sin(theta)
    lhs = (2.0 * np.cos(theta)) ** n
    rhs = sum(c * lam(2 * r + (n % 2)) for r, c in coeffs)
    worst = float(np.max(np.abs(lhs - rhs)))
    if worst > 1e-9 * max(1.0, float(np.max(np.abs(lhs)))):
        raise ConsistencyError(f"Chebyshev check failed: residual {worst}")
    return coeffs
