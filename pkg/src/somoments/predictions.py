"""Closed-form limit predictions for the centered moments of the linear statistic.

Means, the extended variance sigma_phi^2, the correction terms R_n, the
parity-split variance formulas, the multidimensional sinc-kernel integrals
Q_n with their composition coefficients, the combinatorial kernel K, and
the cumulant-to-moment conversion.  Combinatorial coefficients are exact
rationals; floats enter only at the final multiply.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .testfn import TestFunction, eval_phi, sinc, sinc_moment

PARITIES = ("even", "odd")


def _parity_sign(parity):
    if parity not in PARITIES:
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    return 1.0 if parity == "even" else -1.0


@dataclass(frozen=True)
class MomentPrediction:
    parity: str
    n: int
    value: float
    gaussian_part: float
    correction: float


@dataclass(frozen=True)
class CompositionTerm:
    """One composition (lambda_1, ..., lambda_m) of n with its exact coefficient
    (-1)^(m+1)/m * n! / prod(lambda_j!).
    """

    lam: tuple
    m: int
    coefficient: Fraction


@dataclass(frozen=True)
class CumulantVector:
    C: tuple

    def __len__(self):
        return len(self.C)


def compositions(n):
    """All compositions of n into ordered positive parts."""
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in compositions(n - first):
            yield (first,) + rest


def composition_terms(n):
    out = []
    for lam in compositions(n):
        m = len(lam)
        coeff = (
            Fraction((-1) ** (m + 1), m)
            * Fraction(math.factorial(n))
            / math.prod(math.factorial(l) for l in lam)
        )
        out.append(CompositionTerm(lam=lam, m=m, coefficient=coeff))
    return out


def composition_sum(n, weight="plain"):
    """Exact composition sums behind the kernel identities.

    plain:            sum of coefficients        (1 for n = 1, else 0)
    two_pow_minus_2m: weighted by (2^n - 2m)     (2 * (-1)^n for n >= 2)
    """
    if n < 1 or n > 12:
        raise ValueError("n must be in 1..12")
    if weight not in ("plain", "two_pow_minus_2m"):
        raise ValueError(f"unknown weight {weight!r}")
    total = Fraction(0)
    for term in composition_terms(n):
        w = Fraction(1) if weight == "plain" else Fraction(2**n - 2 * term.m)
        total += term.coefficient * w
    return total


def eta_sign(lam, ell, j):
    """+1 if slot j (1-based) lies in block ell or earlier, else -1."""
    return 1 if j <= sum(lam[:ell]) else -1


def kernel_K(y):
    """The combinatorial kernel at a tuple y of n values, exact.

    Enumerates all compositions of n and all 2^n sign tuples; each factor
    is the indicator that a signed subset sum stays within [-1, 1].
    """
    y = tuple(float(v) for v in y)
    n = len(y)
    if not 2 <= n <= 8:
        raise ValueError("kernel is evaluated for 2 <= n <= 8")
    total = Fraction(0)
    signs = list(np.ndindex(*(2,) * n))
    for term in composition_terms(n):
        lam = term.lam
        m = term.m
        prefix = np.cumsum([0] + list(lam))
        count = 0
        for eps_bits in signs:
            ok = True
            for ell in range(1, m + 1):
                acc = 0.0
                for j in range(1, n + 1):
                    eta = 1.0 if j <= prefix[ell] else -1.0
                    eps = 1.0 if eps_bits[j - 1] == 0 else -1.0
                    acc += eta * eps * y[j - 1]
                if abs(acc) > 1.0:
                    ok = False
                    break
            if ok:
                count += 1
        total += term.coefficient * count
    return total


def mean_limit(parity, f: TestFunction):
    """Limit mean of the linear statistic: hat(0) + (1/2) int hat, plus the
    mass of hat beyond [-1, 1] for the odd-dimensional family."""
    _parity_sign(parity)
    base = f.eval_hat(0.0) + 0.5 * f.hat.integrate()
    if parity == "odd":
        base += f.hat.integrate() - f.hat.integrate(-1.0, 1.0)
    return float(base)


def sigma2(f: TestFunction, half_range=1.0):
    """sigma_phi^2 = 2 int_{-r}^{r} |y| hat(y)^2 dy, exact by panels."""
    sq = f.hat.multiply(f.hat)
    pos = sq.moment(1, 0.0, half_range)
    neg = -sq.moment(1, -half_range, 0.0)
    return float(2.0 * (pos + neg))


def r_n(f: TestFunction, n, tol=1e-9):
    """R_n = (-1)^(n-1) 2^(n-1) [ int phi^n S(2x) dx - phi(0)^n / 2 ]."""
    if n < 2:
        raise ValueError("R_n is defined for n >= 2")
    s = sinc_moment(f, n, tol=tol)
    return float((-1.0) ** (n - 1) * 2.0 ** (n - 1) * (s - 0.5 * eval_phi(f, 0.0) ** n))


def variance_cross_term(f: TestFunction):
    """int_{y=-1/2}^{1/2} int_{|x| >= 1/2} hat(x+y) hat(x-y) dx dy, exact.

    The inner integral is a panel product of two shifted hats; the outer
    integrand is piecewise polynomial in y between the critical offsets,
    so fixed-order Gauss-Legendre per piece is exact.
    """
    pp = f.hat
    bps = pp.breakpoints
    crit = {0.0, 0.5}
    for bi in bps:
        for bj in bps:
            yc = 0.5 * (bi - bj)
            if 0.0 < yc < 0.5:
                crit.add(float(yc))
        for s in (bi - 0.5, 0.5 - bi, bi + 0.5, -0.5 - bi):
            if 0.0 < s < 0.5:
                crit.add(float(s))
    cuts = sorted(crit)
    nodes, weights = np.polynomial.legendre.leggauss(2 * pp.degree + 4)

    def inner(yv):
        left = pp.translated(-yv)   # hat(x + y)
        right = pp.translated(yv)   # hat(x - y)
        prod = left.multiply(right)
        hi = prod.support[1]
        lo = prod.support[0]
        return prod.integrate(0.5, hi) + prod.integrate(lo, -0.5)

    acc = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        for w, t in zip(weights, nodes):
            acc += half * w * inner(mid + half * t)
    # the integrand is even in y: double the [0, 1/2] half
    return float(2.0 * acc)


def variance_limit(parity, f: TestFunction):
    """Parity-split limit variance: 2 int min(|y|,1) hat^2 +/- 2 x cross term."""
    sign = _parity_sign(parity)
    sq = f.hat.multiply(f.hat)
    lo, hi = sq.support
    term1 = sq.moment(1, 0.0, 1.0) - sq.moment(1, -1.0, 0.0)
    term1 += sq.integrate(1.0, max(hi, 1.0)) + sq.integrate(min(lo, -1.0), -1.0)
    return float(2.0 * term1 + sign * 2.0 * variance_cross_term(f))


def double_factorial_odd(m):
    """(2m - 1)!! with the empty product equal to 1."""
    out = 1
    for j in range(1, m + 1):
        out *= 2 * j - 1
    return out


def centered_moment_prediction(parity, n, f: TestFunction):
    """Limit of the n-th centered moment per the extended-support theorem."""
    sign = _parity_sign(parity)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return MomentPrediction(parity, 1, 0.0, 0.0, 0.0)
    bound = 1.0 / (n - 1)
    if f.sigma > bound + 1e-12:
        raise ValueError(
            f"support half-width {f.sigma} exceeds 1/(n-1) = {bound}; "
            "the moment formula is outside its proven range"
        )
    corr = sign * r_n(f, n)
    if n % 2 == 0:
        m = n // 2
        gauss = double_factorial_odd(m) * sigma2(f) ** m
    else:
        gauss = 0.0
    return MomentPrediction(parity, n, gauss + corr, gauss, corr)


def cumulants_to_moments(C):
    """Raw moments from cumulants via the partition sum.

    moment_n = sum over {k_j >= 0, sum j k_j = n} of
               n! / prod(k_j!) * prod (C_j / j!)^(k_j).
    """
    if isinstance(C, CumulantVector):
        C = C.C
    C = list(C)
    if len(C) > 10:
        raise ValueError("cumulant vectors longer than 10 are not supported")
    out = []
    for n in range(1, len(C) + 1):
        total = 0.0
        for ks in _partition_multiplicities(n):
            coeff = Fraction(math.factorial(n))
            prod = 1.0
            for j, k in enumerate(ks, start=1):
                if k:
                    coeff /= math.factorial(k) * math.factorial(j) ** k
                    prod *= C[j - 1] ** k
            total += float(coeff) * prod
        out.append(total)
    return out


def _partition_multiplicities(n):
    """Multiplicity vectors (k_1, ..., k_n) with sum j*k_j = n."""

    def rec(j, remaining):
        if j > n:
            if remaining == 0:
                yield ()
            return
        for k in range(remaining // j + 1):
            for rest in rec(j + 1, remaining - j * k):
                yield (k,) + rest

    yield from rec(1, n)


# -- the multidimensional sinc-kernel integrals ---------------------------


def q_n_multidim(f: TestFunction, n, tol=None):
    """Q_n: the 2^(n-1)-scaled composition sum of m-dimensional integrals
    int phi^(l_1)(x_1)...phi^(l_m)(x_m) S(x_1-x_2)...S(x_m+x_1) dx.

    Each m-dimensional integral is evaluated on a tensor trapezoid grid
    whose rate exceeds the integrand bandwidth (making the rule exact by
    Poisson summation) and whose cutoff comes from the decay envelope.
    """
    if n not in (2, 3):
        raise ValueError("multidimensional route supports n in {2, 3}")
    bound = 1.0 / (n - 1)
    if f.sigma > bound + 1e-12:
        raise ValueError(f"support half-width must be <= 1/(n-1) = {bound}")
    if tol is None:
        tol = 1e-3 if n == 2 else 1e-2
    total = 0.0
    for term in composition_terms(n):
        total += float(term.coefficient) * q_n_term(f, term.lam, tol / 4.0)
    return 2.0 ** (n - 1) * total


def q_n_term(f: TestFunction, lam, tol):
    """One composition integral (no coefficient, no 2^(n-1) scale)."""
    m = len(lam)
    if m == 1:
        return sinc_moment(f, lam[0], tol=tol)
    if m > 3:
        raise ValueError("nested quadrature restricted to m <= 3")
    X = _q_cutoff(f, lam, tol)
    h = 1.0 / (max(lam) * f.sigma + 2.5)
    half = int(math.ceil(X / h))
    if m == 3 and half > 3000:
        raise ValueError(
            "tensor grid too large for the 3-dimensional route; "
            "the test-function envelope decays too slowly"
        )
    x = np.arange(-half, half + 1) * h
    fs = [eval_phi(f, x) ** l for l in lam]
    if m == 2:
        A = sinc(x[:, None] - x[None, :])
        A *= sinc(x[:, None] + x[None, :])
        return float(h * h * fs[0] @ (A @ fs[1]))
    A = sinc(x[:, None] - x[None, :])
    B = sinc(x[:, None] + x[None, :])
    M = (A * fs[1][None, :]) @ A  # chain over the middle variable
    M *= B
    return float(h**3 * fs[0] @ (M @ fs[2]))


def _q_cutoff(f, lam, tol):
    """Cutoff X so the envelope tail bound of the m-dim integral is < tol.

    On the tail region the largest sinc argument in the cyclic chain is at
    least (2/3) max_j |x_j| (m = 3) or max_j |x_j| (m = 2).
    """
    m = len(lam)
    chain = 1.0 if m == 2 else 2.0 / 3.0
    env0 = [f.envelope_power_integral(l, lo=0.0) for l in lam]
    if not all(np.isfinite(env0)):
        raise ValueError("test function envelope does not decay fast enough")
    X = 20.0
    for _ in range(80):
        tail = 0.0
        for j, l in enumerate(lam):
            rest = math.prod(env0[:j] + env0[j + 1 :])
            tail += f.envelope_power_integral(l, lo=X) * rest
        tail /= math.pi * chain * X
        if tail < tol:
            return X
        X *= 1.4
    raise ValueError("envelope tail bound for Q_n did not converge")
