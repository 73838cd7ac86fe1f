"""Bessel functions J_{k-1}, their Mellin transform, and the logarithmic-
window Bessel integrals that close the moment computation.

J_nu uses the classical power series below max(12, 2 nu) and the Hankel
asymptotic expansion (six terms in each of the cosine and sine series)
above; both branches are vectorized.  The Mellin transform is evaluated
through log-gamma.  Oscillatory tails of truncated Mellin integrals are
estimated by two rounds of integration by parts against the asymptotic
phase rather than by extending the quadrature window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .arith import is_prime, mobius, ramanujan_sum, euler_phi
from .predictions import sinc_moment
from .testfn import TestFunction, eval_phi, hat_self_convolution

_SERIES_TERMS = 80
# terms per cosine/sine series of the Hankel expansion; 8 keeps the
# relative error at the series/asymptotic switch point below ~2e-10
_ASYM_TERMS = 8


def _bessel_switch(nu):
    return max(12.0, 2.0 * nu)


def bessel_j(nu, x):
    """J_nu(x) for integer nu >= 0, x in [0, 1e6]; vectorized in x."""
    if nu < 0 or int(nu) != nu:
        raise ValueError("nu must be a nonnegative integer")
    nu = int(nu)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x < 0) or np.any(x > 1e6):
        raise ValueError("x must lie in [0, 1e6]")
    out = np.empty_like(x)
    cut = _bessel_switch(nu)
    small = x < cut
    if np.any(small):
        out[small] = _bessel_series(nu, x[small])
    if np.any(~small):
        out[~small] = _bessel_asymptotic(nu, x[~small])
    return float(out[0]) if scalar else out


def _bessel_series(nu, x):
    """Ascending series with exact factorial coefficients."""
    half = 0.5 * x
    term = half**nu / math.factorial(nu)
    acc = term.copy()
    h2 = half * half
    for j in range(1, _SERIES_TERMS):
        term = term * (-h2) / (j * (nu + j))
        acc += term
        if np.all(np.abs(term) <= 1e-19 * (np.abs(acc) + 1e-300)):
            break
    return acc


def _hankel_coeffs(nu, count):
    """a_k(nu) = prod_{i<=k} (4 nu^2 - (2i-1)^2) / (k! 8^k)."""
    mu = 4.0 * nu * nu
    a = [1.0]
    for k in range(1, count):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return a


def _bessel_asymptotic(nu, x):
    a = _hankel_coeffs(nu, 2 * _ASYM_TERMS)
    P = np.zeros_like(x)
    Q = np.zeros_like(x)
    inv = 1.0 / x
    for j in range(_ASYM_TERMS):
        P += (-1.0) ** j * a[2 * j] * inv ** (2 * j)
        Q += (-1.0) ** j * a[2 * j + 1] * inv ** (2 * j + 1)
    w = x - nu * math.pi / 2.0 - math.pi / 4.0
    return np.sqrt(2.0 / (math.pi * x)) * (P * np.cos(w) - Q * np.sin(w))


@dataclass(frozen=True)
class MellinPoint:
    """A point s of the Mellin strip; the default strip is 0 <= Re s <= 1."""

    s: complex

    def in_strip(self, k, extended=False):
        re = self.s.real
        if extended:
            return 1.0 - k < re < 1.5
        return 0.0 <= re <= 1.0


def mellin_g(k, s, extended=False):
    """G_{k-1}(s) = 2^(s-1) Gamma((k-1+s)/2) / Gamma((k+1-s)/2)."""
    if k < 2 or k % 2 != 0:
        raise ValueError("k must be an even integer >= 2")
    pt = s if isinstance(s, MellinPoint) else MellinPoint(complex(s))
    if pt.s.real <= 1.0 - k:
        raise ValueError(f"Re(s) = {pt.s.real} hits the Gamma poles (<= {1 - k})")
    if not pt.in_strip(k, extended=extended):
        raise ValueError(f"s = {pt.s} outside the admissible strip")
    z = pt.s
    val = np.exp(
        (z - 1.0) * math.log(2.0)
        + loggamma((k - 1.0 + z) / 2.0)
        - loggamma((k + 1.0 - z) / 2.0)
    )
    return complex(val)


def bessel_mellin_residual(k, s, cutoff=1e4):
    """|quadrature over [0, X] + oscillatory tail estimate - closed form|.

    The tail int_X^inf J_{k-1}(x) x^(s-1) dx is estimated from the Hankel
    leading form by two integrations by parts against the phase.
    """
    if not 0.2 <= s <= 1.0:
        raise ValueError("s must lie in [0.2, 1.0]")
    nu = k - 1
    X = float(cutoff)
    main = _quad_bessel_power(nu, s, X)
    tail = _bessel_tail_estimate(nu, s, X)
    exact = mellin_g(k, s).real
    return abs(main + tail - exact)


def _quad_bessel_power(nu, s, X):
    """int_0^X J_nu(x) x^(s-1) dx by per-half-period Gauss-Legendre."""
    nodes, weights = np.polynomial.legendre.leggauss(8)
    total = 0.0
    # smooth start: [0, 2] with a finer rule (integrand ~ x^(nu+s-1) near 0)
    n0, w0 = np.polynomial.legendre.leggauss(40)
    a, b = 0.0, min(2.0, X)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    xs = mid + half * n0
    total += half * np.sum(w0 * bessel_j(nu, xs) * xs ** (s - 1.0))
    if X <= 2.0:
        return total
    edges = np.arange(2.0, X, math.pi)
    edges = np.append(edges, X)
    lo = edges[:-1]
    hi = edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    xs = mid[:, None] + half[:, None] * nodes[None, :]
    vals = bessel_j(nu, xs.ravel()).reshape(xs.shape) * xs ** (s - 1.0)
    total += float(np.sum(half * (vals @ weights)))
    return total


def _bessel_tail_estimate(nu, s, X):
    """Two-term integration-by-parts estimate of int_X^inf J_nu(x) x^(s-1) dx."""
    W = X - nu * math.pi / 2.0 - math.pi / 4.0
    a = s - 1.5
    coeff = math.sqrt(2.0 / math.pi)
    lead = -(X**a) * math.sin(W) - a * X ** (a - 1.0) * math.cos(W)
    corr = -((4.0 * nu * nu - 1.0) / 8.0) * X ** (a - 1.0) * math.cos(W)
    return coeff * (lead + corr)


@dataclass(frozen=True)
class BesselIntegralParams:
    """The (k, m, b, N) bundle; R = k^2 N is the analytic conductor."""

    k: int
    m: int
    b: int
    N: int
    R: int = 0

    def __post_init__(self):
        if self.k < 2 or self.k % 2 != 0:
            raise ValueError("k must be even and >= 2")
        if self.m < 1 or self.b < 1 or self.N < 1:
            raise ValueError("m, b, N must be positive")
        expected = self.k**2 * self.N
        if self.R == 0:
            object.__setattr__(self, "R", expected)
        elif self.R != expected:
            raise ValueError(f"R = {self.R} but k^2 N = {expected}")


def _window_bessel_integral(hat_pp, k, c, log_r):
    """int_0^inf J_{k-1}(x) hat(2 log(x/c) / log R) dx.

    The window support [lo, hi] of the hat fixes the x-range exactly:
    x in [c e^(lo log R / 2), c e^(hi log R / 2)]; nothing is guessed.
    """
    lo, hi = hat_pp.support
    arg_hi = hi * log_r / 2.0
    if arg_hi > 690.0:
        raise OverflowError("upper quadrature window exceeds float range")
    x_lo = c * math.exp(lo * log_r / 2.0)
    x_hi = c * math.exp(arg_hi)
    nu = k - 1

    def hat_of_x(x):
        return hat_pp(2.0 * np.log(x / c) / log_r)

    nodes, weights = np.polynomial.legendre.leggauss(10)
    total = 0.0
    # log-spaced panels up to min(x_hi, 2): the window varies on a log scale
    x_mid = min(2.0, x_hi)
    if x_lo < x_mid:
        edges = np.geomspace(x_lo, x_mid, 48)
        total += _gl_sum(edges, nodes, weights, nu, hat_of_x)
    if x_hi > x_mid:
        count = int(math.ceil((x_hi - x_mid) / (math.pi / 2.0)))
        edges = np.linspace(x_mid, x_hi, count + 1)
        total += _gl_sum(edges, nodes, weights, nu, hat_of_x)
    return total


def _gl_sum(edges, nodes, weights, nu, hat_of_x):
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    xs = mid[:, None] + half[:, None] * nodes[None, :]
    flat = xs.ravel()
    vals = bessel_j(nu, flat) * hat_of_x(flat)
    return float(np.sum(half * (vals.reshape(xs.shape) @ weights)))


def i_n_integral(f: TestFunction, n, p: BesselIntegralParams):
    """I_n = (b sqrt(N) / 2 pi m) (1/log R) int_0^inf J_{k-1}(x)
    hatPhi_n(2 log(b x sqrt(N) / 4 pi m) / log R) dx."""
    if n * f.sigma >= 2.0:
        raise ValueError("need n * sigma < 2")
    hat_n = hat_self_convolution(f, n)
    if np.all(hat_n.coeffs == 0.0):
        return 0.0
    log_r = math.log(p.R)
    c = 4.0 * math.pi * p.m / (p.b * math.sqrt(p.N))
    integral = _window_bessel_integral(hat_n, p.k, c, log_r)
    return float(p.b * math.sqrt(p.N) / (2.0 * math.pi * p.m) * integral / log_r)


@dataclass(frozen=True)
class IlsCheck:
    lhs: float
    rhs: float
    residual: float
    b_tail_bound: float


def ils_sum_residual(psi: TestFunction, k, N, eps=0.05, b_cut=1000):
    """Diagnostic for the one-dimensional arithmetic-sum identity.

    lhs = sum_{m <= N^eps} m^-2 sum_{(b,N)=1, b <= b_cut} R(m^2,b) R(1,b) /
          phi(b) * (1/log R) int J_{k-1}(y) hatPsi(2 log(b y sqrt(N) /
          4 pi m)/log R) dy
    rhs = -1/2 [ int Psi(x) S(2x) dx - Psi(0)/2 ]

    The residual is reported, not gated: it carries the finite-N error term.
    """
    if not is_prime(N):
        raise ValueError("N must be prime")
    if b_cut < 10**3:
        raise ValueError("b_cut must be at least 10^3")
    if psi.sigma >= 2.0:
        raise ValueError("hat support must lie inside (-2, 2)")
    log_r = math.log(k * k * N)
    sqrt_n = math.sqrt(N)
    m_max = max(1, int(N**eps))
    lhs = 0.0
    if np.all(psi.hat.coeffs == 0.0):
        m_max = 0
    for m in range(1, m_max + 1):
        for b in range(1, b_cut + 1):
            if math.gcd(b, N) != 1:
                continue
            mu = mobius(b)
            if mu == 0:
                continue  # R(1, b) = mu(b) kills non-squarefree b
            ram = ramanujan_sum(m * m, b)
            if ram == 0:
                continue
            c = 4.0 * math.pi * m / (b * sqrt_n)
            w = _window_bessel_integral(psi.hat, k, c, log_r) / log_r
            lhs += (ram * mu) / (m * m * euler_phi(b)) * w
    rhs = -0.5 * (sinc_moment(psi, 1) - 0.5 * eval_phi(psi, 0.0))
    tail = _ils_tail_bound(psi, k, N, m_max, b_cut, log_r)
    return IlsCheck(lhs=float(lhs), rhs=float(rhs), residual=abs(lhs - rhs), b_tail_bound=tail)


def _ils_tail_bound(psi, k, N, m_max, b_cut, log_r):
    """Crude bound on the dropped b > b_cut terms.

    |J_{k-1}(y)| <= (y/2)^(k-1)/(k-1)! makes the window integral O(b^-k);
    |R(m^2,b) R(1,b)| <= sigma(m^2) <= m^4 and 1/phi(b) <= 8/b close it.
    """
    hat_max = float(np.max(np.abs(psi.hat.coeffs))) * (1 + psi.sigma) ** psi.hat.degree
    total = 0.0
    for m in range(1, m_max + 1):
        x_hi = (4.0 * math.pi * m / (b_cut * math.sqrt(N))) * (k * k * N) ** (psi.sigma / 2.0)
        w_bound = hat_max * x_hi**k / (2.0 ** (k - 1) * math.factorial(k - 1) * k * log_r)
        total += m**2 * 8.0 * w_bound / k
    return total
