"""Admissible test functions: even, with compactly supported Fourier transform.

Two families are supported: the Fejer kernel phi(x) = (sin(pi sigma x) /
(pi sigma x))^2, whose transform is the triangle of height 1/sigma on
[-sigma, sigma], and general hat splines given as exact piecewise
polynomials.  The module also provides the n-fold self-convolution of the
hat (the transform of phi^n), the oscillatory moments int phi^n S(2x) dx,
and the Plancherel identity residual connecting the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .piecewise import PiecewisePolynomial, pp_from_text

_SMALL_ARG = 1e-4


def sinc(x):
    """S(x) = sin(pi x) / (pi x); series below |pi x| = 1e-4."""
    z = np.pi * np.asarray(x, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    small = np.abs(z) < _SMALL_ARG
    zs = z[small]
    z2 = zs * zs
    # 6-term Taylor expansion of sin(z)/z
    out[small] = (
        1.0
        - z2 / 6.0
        + z2**2 / 120.0
        - z2**3 / 5040.0
        + z2**4 / 362880.0
        - z2**5 / 39916800.0
    )
    zb = z[~small]
    out[~small] = np.sin(zb) / zb
    return float(out[0]) if scalar else out


class FixedKernels:
    """The fixed kernels of the moment formulas."""

    @staticmethod
    def S(x):
        return sinc(x)

    @staticmethod
    def S2(x):
        """S(2x), the Fourier transform of (1/2) 1_{|u| <= 1}."""
        return sinc(2.0 * np.asarray(x, dtype=float))

    @staticmethod
    def box(u):
        """Indicator of |u| <= 1."""
        return (np.abs(np.asarray(u, dtype=float)) <= 1.0).astype(float)


@dataclass(frozen=True)
class TestFunction:
    """An even test function phi with hat(phi) = `hat` supported in [-sigma, sigma].

    fejer_sigma is set when phi is the Fejer kernel, enabling closed-form
    evaluation.  The decay envelope |phi(x)| <= min(phi_max, lin_decay/|x|,
    quad_decay/x^2) drives all tail truncations downstream.
    """

    hat: PiecewisePolynomial
    sigma: float
    fejer_sigma: float | None = None
    phi_max: float = 1.0
    lin_decay: float | None = None
    quad_decay: float | None = None

    def eval_hat(self, y):
        """hat(phi)(y); exactly zero outside [-sigma, sigma]."""
        return self.hat(y)

    def phi(self, x):
        return eval_phi(self, x)

    def envelope(self, x):
        """Pointwise upper bound for |phi(x)|."""
        x = np.abs(np.asarray(x, dtype=float))
        out = np.full_like(x, self.phi_max)
        if self.lin_decay is not None:
            nz = x > 0
            out[nz] = np.minimum(out[nz], self.lin_decay / x[nz])
        if self.quad_decay is not None:
            nz = x > 0
            out[nz] = np.minimum(out[nz], self.quad_decay / x[nz] ** 2)
        return out

    def envelope_power_integral(self, n, lo=0.0):
        """Exact integral of envelope(x)^n over |x| > lo."""
        pieces = [(0, self.phi_max)]
        if self.lin_decay is not None:
            pieces.append((1, self.lin_decay))
        if self.quad_decay is not None:
            pieces.append((2, self.quad_decay))
        # envelope = min over c/x^p laws; integrate the piecewise minimum
        xs = [lo]
        for p1, c1 in pieces:
            for p2, c2 in pieces:
                if p1 < p2 and c1 > 0 and c2 > 0:
                    x_cross = (c2 / c1) ** (1.0 / (p2 - p1))
                    if x_cross > lo:
                        xs.append(x_cross)
        xs = sorted(set(xs))
        total = 0.0
        for a, b in zip(xs[:-1], xs[1:]):
            mid = 0.5 * (a + b)
            p, c = min(pieces, key=lambda pc: pc[1] / mid ** pc[0])
            total += _power_integral(c**n, p * n, a, b)
        a = xs[-1]
        p, c = min(pieces, key=lambda pc: pc[1] / (a + 1.0) ** pc[0])
        if p * n <= 1:
            return math.inf
        total += c**n * a ** (1 - p * n) / (p * n - 1)
        return 2.0 * total


def _power_integral(c_pow_n, pn, a, b):
    """int_a^b c^n / x^(p n) dx over a finite piece."""
    if pn == 0:
        return c_pow_n * (b - a)
    if pn == 1:
        return c_pow_n * math.log(b / a)
    return c_pow_n / (pn - 1) * (a ** (1 - pn) - b ** (1 - pn))


def make_fejer(sigma):
    """Fejer test function: phi(0) = 1, triangular hat of height 1/sigma."""
    if not 0.0 < sigma <= 1.0:
        raise ValueError(f"sigma must lie in (0, 1], got {sigma}")
    h = 1.0 / sigma
    hat = PiecewisePolynomial(
        np.array([-sigma, 0.0, sigma]),
        np.array([[h, h / sigma], [h, -h / sigma]]),
    )
    quad = 1.0 / (math.pi * sigma) ** 2
    return TestFunction(
        hat=hat,
        sigma=float(sigma),
        fejer_sigma=float(sigma),
        phi_max=1.0,
        lin_decay=math.sqrt(quad),  # min(1, q/x^2) <= sqrt(q)/|x|
        quad_decay=quad,
    )


def make_hat_spline(pp):
    """Test function from an explicit hat; phi is the exact inverse Fourier
    integral of the panels (polynomial x cosine, integrated in closed form).
    """
    if isinstance(pp, str):
        pp = pp_from_text(pp)
    a, b = pp.support
    if not np.isfinite(a) or not np.isfinite(b):
        raise ValueError("hat must have bounded support")
    if not pp.is_even(tol=1e-9):
        raise ValueError("hat must be an even function")
    sigma = float(max(abs(a), abs(b)))
    phi_max = pp.abs_integral()
    # decay envelope by integration by parts: hat jumps give 1/x, jumps of
    # the derivative (hat continuous) give 1/x^2
    continuous = pp.is_continuous(tol=1e-9)
    d1 = pp.derivative()
    lin = (sum(abs(j) for j in pp.jump_sizes()) + d1.abs_integral()) / (2 * math.pi)
    if continuous:
        d1_jumps = sum(abs(j) for j in d1.jump_sizes())
        d2_abs = d1.derivative().abs_integral() if pp.degree >= 2 else 0.0
        quad = float((d1_jumps + d2_abs) / (2 * math.pi) ** 2)
    else:
        quad = None
    return TestFunction(
        hat=pp,
        sigma=sigma,
        fejer_sigma=None,
        phi_max=float(phi_max),
        lin_decay=float(lin),
        quad_decay=quad,
    )


def eval_phi(f, x):
    """phi(x); Fejer closed form or exact panel-wise inverse Fourier integral."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if f.fejer_sigma is not None:
        s = sinc(f.fejer_sigma * x)
        out = s * s
    else:
        out = _cosine_transform(f.hat, x)
    return float(out[0]) if scalar else out


def _cosine_transform(pp, x):
    """int pp(y) cos(2 pi x y) dy, exact per panel, vectorized over x."""
    c = 2.0 * math.pi * x
    ymax = max(abs(pp.support[0]), abs(pp.support[1]))
    out = np.zeros_like(x)
    small = np.abs(c) * ymax < 6.0
    if np.any(small):
        out[small] = _cos_series(pp, c[small])
    big = ~small
    if np.any(big):
        out[big] = _cos_parts(pp, c[big])
    return out


def _cos_series(pp, c):
    """Series sum_k (-1)^k c^(2k)/(2k)! * int y^(2k) pp(y) dy (26 terms)."""
    total = np.zeros_like(c)
    c2 = c * c
    power = np.ones_like(c)
    for k in range(26):
        mom = pp.moment(2 * k)
        total += ((-1.0) ** k) * power * mom / math.factorial(2 * k)
        power = power * c2
    return total


def _cos_parts(pp, c):
    """Repeated integration by parts: terms P^(d)(y) Im[i^d e^(icy)] / c^(d+1)."""
    total = np.zeros_like(c)
    for k in range(len(pp.breakpoints) - 1):
        a, b = pp.breakpoints[k], pp.breakpoints[k + 1]
        rows = [pp.coeffs[k]]
        while len(rows[-1]) > 1:
            rows.append(rows[-1][1:] * np.arange(1, len(rows[-1])))
        for d, row in enumerate(rows):
            i_d = 1j**d
            cb = np.imag(i_d * np.exp(1j * c * b))
            ca = np.imag(i_d * np.exp(1j * c * a))
            pb = float(np.polyval(row[::-1], b))
            pa = float(np.polyval(row[::-1], a))
            total += (pb * cb - pa * ca) / c ** (d + 1)
    return total


def hat_self_convolution(f, n, max_degree=16):
    """Exact n-fold self-convolution of the hat: the transform of phi^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 8:
        raise ValueError("n must be <= 8")
    out = f.hat
    for _ in range(n - 1):
        out = out.convolve(f.hat, max_degree=max_degree)
    return out


def sinc_moment(f, n, tol=1e-8):
    """int phi(x)^n S(2x) dx to absolute tolerance tol.

    The integrand is band-limited (hat support n*sigma plus the box of
    width 1), so a uniform trapezoid sum at rate > n*sigma + 1 is exact by
    Poisson summation; only the envelope-bounded tail beyond the cutoff X
    contributes error, and X is grown until that bound is below tol/10.
    """
    if np.all(f.hat.coeffs == 0.0):
        return 0.0
    X = _sinc_moment_cutoff(f, n, tol)
    h = 1.0 / (n * f.sigma + 2.5)
    k = np.arange(0, int(math.ceil(X / h)) + 1)
    x = k * h
    w = np.full_like(x, h)
    vals = eval_phi(f, x) ** n * sinc(2.0 * x)
    # even integrand: double the positive half, x = 0 counted once
    return float(2.0 * np.sum(w * vals) - h * vals[0])


def _sinc_moment_cutoff(f, n, tol):
    lo = 10.0 * (1.0 + f.sigma)
    if f.lin_decay is None and f.quad_decay is None:
        raise ValueError("test function carries no decay envelope")
    X = lo
    for _ in range(200):
        # |S(2x)| <= 1/(2 pi x) for the tail bound
        tail = f.envelope_power_integral(n, lo=X) / (2.0 * math.pi * X)
        if tail < tol / 10.0:
            return X
        X *= 1.6
    raise ValueError("sinc moment tail bound did not converge")


def ft_identity_residual(f, n):
    """LHS - RHS of the Plancherel box identity.

    residual = [int phi^n S(2x) dx - phi(0)^n / 2]
               + (1/2) int...int hat(u_1)...hat(u_n) 1_{|sum u| > 1} du
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 3:
        raise ValueError("hat-side integral supported only up to dimension 3")
    lhs = sinc_moment(f, n, tol=1e-9) - 0.5 * eval_phi(f, 0.0) ** n
    return lhs + 0.5 * hat_tail_mass(f.hat, n)


def hat_tail_mass(pp, n):
    """int...int pp(u_1)...pp(u_n) 1_{|u_1+...+u_n| > 1} du, exactly.

    Nested exact integration: the innermost variable integrates in closed
    form through the antiderivative; each outer level splits its range at
    the kink locations induced below and uses Gauss-Legendre of exact
    degree on each smooth piece.
    """
    total = pp.integrate()
    if n == 1:
        return total - pp.integrate(-1.0, 1.0)

    def inner1(t):
        # int pp(u) 1_{|t + u| > 1} du
        return total - (pp.cumulative(1.0 - t) - pp.cumulative(-1.0 - t))

    kinks1 = sorted(
        {1.0 - b for b in pp.breakpoints} | {-1.0 - b for b in pp.breakpoints}
    )
    if n == 2:
        return _pp_weighted_integral(pp, inner1, kinks1, pp.degree + 2, vectorized=True)

    deg = pp.degree

    def inner2(t):
        # int pp(v) inner1(t + v) dv, exact piecewise
        cuts = sorted(
            set(pp.breakpoints)
            | {k - t for k in kinks1 if pp.support[0] < k - t < pp.support[1]}
        )
        nodes, weights = np.polynomial.legendre.leggauss(2 * deg + 3)
        acc = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            if b <= a:
                continue
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            v = mid + half * nodes
            acc += half * np.sum(weights * pp(v) * inner1(t + v))
        return acc

    kinks2 = sorted({k - b for k in kinks1 for b in pp.breakpoints})
    return _pp_weighted_integral(pp, inner2, kinks2, 3 * deg + 5, vectorized=False)


def _pp_weighted_integral(pp, func, kinks, n_nodes, vectorized):
    """int pp(u) func(u) du with func piecewise smooth between kinks."""
    cuts = sorted(set(pp.breakpoints) | {k for k in kinks if pp.support[0] < k < pp.support[1]})
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    acc = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        u = mid + half * nodes
        vals = func(u) if vectorized else np.array([func(x) for x in u])
        acc += half * np.sum(weights * pp(u) * vals)
    return float(acc)
