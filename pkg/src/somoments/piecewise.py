"""Exact piecewise polynomials on compact support.

All Fourier-transform-side objects (the hats) live here.  Panels store
global-coordinate coefficients, constant term first, and every operation
(evaluation, integration, products, convolution) is done with polynomial
antiderivatives rather than grids, so downstream identities carry no
discretization error beyond float64 rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Convolutions raise beyond this panel degree; user-supplied hats are
# validated at degree <= 8 separately.
DEFAULT_DEGREE_CAP = 16

_BP_TOL = 1e-12


def _polyval(coeffs, y):
    """Evaluate constant-first coefficients at y (Horner)."""
    out = np.zeros_like(np.asarray(y, dtype=float))
    for c in coeffs[::-1]:
        out = out * y + c
    return out


def _polyint(coeffs):
    """Antiderivative coefficients (constant of integration 0)."""
    return np.concatenate([[0.0], coeffs / np.arange(1, len(coeffs) + 1)])


def _polyder(coeffs):
    if len(coeffs) <= 1:
        return np.zeros(1)
    return coeffs[1:] * np.arange(1, len(coeffs))


def _polymul(a, b):
    return np.convolve(a, b)


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Compactly supported piecewise polynomial; zero outside the support.

    breakpoints : strictly increasing, length K+1
    coeffs      : (K, D+1) global-coordinate rows, constant term first
    """

    breakpoints: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        cf = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if bp.ndim != 1 or len(bp) < 2:
            raise ValueError("need at least two breakpoints")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if cf.shape[0] != len(bp) - 1:
            raise ValueError("one coefficient row per panel required")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "coeffs", cf)

    # -- basic queries ---------------------------------------------------

    @property
    def support(self):
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    @property
    def degree(self):
        return self.coeffs.shape[1] - 1

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y)
        out = np.zeros_like(y)
        a, b = self.support
        inside = (y >= a) & (y <= b)
        if np.any(inside):
            idx = np.clip(
                np.searchsorted(self.breakpoints, y[inside], side="right") - 1,
                0,
                len(self.breakpoints) - 2,
            )
            vals = np.zeros(idx.shape)
            for k in np.unique(idx):
                sel = idx == k
                vals[sel] = _polyval(self.coeffs[k], y[inside][sel])
            out[inside] = vals
        return float(out[0]) if scalar else out

    def eval_left(self, y):
        """Limit from the left at y (0 at/below the support start)."""
        a, b = self.support
        if y <= a or y > b:
            return 0.0
        k = np.searchsorted(self.breakpoints, y, side="left") - 1
        k = min(max(k, 0), len(self.breakpoints) - 2)
        return float(_polyval(self.coeffs[k], y))

    def eval_right(self, y):
        """Limit from the right at y (0 at/above the support end)."""
        a, b = self.support
        if y < a or y >= b:
            return 0.0
        k = np.searchsorted(self.breakpoints, y, side="right") - 1
        k = min(max(k, 0), len(self.breakpoints) - 2)
        return float(_polyval(self.coeffs[k], y))

    def is_continuous(self, tol=1e-12):
        scale = max(1.0, np.max(np.abs(self.coeffs)))
        for y in self.breakpoints:
            if abs(self.eval_left(y) - self.eval_right(y)) > tol * scale:
                return False
        return True

    def is_even(self, tol=1e-10, samples=257):
        a, b = self.support
        if abs(a + b) > max(abs(a), abs(b), 1.0) * 1e-9:
            return False
        ys = np.linspace(0.0, b, samples)
        return bool(np.max(np.abs(self(ys) - self(-ys))) <= tol * max(1.0, np.max(np.abs(self(ys)))))

    # -- calculus --------------------------------------------------------

    def integrate(self, a=None, b=None):
        """Exact integral over [a, b] (whole support by default)."""
        lo, hi = self.support
        a = lo if a is None else max(a, lo)
        b = hi if b is None else min(b, hi)
        if b <= a:
            return 0.0
        total = 0.0
        for k in range(len(self.breakpoints) - 1):
            pa = max(a, self.breakpoints[k])
            pb = min(b, self.breakpoints[k + 1])
            if pb <= pa:
                continue
            anti = _polyint(self.coeffs[k])
            total += _polyval(anti, pb) - _polyval(anti, pa)
        return float(total)

    def moment(self, power, a=None, b=None):
        """Exact integral of y**power * p(y) over [a, b]."""
        if power == 0:
            return self.integrate(a, b)
        shifted = PiecewisePolynomial(
            self.breakpoints,
            np.hstack([np.zeros((self.coeffs.shape[0], power)), self.coeffs]),
        )
        return shifted.integrate(a, b)

    def cumulative(self, t):
        """Integral from -infinity to t, vectorized."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        panel_int = np.array(
            [
                _polyval(_polyint(self.coeffs[k]), self.breakpoints[k + 1])
                - _polyval(_polyint(self.coeffs[k]), self.breakpoints[k])
                for k in range(len(self.breakpoints) - 1)
            ]
        )
        csum = np.concatenate([[0.0], np.cumsum(panel_int)])
        out = np.empty_like(t)
        a, b = self.support
        out[t <= a] = 0.0
        out[t >= b] = csum[-1]
        mid = (t > a) & (t < b)
        if np.any(mid):
            idx = np.clip(np.searchsorted(self.breakpoints, t[mid], side="right") - 1, 0, len(csum) - 2)
            vals = np.empty(idx.shape)
            for k in np.unique(idx):
                sel = idx == k
                anti = _polyint(self.coeffs[k])
                vals[sel] = csum[k] + _polyval(anti, t[mid][sel]) - _polyval(anti, self.breakpoints[k])
            out[mid] = vals
        return float(out[0]) if scalar else out

    def derivative(self):
        return PiecewisePolynomial(
            self.breakpoints, np.vstack([_polyder(row) for row in self.coeffs])
        )

    def translated(self, s):
        """q with q(y) = p(y - s); breakpoints move right by s."""
        rows = np.zeros_like(self.coeffs)
        for k, row in enumerate(self.coeffs):
            # substitute y -> y - s
            for p, cp in enumerate(row):
                if cp == 0.0:
                    continue
                for r in range(p + 1):
                    rows[k, r] += cp * _binom(p, r) * (-s) ** (p - r)
        return PiecewisePolynomial(self.breakpoints + s, rows)

    def abs_integral(self):
        """Exact integral of |p| (panel-wise sign changes located by roots)."""
        total = 0.0
        for k in range(len(self.breakpoints) - 1):
            a, b = self.breakpoints[k], self.breakpoints[k + 1]
            row = np.trim_zeros(self.coeffs[k], "b")
            if len(row) == 0:
                continue
            pts = [a, b]
            if len(row) > 1:
                roots = np.roots(row[::-1])
                for r in roots:
                    if abs(r.imag) < 1e-9 and a < r.real < b:
                        pts.append(float(r.real))
            pts = sorted(set(pts))
            anti = _polyint(self.coeffs[k])
            for lo, hi in zip(pts[:-1], pts[1:]):
                total += abs(_polyval(anti, hi) - _polyval(anti, lo))
        return float(total)

    def jump_sizes(self):
        """Jumps of p at its breakpoints, support edges included."""
        return [self.eval_right(y) - self.eval_left(y) for y in self.breakpoints]

    # -- algebra ---------------------------------------------------------

    def scaled(self, c):
        return PiecewisePolynomial(self.breakpoints, self.coeffs * c)

    def multiply(self, other):
        """Pointwise product, exact; support is the overlap."""
        lo = max(self.support[0], other.support[0])
        hi = min(self.support[1], other.support[1])
        if hi <= lo + _BP_TOL:
            return zero_pp()
        bp = _merge_breakpoints(
            np.concatenate([self.breakpoints, other.breakpoints]), lo, hi
        )
        deg = self.degree + other.degree
        rows = np.zeros((len(bp) - 1, deg + 1))
        for k in range(len(bp) - 1):
            mid = 0.5 * (bp[k] + bp[k + 1])
            i = np.clip(np.searchsorted(self.breakpoints, mid) - 1, 0, len(self.breakpoints) - 2)
            j = np.clip(np.searchsorted(other.breakpoints, mid) - 1, 0, len(other.breakpoints) - 2)
            prod = _polymul(self.coeffs[i], other.coeffs[j])
            rows[k, : len(prod)] = prod
        return PiecewisePolynomial(bp, rows)

    def convolve(self, other, max_degree=DEFAULT_DEGREE_CAP):
        """Exact convolution (self * other)(y) = int self(t) other(y-t) dt.

        Done symbolically panel pair by panel pair via the bivariate
        antiderivative of self_i(t) * other_j(y - t); never by FFT grids.
        """
        out_deg = self.degree + other.degree + 1
        if out_deg > max_degree:
            raise ValueError(
                f"convolution degree {out_deg} exceeds cap {max_degree}"
            )
        sums = (
            self.breakpoints[:, None] + other.breakpoints[None, :]
        ).ravel()
        bp = _merge_breakpoints(sums, sums.min(), sums.max())
        mids = 0.5 * (bp[:-1] + bp[1:])
        rows = np.zeros((len(bp) - 1, out_deg + 1))
        for i in range(len(self.breakpoints) - 1):
            a0, a1 = self.breakpoints[i], self.breakpoints[i + 1]
            for j in range(len(other.breakpoints) - 1):
                b0, b1 = other.breakpoints[j], other.breakpoints[j + 1]
                anti = _bivariate_antiderivative(self.coeffs[i], other.coeffs[j])
                lo, hi = a0 + b0, a1 + b1
                t1, t2 = a0 + b1, a1 + b0
                m1, m2 = min(t1, t2), max(t1, t2)
                sel = (mids > lo) & (mids < hi)
                for k in np.nonzero(sel)[0]:
                    y = mids[k]
                    if y <= m1:
                        # lower limit a0, upper limit y - b0
                        piece = _poly_sub(_subst_linear(anti, -b0), _subst_const(anti, a0))
                    elif y >= m2:
                        piece = _poly_sub(_subst_const(anti, a1), _subst_linear(anti, -b1))
                    elif t1 <= t2:
                        piece = _poly_sub(_subst_linear(anti, -b0), _subst_linear(anti, -b1))
                    else:
                        piece = _poly_sub(_subst_const(anti, a1), _subst_const(anti, a0))
                    piece = piece[: out_deg + 1]  # higher terms cancel exactly
                    rows[k, : len(piece)] += piece
        return PiecewisePolynomial(bp, rows)

    # -- text format -----------------------------------------------------

    def to_text(self):
        lines = ["breakpoints: " + " ".join(repr(b) for b in self.breakpoints)]
        for row in self.coeffs:
            trimmed = np.trim_zeros(row, "b")
            if len(trimmed) == 0:
                trimmed = np.zeros(1)
            lines.append(" ".join(repr(c) for c in trimmed))
        return "\n".join(lines) + "\n"


def zero_pp():
    return PiecewisePolynomial(np.array([0.0, 1.0]), np.zeros((1, 1)))


def pp_from_text(text):
    """Parse the hat-spline text format.

    Line 1: ``breakpoints: a0 a1 ... ak``; then k lines of polynomial
    coefficients, constant term first, decimal ASCII.
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("breakpoints:"):
        raise ValueError("first line must start with 'breakpoints:'")
    bp = np.array([float(v) for v in lines[0].split(":", 1)[1].split()])
    rows = [np.array([float(v) for v in ln.split()]) for ln in lines[1:]]
    if len(rows) != len(bp) - 1:
        raise ValueError(
            f"expected {len(bp) - 1} coefficient lines, got {len(rows)}"
        )
    deg = max(len(r) for r in rows) - 1
    if deg > 8:
        raise ValueError(f"panel degree {deg} exceeds 8")
    coeffs = np.zeros((len(rows), deg + 1))
    for k, r in enumerate(rows):
        coeffs[k, : len(r)] = r
    return PiecewisePolynomial(bp, coeffs)


def _merge_breakpoints(values, lo, hi):
    vals = np.sort(np.asarray(values, dtype=float))
    vals = vals[(vals >= lo - _BP_TOL) & (vals <= hi + _BP_TOL)]
    vals = np.concatenate([[lo], vals, [hi]])
    vals.sort()
    scale = max(1.0, abs(lo), abs(hi))
    keep = [vals[0]]
    for v in vals[1:]:
        if v - keep[-1] > _BP_TOL * scale:
            keep.append(v)
    if len(keep) == 1:
        keep.append(keep[0] + 1.0)
    keep[-1] = hi if abs(keep[-1] - hi) <= _BP_TOL * scale else keep[-1]
    return np.array(keep)


def _bivariate_antiderivative(f_row, g_row):
    """Antiderivative in t of f(t) * g(y - t), as a (t-power, y-power) matrix."""
    df, dg = len(f_row) - 1, len(g_row) - 1
    prod = np.zeros((df + dg + 1, dg + 1))  # [t-power, y-power]
    for m, gm in enumerate(g_row):
        if gm == 0.0:
            continue
        # (y - t)^m = sum_r C(m, r) (-t)^r y^(m-r)
        for r in range(m + 1):
            c = gm * _binom(m, r) * ((-1.0) ** r)
            for s, fs in enumerate(f_row):
                if fs != 0.0:
                    prod[s + r, m - r] += c * fs
    anti = np.zeros((prod.shape[0] + 1, prod.shape[1]))
    for p in range(prod.shape[0]):
        anti[p + 1] = prod[p] / (p + 1)
    return anti


def _poly_sub(a, b):
    n = max(len(a), len(b))
    out = np.zeros(n)
    out[: len(a)] = a
    out[: len(b)] -= b
    return out


def _subst_const(anti, c):
    """anti(t=c, y) as constant-first y-coefficients."""
    powers = c ** np.arange(anti.shape[0])
    return powers @ anti


def _subst_linear(anti, beta):
    """anti(t=y+beta, y) as constant-first y-coefficients."""
    out = np.zeros(anti.shape[0] + anti.shape[1] - 1)
    for p in range(anti.shape[0]):
        # (y + beta)^p
        for r in range(p + 1):
            c = _binom(p, r) * beta ** (p - r)
            for q in range(anti.shape[1]):
                if anti[p, q] != 0.0:
                    out[r + q] += c * anti[p, q]
    return out


_BINOM_CACHE = {}


def _binom(n, k):
    key = (n, k)
    if key not in _BINOM_CACHE:
        import math

        _BINOM_CACHE[key] = float(math.comb(n, k))
    return _BINOM_CACHE[key]
