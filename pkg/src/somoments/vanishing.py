"""Order-of-vanishing bounds from centered-moment bounds.

For a nonnegative test function with phi(0) = 1, the n-th centered moment
bound B turns into a Chebyshev-type tail bound: the fraction of the odd
family with at least r central zeros is at most B / (r - 3/2)^n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .predictions import centered_moment_prediction
from .testfn import TestFunction, eval_phi


@dataclass(frozen=True)
class VanishingBound:
    r: int
    n: int
    B: object                 # float or Fraction
    probability_bound: object  # same arithmetic as B, clamped to [0, 1]
    raw_bound: object
    clamped: bool
    epsilon_slack: float = 0.0


def moment_bound(f: TestFunction, parity, n):
    """B = (n-1)!! sigma_phi^n +/- R_n for a nonnegative phi with phi(0) = 1."""
    if n % 2 != 0 or n < 2:
        raise ValueError("n must be even and >= 2")
    phi0 = eval_phi(f, 0.0)
    if abs(phi0 - 1.0) > 1e-9:
        raise ValueError(f"phi(0) = {phi0}, need 1 within 1e-9")
    xs = np.linspace(0.0, 40.0 / max(f.sigma, 0.05), 4001)
    vals = eval_phi(f, xs)
    if np.min(vals) < -1e-10:
        raise ValueError("phi takes negative values on the sample grid")
    return centered_moment_prediction(parity, n, f).value


def order_vanishing_bound(r, n, B, epsilon_slack=0.0):
    """Probability of at least r central zeros is at most B / (r - 3/2)^n.

    Exact rational arithmetic is preserved when B is a Fraction; the r = 1
    mass is bounded from below, not above, so r starts at 3.
    """
    if r < 3:
        raise ValueError("r must be >= 3 (the r = 1 mass is bounded from below)")
    if n % 2 != 0 or n < 2:
        raise ValueError("n must be even and >= 2")
    if isinstance(B, Fraction):
        if B < 0:
            raise ValueError("B must be nonnegative")
        raw = B / Fraction(2 * r - 3, 2) ** n
        clamped = raw > 1
        bound = min(raw, Fraction(1))
    else:
        B = float(B)
        if B < 0:
            raise ValueError("B must be nonnegative")
        raw = B / (r - 1.5) ** n
        clamped = raw > 1.0
        bound = min(raw, 1.0)
    return VanishingBound(
        r=r,
        n=n,
        B=B,
        probability_bound=bound,
        raw_bound=raw,
        clamped=clamped,
        epsilon_slack=float(epsilon_slack),
    )
