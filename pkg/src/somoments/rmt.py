"""Haar sampling on SO(M), eigenangles, the linear statistic, and the
Monte Carlo moment harness.

Sampling follows the sign-corrected QR factorization of a Gaussian matrix
(Haar on O(M)), with a first-row negation landing determinant -1 samples in
SO(M).  The batched harness never diagonalizes the orthogonal matrix
directly: U + U^T is symmetric with eigenvalues 2 cos(theta_n), and the
trigonometric sums sum_n cos(k theta_n) follow from a Chebyshev recurrence,
which is all the linear statistic needs.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .predictions import mean_limit
from .testfn import TestFunction

_ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class EnsembleSpec:
    M: int
    parity: str

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        expected = "even" if self.M % 2 == 0 else "odd"
        if self.parity != expected:
            raise ValueError(f"parity {self.parity!r} does not match M = {self.M}")

    @classmethod
    def from_dimension(cls, M):
        return cls(M=M, parity="even" if M % 2 == 0 else "odd")


@dataclass(frozen=True)
class Eigenangles:
    """Eigenvalue angles of one SO(M) sample, in (-pi, pi], sorted."""

    angles: np.ndarray
    parity: str

    def __post_init__(self):
        object.__setattr__(self, "angles", np.sort(np.asarray(self.angles, dtype=float)))


@dataclass(frozen=True)
class MomentEstimate:
    n: int
    value: float
    std_err: float
    samples: int
    centering: str

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("need at least 2 samples")
        if self.std_err < 0:
            raise ValueError("std_err must be nonnegative")


def haar_orthogonal(M, rng):
    """One Haar O(M) sample: QR of a Gaussian matrix, R-diagonal made positive."""
    X = rng.standard_normal((M, M))
    Q, R = np.linalg.qr(X)
    d = np.sign(np.diagonal(R))
    if np.any(d == 0.0):
        raise np.linalg.LinAlgError("rank-deficient Gaussian sample")
    return Q * d[None, :]


def sample_haar_so(M, rng):
    """Eigenangles of a Haar-distributed SO(M) matrix."""
    if M < 1:
        raise ValueError("M must be >= 1")
    for attempt in (0, 1):
        try:
            Q = haar_orthogonal(M, rng)
            break
        except np.linalg.LinAlgError:
            if attempt == 1:
                raise RuntimeError("orthonormalization failed twice")
    if np.linalg.det(Q) < 0:
        Q[0, :] *= -1.0  # fixed reflection keeps Haar, lands in SO(M)
    return extract_eigenangles(Q)


def extract_eigenangles(matrix):
    """Angles from the real Schur form: 2x2 rotation blocks give +/- pairs,
    1x1 blocks give 0 or pi."""
    Q = np.asarray(matrix, dtype=float)
    M = Q.shape[0]
    if Q.shape != (M, M):
        raise ValueError("matrix must be square")
    err = np.max(np.abs(Q.T @ Q - np.eye(M)))
    if err > _ORTHO_TOL:
        raise ValueError(f"input is not orthogonal: max |Q^T Q - I| = {err:.3g}")
    parity = "even" if M % 2 == 0 else "odd"
    if M == 1:
        return Eigenangles(np.array([0.0 if Q[0, 0] > 0 else math.pi]), parity)
    T, _ = scipy.linalg.schur(Q, output="real")
    angles = []
    i = 0
    while i < M:
        if i + 1 < M and abs(T[i + 1, i]) > 1e-10:
            prod = -T[i + 1, i] * T[i, i + 1]
            theta = math.atan2(math.sqrt(max(prod, 0.0)), T[i, i])
            angles.extend([theta, -theta])
            i += 2
        else:
            angles.append(0.0 if T[i, i] > 0.0 else math.pi)
            i += 1
    return Eigenangles(np.array(angles), parity)


def _hat_weights(f: TestFunction, M):
    """hat(0) and hat(k/M) for k = 1..ceil(sigma M); the boundary value is
    zero by support, so its inclusion is branch-free."""
    K = int(math.ceil(f.sigma * M))
    ks = np.arange(1, K + 1)
    return float(f.eval_hat(0.0)), np.asarray(f.eval_hat(ks / M), dtype=float)


def z_statistic(e: Eigenangles, f: TestFunction):
    """Z = (1/M)[hat(0) M + 2 sum_k hat(k/M) sum_n cos(k theta_n)]."""
    M = len(e.angles)
    hat0, hk = _hat_weights(f, M)
    z = hat0
    for k, h in enumerate(hk, start=1):
        if h != 0.0:
            z += (2.0 / M) * h * float(np.sum(np.cos(k * e.angles)))
    return float(z)


# -- batched harness -------------------------------------------------------


def _cos_angles_batch(M, batch, rng):
    """cos(theta) for a batch of Haar SO(M) samples, shape (batch, M)."""
    X = rng.standard_normal((batch, M, M))
    Q, R = np.linalg.qr(X)
    d = np.sign(np.einsum("bii->bi", R))
    d[d == 0.0] = 1.0
    Q *= d[:, None, :]
    det = np.linalg.det(Q)
    Q[det < 0, 0, :] *= -1.0
    S = Q + np.swapaxes(Q, 1, 2)
    return 0.5 * np.linalg.eigvalsh(S)


def _z_block(M, weight_sets, n_samples, seed_seq, batch=768):
    """Z values for one contiguous block, one row set per test function."""
    rng = np.random.Generator(np.random.Philox(seed_seq))
    K_max = max((len(hk) for _, hk in weight_sets), default=0)
    out = [np.empty(n_samples) for _ in weight_sets]
    done = 0
    while done < n_samples:
        b = min(batch, n_samples - done)
        c = np.clip(_cos_angles_batch(M, b, rng), -1.0, 1.0)
        trig = np.empty((b, K_max)) if K_max else np.zeros((b, 0))
        t_prev = np.ones_like(c)
        t_cur = c.copy()
        for k in range(K_max):
            trig[:, k] = t_cur.sum(axis=1)
            t_prev, t_cur = t_cur, 2.0 * c * t_cur - t_prev
        for i, (hat0, hk) in enumerate(weight_sets):
            z = hat0 + (2.0 / M) * trig[:, : len(hk)] @ hk if len(hk) else np.full(b, hat0)
            out[i][done : done + b] = z
        done += b
    return out


def _block_sizes(total, workers):
    base, extra = divmod(total, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def z_samples(M, fs, samples, seed, workers=1):
    """Z arrays (one per test function in fs) over Haar SO(M) samples.

    Deterministic given (seed, workers): worker w consumes the w-th
    contiguous block of sample indices with its own spawned Philox stream.
    """
    fs = list(fs)
    weight_sets = [_hat_weights(f, M) for f in fs]
    children = np.random.SeedSequence(seed).spawn(max(1, workers))
    sizes = _block_sizes(samples, max(1, workers))
    blocks = []
    if workers <= 1:
        for ss, size in zip(children, sizes):
            if size:
                blocks.append(_z_block(M, weight_sets, size, ss))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(_z_block, M, weight_sets, size, ss)
                for ss, size in zip(children, sizes)
                if size
            ]
            blocks = [fut.result() for fut in futs]
    return [np.concatenate([blk[i] for blk in blocks]) for i in range(len(fs))]


def moments_from_z(Z, center, n_max):
    """Centered moment estimates with standard errors from one Z array."""
    d = Z - center
    out = []
    S = len(Z)
    for n in range(1, n_max + 1):
        powers = d**n
        value = float(powers.mean())
        std_err = float(powers.std(ddof=1) / math.sqrt(S))
        out.append((n, value, std_err))
    return out


def mc_moments(
    spec: EnsembleSpec,
    f: TestFunction,
    n_max,
    samples,
    seed,
    centering="analytic",
    workers=1,
):
    """Monte Carlo centered moments of Z over SO(M), n = 1..n_max."""
    if n_max > 8:
        raise ValueError("n_max must be <= 8")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if centering not in ("analytic", "empirical"):
        raise ValueError("centering must be 'analytic' or 'empirical'")
    (Z,) = z_samples(spec.M, [f], samples, seed, workers=workers)
    center = mean_limit(spec.parity, f) if centering == "analytic" else float(Z.mean())
    return [
        MomentEstimate(n=n, value=v, std_err=se, samples=samples, centering=centering)
        for n, v, se in moments_from_z(Z, center, n_max)
    ]
