"""Tests for test functions, exact hat convolutions, and the sinc-kernel
quadratures."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from somoments.piecewise import PiecewisePolynomial
from somoments.testfn import (
    FixedKernels,
    eval_phi,
    ft_identity_residual,
    hat_self_convolution,
    hat_tail_mass,
    make_fejer,
    make_hat_spline,
    sinc,
    sinc_moment,
)


def random_hat_spline(rng, max_sigma=1.0):
    """Random even, continuous, piecewise-linear hat with hat(+-sigma) = 0."""
    sigma = rng.uniform(0.3, max_sigma)
    t1 = rng.uniform(0.2, 0.8) * sigma
    h0 = rng.uniform(0.5, 2.0)
    h1 = rng.uniform(0.1, 1.5)
    bp = np.array([-sigma, -t1, 0.0, t1, sigma])

    def lin_row(x0, y0, x1, y1):
        slope = (y1 - y0) / (x1 - x0)
        return [y0 - slope * x0, slope]

    coeffs = np.array(
        [
            lin_row(-sigma, 0.0, -t1, h1),
            lin_row(-t1, h1, 0.0, h0),
            lin_row(0.0, h0, t1, h1),
            lin_row(t1, h1, sigma, 0.0),
        ]
    )
    return make_hat_spline(PiecewisePolynomial(bp, coeffs))


class TestFixedKernels:
    def test_sinc_normalization(self):
        assert FixedKernels.S(0.0) == 1.0
        for k in range(1, 9):
            assert abs(FixedKernels.S(float(k))) < 1e-15
            assert abs(FixedKernels.S(float(-k))) < 1e-15

    def test_s2_is_half_box_transform(self):
        # int_{-1}^{1} (1/2) e(x u) du = S(2x)
        for x in (0.3, 1.1, 2.7):
            val, _ = quad(lambda u: 0.5 * math.cos(2 * math.pi * x * u), -1, 1)
            assert np.isclose(val, FixedKernels.S2(x), atol=1e-12)

    def test_box(self):
        assert FixedKernels.box(0.5) == 1.0
        assert FixedKernels.box(1.0) == 1.0
        assert FixedKernels.box(1.0001) == 0.0


class TestMakeFejer:
    def test_domain(self):
        with pytest.raises(ValueError):
            make_fejer(0.0)
        with pytest.raises(ValueError):
            make_fejer(1.2)
        with pytest.raises(ValueError):
            make_fejer(-0.5)

    def test_sigma_one_hat(self):
        f = make_fejer(1.0)
        assert np.isclose(f.eval_hat(0.0), 1.0)
        assert f.eval_hat(1.0) == pytest.approx(0.0, abs=1e-15)
        assert f.eval_hat(-1.0) == pytest.approx(0.0, abs=1e-15)

    def test_fourier_inversion_at_zero(self):
        f = make_fejer(0.5)
        assert np.isclose(eval_phi(f, 0.0), 1.0, atol=1e-10)
        assert np.isclose(f.hat.integrate(), 1.0, atol=1e-12)

    def test_phi_value_direct_formula(self):
        # phi(1) at sigma = 0.5: (sin(pi/2) / (pi/2))^2 = 4/pi^2
        f = make_fejer(0.5)
        assert np.isclose(eval_phi(f, 1.0), (2.0 / math.pi) ** 2, atol=1e-12)

    def test_hat_even_and_supported(self):
        f = make_fejer(0.45)
        ys = np.linspace(0, 0.45, 20)
        assert np.allclose(f.eval_hat(ys), f.eval_hat(-ys), atol=0.0)
        assert f.eval_hat(0.46) == 0.0
        assert f.eval_hat(-0.50) == 0.0


class TestEvalPhi:
    def test_fejer_values(self):
        f = make_fejer(1.0)
        assert eval_phi(f, 0.0) == 1.0
        assert abs(eval_phi(f, 1.0)) < 1e-15

    def test_fejer_against_quadrature_oracle(self):
        """phi(2) at sigma=0.45 vs the numeric inverse Fourier transform of
        the triangle, computed with an independent scipy quadrature."""
        sigma = 0.45
        f = make_fejer(sigma)
        tri = lambda y: (1 - abs(y) / sigma) / sigma
        oracle, _ = quad(lambda y: tri(y) * math.cos(2 * math.pi * 2.0 * y), -sigma, sigma)
        direct = (math.sin(0.9 * math.pi) / (0.9 * math.pi)) ** 2
        assert np.isclose(oracle, direct, atol=1e-10)
        assert np.isclose(eval_phi(f, 2.0), direct, atol=1e-10)

    def test_removable_singularity_branch(self):
        f = make_fejer(0.7)
        xs = np.array([0.0, 1e-9, 1e-6, 1e-5])
        vals = eval_phi(f, xs)
        assert np.all(np.abs(vals - 1.0) < 1e-8)

    def test_hat_spline_matches_fejer(self):
        """Triangle of height 2 on [-1/2, 1/2] is the Fejer hat at sigma 0.5."""
        pp = PiecewisePolynomial(
            np.array([-0.5, 0.0, 0.5]), np.array([[2.0, 4.0], [2.0, -4.0]])
        )
        g = make_hat_spline(pp)
        f = make_fejer(0.5)
        xs = np.linspace(-8.0, 8.0, 161)
        assert np.max(np.abs(eval_phi(g, xs) - eval_phi(f, xs))) < 1e-10

    def test_box_hat_gives_sinc(self):
        """Indicator hat on [-1/2, 1/2]: phi(x) = S(x), phi(0) = mass."""
        pp = PiecewisePolynomial(np.array([-0.5, 0.5]), np.array([[1.0]]))
        g = make_hat_spline(pp)
        assert np.isclose(eval_phi(g, 0.0), pp.integrate(), atol=1e-12)
        xs = np.linspace(-4, 4, 101)
        assert np.allclose(eval_phi(g, xs), sinc(xs), atol=1e-10)

    def test_hat_spline_validation(self):
        skew = PiecewisePolynomial(np.array([-1.0, 1.0]), np.array([[0.5, 0.5]]))
        with pytest.raises(ValueError, match="even"):
            make_hat_spline(skew)


class TestHatSelfConvolution:
    def test_identity_case(self):
        f = make_fejer(0.6)
        h1 = hat_self_convolution(f, 1)
        ys = np.linspace(-0.7, 0.7, 57)
        assert np.allclose(h1(ys), f.eval_hat(ys), atol=0.0)

    def test_fejer_n2_value_at_zero(self):
        # int (1 - |y|)^2 dy = 2/3
        f = make_fejer(1.0)
        h2 = hat_self_convolution(f, 2)
        assert np.isclose(h2(0.0), 2.0 / 3.0, atol=1e-12)

    @pytest.mark.parametrize("sigma,n", [(1.0, 2), (0.45, 3), (0.3, 4), (1.0, 8)])
    def test_total_integral_and_support(self, sigma, n):
        f = make_fejer(sigma)
        hn = hat_self_convolution(f, n)
        assert np.isclose(hn.integrate(), eval_phi(f, 0.0) ** n, atol=1e-9)
        lo, hi = hn.support
        assert abs(lo + n * sigma) <= 1e-12
        assert abs(hi - n * sigma) <= 1e-12

    def test_associativity(self):
        f = make_fejer(0.45)
        h = f.hat
        left = h.convolve(h).convolve(h)
        ref = hat_self_convolution(f, 3)
        ys = np.linspace(-1.4, 1.4, 301)
        assert np.max(np.abs(left(ys) - ref(ys))) < 1e-10

    def test_degree_overflow(self):
        # a degree-2 hat convolved 8 times exceeds the default cap of 16
        pp = PiecewisePolynomial(
            np.array([-1.0, 1.0]), np.array([[0.75, 0.0, -0.75]])
        )
        g = make_hat_spline(pp)
        with pytest.raises(ValueError, match="degree"):
            hat_self_convolution(g, 8)

    def test_preconditions(self):
        f = make_fejer(0.5)
        with pytest.raises(ValueError):
            hat_self_convolution(f, 0)
        with pytest.raises(ValueError):
            hat_self_convolution(f, 9)


class TestSincMoment:
    def test_n1_is_half_phi0(self):
        for sigma in (0.3, 0.7, 1.0):
            f = make_fejer(sigma)
            assert np.isclose(sinc_moment(f, 1), 0.5, atol=1e-8)

    def test_n2_small_support_identity(self):
        f = make_fejer(0.5)
        assert np.isclose(sinc_moment(f, 2), 0.5, atol=1e-8)

    def test_n2_sigma1_closed_form(self):
        # (1/2) * mass of the cubic B-spline inside [-1, 1] = 11/24
        f = make_fejer(1.0)
        assert np.isclose(sinc_moment(f, 2), 11.0 / 24.0, atol=1e-8)

    def test_n2_against_independent_hat_oracle(self):
        """sigma = 0.8: compare with (1/2) int int hat(u) hat(v) 1_{|u+v|<=1},
        computed by nested scipy quadrature on the closed-form triangle."""
        sigma = 0.8
        f = make_fejer(sigma)
        tri = lambda y: (1 - abs(y) / sigma) / sigma if abs(y) <= sigma else 0.0

        def inner(u):
            lo, hi = max(-sigma, -1.0 - u), min(sigma, 1.0 - u)
            if hi <= lo:
                return 0.0
            val, _ = quad(tri, lo, hi, points=[0.0] if lo < 0 < hi else None)
            return val

        oracle, _ = quad(lambda u: tri(u) * inner(u), -sigma, sigma, limit=200)
        assert np.isclose(sinc_moment(f, 2), 0.5 * oracle, atol=1e-6)

    def test_zero_hat(self):
        zero = make_hat_spline(
            PiecewisePolynomial(np.array([-0.5, 0.5]), np.zeros((1, 1)))
        )
        assert sinc_moment(zero, 1) == 0.0


class TestFtIdentityResidual:
    def test_n1_vanishes(self):
        for sigma in (0.4, 0.9, 1.0):
            assert abs(ft_identity_residual(make_fejer(sigma), 1)) < 1e-8

    def test_n2(self):
        assert abs(ft_identity_residual(make_fejer(0.8), 2)) < 1e-5

    def test_n3(self):
        assert abs(ft_identity_residual(make_fejer(0.45), 3)) < 1e-4

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            ft_identity_residual(make_fejer(0.3), 4)

    def test_hat_tail_mass_n1(self):
        f = make_fejer(1.0)
        assert hat_tail_mass(f.hat, 1) == pytest.approx(0.0, abs=1e-14)

    def test_random_hat_splines(self):
        rng = np.random.default_rng(42)
        for _ in range(8):
            g = random_hat_spline(rng)
            assert abs(ft_identity_residual(g, 1)) < 1e-8
            assert abs(ft_identity_residual(g, 2)) < 1e-5
