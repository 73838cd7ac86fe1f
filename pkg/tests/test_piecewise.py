"""Tests for the exact piecewise polynomial engine."""

import numpy as np
import pytest

from somoments.piecewise import PiecewisePolynomial, pp_from_text


def triangle(height, half_width):
    """Even triangle of the given height on [-half_width, half_width]."""
    h, a = height, half_width
    return PiecewisePolynomial(
        np.array([-a, 0.0, a]),
        np.array([[h, h / a], [h, -h / a]]),
    )


class TestConstruction:
    def test_validation(self):
        with pytest.raises(ValueError):
            PiecewisePolynomial(np.array([0.0, 0.0, 1.0]), np.zeros((2, 1)))
        with pytest.raises(ValueError):
            PiecewisePolynomial(np.array([0.0, 1.0]), np.zeros((2, 1)))
        with pytest.raises(ValueError):
            PiecewisePolynomial(np.array([1.0]), np.zeros((1, 1)))

    def test_zero_outside_support(self):
        t = triangle(1.0, 1.0)
        assert t(1.5) == 0.0
        assert t(-2.0) == 0.0
        assert t(np.array([-3.0, 3.0])).tolist() == [0.0, 0.0]

    def test_evaluation(self):
        t = triangle(2.0, 0.5)
        assert np.isclose(t(0.0), 2.0)
        assert np.isclose(t(0.25), 1.0)
        assert np.isclose(t(-0.25), 1.0)
        assert t(0.5) == pytest.approx(0.0, abs=1e-15)

    def test_left_right_and_continuity(self):
        t = triangle(1.0, 1.0)
        assert abs(t.eval_left(0.0) - t.eval_right(0.0)) < 1e-12
        assert t.is_continuous()
        step = PiecewisePolynomial(np.array([-1.0, 0.0, 1.0]), np.array([[1.0], [2.0]]))
        assert not step.is_continuous()
        assert step.eval_left(0.0) == 1.0
        assert step.eval_right(0.0) == 2.0

    def test_evenness(self):
        assert triangle(1.0, 0.7).is_even()
        skew = PiecewisePolynomial(np.array([-1.0, 1.0]), np.array([[0.0, 1.0]]))
        assert not skew.is_even()


class TestCalculus:
    def test_integrate(self):
        t = triangle(1.0, 1.0)
        assert np.isclose(t.integrate(), 1.0)
        assert np.isclose(t.integrate(0.0, 1.0), 0.5)
        assert np.isclose(t.integrate(-0.5, 0.5), 0.75)
        assert t.integrate(2.0, 3.0) == 0.0

    def test_moment(self):
        t = triangle(1.0, 1.0)
        # int_0^1 y (1 - y) dy = 1/6
        assert np.isclose(t.moment(1, 0.0, 1.0), 1.0 / 6.0)
        # int y^2 over the triangle = 2 * int_0^1 y^2 (1-y) = 1/6
        assert np.isclose(t.moment(2), 1.0 / 6.0)

    def test_cumulative(self):
        t = triangle(1.0, 1.0)
        ts = np.array([-2.0, -1.0, 0.0, 0.5, 1.0, 2.0])
        expected = np.array([0.0, 0.0, 0.5, 0.875, 1.0, 1.0])
        assert np.allclose(t.cumulative(ts), expected)

    def test_derivative_and_jumps(self):
        t = triangle(1.0, 1.0)
        d = t.derivative()
        assert np.isclose(d(0.5), -1.0)
        assert np.isclose(d(-0.5), 1.0)
        # the triangle is continuous (edge values 0); its slope jumps
        assert np.allclose(t.jump_sizes(), [0.0, 0.0, 0.0])
        assert np.allclose(d.jump_sizes(), [1.0, -2.0, 1.0])
        box = PiecewisePolynomial(np.array([-1.0, 1.0]), np.array([[1.0]]))
        assert np.allclose(box.jump_sizes(), [1.0, -1.0])

    def test_abs_integral_with_sign_change(self):
        p = PiecewisePolynomial(np.array([-1.0, 1.0]), np.array([[0.0, 1.0]]))
        assert np.isclose(p.abs_integral(), 1.0)  # int |y| over [-1, 1]
        assert np.isclose(p.integrate(), 0.0)


class TestAlgebra:
    def test_multiply(self):
        t = triangle(1.0, 1.0)
        sq = t.multiply(t)
        ys = np.linspace(-1.2, 1.2, 41)
        assert np.allclose(sq(ys), t(ys) ** 2, atol=1e-14)

    def test_translated(self):
        t = triangle(1.0, 1.0)
        s = t.translated(0.3)
        ys = np.linspace(-1.0, 1.6, 53)
        assert np.allclose(s(ys), t(ys - 0.3), atol=1e-13)

    def test_convolution_is_cubic_bspline(self):
        """triangle * triangle is the cubic B-spline (four-box convolution)."""
        t = triangle(1.0, 1.0)
        c = t.convolve(t)
        assert c.support == (-2.0, 2.0)
        assert np.isclose(c(0.0), 2.0 / 3.0)
        assert np.isclose(c(1.0), 1.0 / 6.0)
        assert np.isclose(c(-1.0), 1.0 / 6.0)
        # closed form on [1, 2]: (2 - t)^3 / 6
        for y in (1.25, 1.5, 1.9):
            assert np.isclose(c(y), (2.0 - y) ** 3 / 6.0, atol=1e-13)
        assert np.isclose(c.integrate(), 1.0)

    def test_convolution_commutes(self):
        a = triangle(2.0, 0.5)
        b = triangle(1.0, 1.0)
        ys = np.linspace(-1.6, 1.6, 101)
        assert np.allclose(a.convolve(b)(ys), b.convolve(a)(ys), atol=1e-13)

    def test_degree_cap(self):
        t = triangle(1.0, 1.0)
        with pytest.raises(ValueError, match="degree"):
            t.convolve(t, max_degree=2)


class TestTextFormat:
    def test_round_trip(self):
        t = triangle(2.0, 0.5)
        back = pp_from_text(t.to_text())
        ys = np.linspace(-0.6, 0.6, 37)
        assert np.allclose(back(ys), t(ys), atol=0.0)

    def test_parse(self):
        text = "breakpoints: -1.0 0.0 1.0\n1.0 1.0\n1.0 -1.0\n"
        pp = pp_from_text(text)
        assert np.isclose(pp(0.5), 0.5)
        assert np.isclose(pp(-0.5), 0.5)

    def test_parse_errors(self):
        with pytest.raises(ValueError):
            pp_from_text("nope: 1 2\n0\n")
        with pytest.raises(ValueError):
            pp_from_text("breakpoints: 0 1 2\n1.0\n")  # missing a row
        with pytest.raises(ValueError, match="degree"):
            pp_from_text("breakpoints: 0 1\n1 1 1 1 1 1 1 1 1 1\n")
