"""Exact-arithmetic tests for the closed-form constants and coefficients."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hardy_rellich.constants import (
    SharpConstant,
    birman_constant,
    cesaro_norm,
    double_factorial_odd,
    eval_p_n,
    eval_r_n,
    glazman_constant,
    leibniz_coeffs,
    probe_tail_coeffs,
    spectral_polynomials,
)
from hardy_rellich.errors import PoleError


class TestSharpConstant:
    def test_hardy_value(self):
        assert birman_constant(1).c == Fraction(1, 4)

    def test_rellich_value(self):
        assert birman_constant(2).c == Fraction(9, 16)

    def test_n3_by_brute_force_product(self):
        # (5*3*1)^2 / 2^6 computed with plain integer arithmetic
        assert birman_constant(3).c == Fraction((5 * 3 * 1) ** 2, 2**6) == Fraction(225, 64)

    def test_reciprocal_root_identity_exact(self):
        for n in range(1, 33):
            sharp = birman_constant(n)
            assert sharp.c * sharp.b**2 == 1

    def test_recurrence(self):
        for n in range(1, 32):
            ratio = birman_constant(n + 1).c / birman_constant(n).c
            assert ratio == Fraction((2 * n + 1) ** 2, 4)

    def test_overflow_free_at_64(self):
        sharp = birman_constant(64)
        assert sharp.c.numerator > 2**64  # exceeds machine integers, still exact
        assert sharp.c * sharp.b**2 == 1

    def test_rejects_zero_index(self):
        with pytest.raises(ValueError):
            birman_constant(0)


class TestCesaroNorm:
    def test_known_values(self):
        assert cesaro_norm(1) == 2
        assert cesaro_norm(2) == Fraction(4, 3)
        assert cesaro_norm(3) == Fraction(8, 15)

    def test_double_factorial(self):
        assert [double_factorial_odd(n) for n in (1, 2, 3, 4)] == [1, 3, 15, 105]

    def test_matches_reciprocal_root(self):
        for n in range(1, 33):
            assert cesaro_norm(n) == birman_constant(n).b

    def test_rejects_zero_index(self):
        with pytest.raises(ValueError):
            cesaro_norm(0)


class TestGlazmanConstant:
    def test_reduces_to_hardy(self):
        assert glazman_constant(1, 0) == Fraction(1, 4)

    def test_degenerate_weight_is_zero(self):
        assert glazman_constant(1, 1) == 0
        assert glazman_constant(2, 1) == 0

    def test_half_weight_value(self):
        # ((2.5)(0.5))^2 / 16, with 0.5 exact in binary
        assert glazman_constant(2, 0.5) == Fraction(25, 256)

    def test_agrees_with_unweighted(self):
        for n in range(1, 33):
            assert glazman_constant(n, 0) == birman_constant(n).c

    @given(st.integers(min_value=1, max_value=12),
           st.fractions(min_value=-4, max_value=4))
    def test_matches_direct_product(self, n, alpha):
        prod = Fraction(1)
        for j in range(1, n + 1):
            prod *= 2 * n + 1 - 2 * j - alpha
        assert glazman_constant(n, alpha) == prod * prod / 4**n


def _falling(m, k):
    out = 1
    for i in range(k):
        out *= m - i
    return out


class TestLeibnizCoeffs:
    def test_top_coefficient_is_one(self):
        for n in range(1, 8):
            for k in range(n + 1):
                assert leibniz_coeffs(n, k).a[k] == 1

    def test_product_rule_example(self):
        # (x^2 f)' = 2 x f + x^2 f'
        table = leibniz_coeffs(2, 1)
        assert table.a == (2, 1)

    def test_full_order_constant_is_factorial(self):
        for n in range(1, 10):
            assert leibniz_coeffs(n, n).a[0] == math.factorial(n)

    def test_monomial_oracle(self):
        # applying the table to f = x^m must reproduce d^k/dx^k x^(n+m)
        # computed independently by the falling-factorial formula
        for n in range(1, 17):
            for k in range(n + 1):
                table = leibniz_coeffs(n, k).a
                for m in (0, 1, 2, 5):
                    total = sum(table[j] * _falling(m, j) for j in range(k + 1))
                    assert total == _falling(n + m, k)

    def test_sympy_product_rule_oracle(self):
        sympy = pytest.importorskip("sympy")
        x = sympy.Symbol("x")
        f = sympy.Function("f")
        for n, k in ((2, 1), (3, 2), (4, 4)):
            expanded = sympy.diff(x**n * f(x), x, k).expand()
            table = leibniz_coeffs(n, k).a
            rebuilt = sum(
                table[j] * x ** (n - k + j) * sympy.diff(f(x), x, j)
                for j in range(k + 1)
            ).expand()
            assert sympy.simplify(expanded - rebuilt) == 0

    def test_rejects_k_above_n(self):
        with pytest.raises(ValueError):
            leibniz_coeffs(2, 3)


class TestProbeTailCoeffs:
    def test_unit_probe(self):
        assert probe_tail_coeffs(1, 0.0, 1.0) == [1.0]

    def test_first_order_closed_form(self):
        for sigma, a in ((0.25, 2.0), (-0.3, 5.0), (1.5, 0.7)):
            (b0,) = probe_tail_coeffs(1, sigma, a)
            assert b0 == pytest.approx(a ** (1 + sigma) / (1 + sigma), rel=1e-15)

    def test_second_order_by_symbolic_integration(self):
        # double antiderivative of the unit-cutoff probe: sample the smooth
        # branch beyond the cutoff at two points and read off the line
        sympy = pytest.importorskip("sympy")
        t, s = sympy.symbols("t s", positive=True)
        inner = sympy.integrate(sympy.Piecewise((1, t < 1), (0, True)), (t, 0, s))

        def double_anti(x0):
            return sympy.integrate(inner, (s, 0, x0))

        v2, v3 = double_anti(2), double_anti(3)
        b1 = sympy.nsimplify(v3 - v2)
        b0 = sympy.nsimplify(v2 - 2 * b1)
        assert [float(b0), float(b1)] == probe_tail_coeffs(2, 0.0, 1.0) == [-0.5, 1.0]

    def test_rejects_non_square_integrable(self):
        with pytest.raises(ValueError):
            probe_tail_coeffs(2, -0.5, 1.0)
        with pytest.raises(ValueError):
            probe_tail_coeffs(2, 0.0, -1.0)


class TestSpectralPolynomials:
    def test_p1_is_identity(self):
        assert spectral_polynomials(1).p == (0, 1)
        for z in (0.3, 2 + 1j, -5):
            assert eval_p_n(1, z) == z

    def test_p_at_one_is_factorial(self):
        for n in range(1, 20):
            assert eval_p_n(n, Fraction(1)) == math.factorial(n)
            coeffs = spectral_polynomials(n).p
            assert sum(coeffs) == math.factorial(n)

    def test_r_at_zero(self):
        for n in range(1, 10):
            assert eval_r_n(n, 0.0) == 0

    def test_r2_at_two(self):
        assert eval_r_n(2, Fraction(2)) == Fraction(4, 3)

    def test_spectral_radius_anchor_exact(self):
        for n in range(1, 33):
            assert eval_r_n(n, Fraction(2)) == cesaro_norm(n)

    @given(st.integers(min_value=1, max_value=10),
           st.complex_numbers(min_magnitude=0.1, max_magnitude=50,
                              allow_nan=False, allow_infinity=False))
    def test_reciprocal_identity(self, n, z):
        for k in range(1, n):
            if abs(1 + k * z) < 1e-3:
                return  # too close to a pole for a well-conditioned check
        if abs(z) < 1e-2:
            return
        product = eval_r_n(n, z) * eval_p_n(n, 1 / z)
        assert product == pytest.approx(1.0, rel=1e-9)

    def test_pole_rejection(self):
        with pytest.raises(PoleError):
            eval_r_n(3, Fraction(-1, 2))
        with pytest.raises(PoleError):
            eval_r_n(3, -0.5 + 0j)

    def test_denominator_coefficients(self):
        # prod_{k=1..2} (1 + k z) = 1 + 3z + 2z^2
        assert spectral_polynomials(3).r_den == (1, 3, 2)
