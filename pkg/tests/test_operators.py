"""Averaging operators, inverses, the analytic family, pairs, and norms."""

import math

import numpy as np
import pytest

from hardy_rellich import operators as ops
from hardy_rellich.analytic import LogGaussian, gamma_class, monomial
from hardy_rellich.constants import cesaro_norm
from hardy_rellich.errors import ConvergenceError, SingularityError
from hardy_rellich.functional import ProbeSpec, probe_eval
from hardy_rellich.grid import GridFunction, LogGrid, norm_sq


@pytest.fixture(scope="module")
def grid():
    return LogGrid.default()


@pytest.fixture(scope="module")
def bump(grid):
    return GridFunction.from_callable(
        grid, lambda x: np.exp(-0.5 * (np.log(x) / 2.0) ** 2))


def _rel_l2(grid, diff, reference):
    return (norm_sq(GridFunction(grid, diff)) / norm_sq(reference)) ** 0.5


def _falling(base, count):
    out = 1.0
    for i in range(count):
        out *= base - i
    return out


def _probe_image(spec):
    """Analytic closures for F_probe / x^n, the image of f_sigma under T_n."""
    from hardy_rellich.analytic import AnalyticFunction
    from hardy_rellich.constants import probe_tail_coeffs

    n, sigma, a = spec.n, spec.sigma, spec.a
    tail = probe_tail_coeffs(n, sigma, a)
    lead = 1.0 / math.prod(j + sigma for j in range(1, n + 1))

    class ProbeImage(AnalyticFunction):
        order = n
        vanishing_order = sigma

        def deriv(self, j):
            def evaluate(x):
                x = np.asarray(x, dtype=float)
                below = lead * _falling(sigma, j) * x ** (sigma - j)
                above = np.zeros_like(x)
                for k in range(n):
                    above = above + tail[k] * _falling(k - n, j) * x ** (k - n - j)
                return np.where(x <= a, below, above)

            return evaluate

    return ProbeImage()


class TestApplyCesaro:
    def test_indicator_average(self, grid):
        # T_1 of the indicator of (0, a): 1 below a, a/x beyond; a sampled
        # jump carries half-panel ambiguity, but with the cutoff mid-panel
        # (as on the even default grid) the straddling panel is second-order
        a = 1.0
        f = GridFunction(grid, np.where(grid.x <= a, 1.0, 0.0))
        out = ops.apply_cesaro(1, f)
        exact = np.where(grid.x <= a, 1.0, a / grid.x)
        np.testing.assert_allclose(out.values, exact, rtol=2e-5)
        below = grid.x <= a * (1 - grid.h)
        np.testing.assert_allclose(out.values[below], 1.0, rtol=1e-12)

    def test_truncated_monomial(self, grid):
        sigma, a = -0.3, 10.0
        f = GridFunction(grid, np.where(grid.x <= a, grid.x**sigma, 0.0))
        out = ops.apply_cesaro(1, f)
        mask = grid.x <= a
        np.testing.assert_allclose(out.values[mask],
                                   grid.x[mask] ** sigma / (1 + sigma), rtol=1e-10)

    def test_zero(self, grid):
        out = ops.apply_cesaro(3, GridFunction(grid, np.zeros(len(grid))))
        assert np.all(out.values == 0)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_monomial_eigenrelation(self, grid, n):
        sigma, a = -0.3, 10.0
        f = GridFunction(grid, np.where(grid.x <= a, grid.x**sigma, 0.0))
        out = ops.apply_cesaro(n, f)
        prod = math.prod(j + sigma for j in range(1, n + 1))
        mask = grid.x <= a
        np.testing.assert_allclose(out.values[mask],
                                   grid.x[mask] ** sigma / prod, rtol=1e-8)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_probe_antiderivative(self, grid, n):
        # T_n applied to the probe generator recovers its n-fold
        # antiderivative divided by x^n (closed piecewise forms)
        spec = ProbeSpec(n=n, sigma=-0.2, a=10.0)
        f = GridFunction(grid, np.where(grid.x <= spec.a,
                                        grid.x**spec.sigma, 0.0))
        out = ops.apply_cesaro(n, f)
        reconstructed = out.values * grid.x ** float(n)
        mask = grid.x <= spec.a * 0.999
        np.testing.assert_allclose(reconstructed[mask],
                                   probe_eval(spec, grid.x[mask]),
                                   rtol=1e-8)


class TestNestedOracle:
    def test_double_average_of_one(self, grid):
        f = GridFunction(grid, np.ones(len(grid)))
        out = ops.apply_cesaro_nested(2, f)
        np.testing.assert_allclose(out.values, 0.5, rtol=1e-10)

    def test_n1_same_algorithm(self, bump, grid):
        kernel = ops.apply_cesaro(1, bump)
        nested = ops.apply_cesaro_nested(1, bump)
        assert np.max(np.abs(kernel.values - nested.values)) <= 1e-10

    def test_zero(self, grid):
        out = ops.apply_cesaro_nested(4, GridFunction(grid, np.zeros(len(grid))))
        assert np.all(out.values == 0)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_oracle_equivalence(self, grid, bump, n):
        kernel = ops.apply_cesaro(n, bump)
        nested = ops.apply_cesaro_nested(n, bump)
        assert _rel_l2(grid, kernel.values - nested.values, bump) <= 1e-6


class TestInverse:
    def test_t1_inverse_of_identity(self):
        inv = ops.apply_inverse_cesaro(1, monomial(1.0))
        x = np.array([0.3, 1.7, 4.0])
        np.testing.assert_allclose(inv(x), 2 * x)  # (x * x)' = 2x

    def test_t1_inverse_of_monomial(self):
        sigma = 0.7
        inv = ops.apply_inverse_cesaro(1, monomial(sigma))
        x = np.array([0.5, 2.5])
        np.testing.assert_allclose(inv(x), (1 + sigma) * x**sigma)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_round_trip_on_probe_tails(self, grid, n):
        # T_n(T_n^{-1} g) = g for g = F_{probe}/x^n (the image of the probe
        # generator under T_n); a = 1 sits mid-panel on the even grid, so
        # the sampled jump costs only an h^2-scale error beyond the cutoff
        spec = ProbeSpec(n=n, sigma=0.25, a=1.0)
        g = _probe_image(spec)
        inverse = ops.apply_inverse_cesaro(n, g)
        sampled = GridFunction(grid, np.asarray(inverse(grid.x)))
        # the inverse must reproduce the generating truncated monomial ...
        mask = grid.x <= spec.a
        np.testing.assert_allclose(sampled.values[mask],
                                   grid.x[mask] ** spec.sigma, rtol=1e-9)
        assert np.max(np.abs(sampled.values[~mask])) <= 1e-9
        # ... and averaging again closes the loop: exact below the cutoff,
        # half-panel-limited beyond it
        back = ops.apply_cesaro(n, sampled)
        expected = g.deriv(0)(grid.x)
        np.testing.assert_allclose(back.values, expected, rtol=3e-5)
        below = grid.x <= spec.a * (1 - grid.h)
        np.testing.assert_allclose(back.values[below], expected[below], rtol=1e-10)

    def test_missing_closures_rejected(self):
        with pytest.raises(ValueError):
            ops.apply_inverse_cesaro(3, LogGaussian())  # carries 2 closures


class TestOperatorPolynomial:
    def test_n1_is_plain_inverse(self):
        f = gamma_class(2.5, 1.0)
        direct = ops.apply_inverse_cesaro(1, f)
        composed = ops.compose_p_n_of_inverse_T1(1, f)
        x = np.linspace(0.1, 8.0, 50)
        np.testing.assert_allclose(composed(x), direct(x), rtol=1e-12)

    def test_square_monomial_example(self):
        # (x^2 * x^2)'' = 12 x^2 and the factor route gives 9x^2 + 3x^2
        composed = ops.compose_p_n_of_inverse_T1(2, monomial(2.0))
        x = np.array([0.5, 1.0, 3.0])
        np.testing.assert_allclose(composed(x), 12 * x**2)

    def test_monomial_eigenrelation_n3(self):
        m = 1.5
        composed = ops.compose_p_n_of_inverse_T1(3, monomial(m))
        direct = ops.apply_inverse_cesaro(3, monomial(m))
        x = np.array([0.2, 1.1, 6.0])
        factor = math.prod(m + 1 + k for k in range(3))
        np.testing.assert_allclose(composed(x), factor * x**m, rtol=1e-12)
        np.testing.assert_allclose(direct(x), factor * x**m, rtol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_agrees_with_leibniz_expansion(self, n):
        for f in (monomial(2.5), gamma_class(1.5, 1.0), gamma_class(3.5, 2.0)):
            direct = ops.apply_inverse_cesaro(n, f)
            composed = ops.compose_p_n_of_inverse_T1(n, f)
            x = np.linspace(0.05, 12.0, 101)
            d, c = direct(x), composed(x)
            scale = np.max(np.abs(d)) + 1e-300
            assert np.max(np.abs(d - c)) <= 1e-10 * scale


class TestAnalyticFamily:
    def test_z_zero_is_plain_average(self, grid, bump):
        family = ops.apply_T1z(0.0, bump)
        plain = ops.apply_cesaro(1, bump)
        np.testing.assert_allclose(family.values, plain.values, rtol=1e-12)

    def test_monomial_action(self, grid):
        sigma, a, z = 0.4, 10.0, 0.3 - 0.8j
        f = GridFunction(grid, np.where(grid.x <= a, grid.x**sigma, 0.0))
        out = ops.apply_T1z(z, f)
        mask = grid.x <= a
        expected = grid.x[mask] ** sigma / (sigma + 1 - z)
        np.testing.assert_allclose(out.values[mask], expected, rtol=1e-10)

    def test_zero_function(self, grid):
        out = ops.apply_T1z(0.2, GridFunction(grid, np.zeros(len(grid))))
        assert np.all(out.values == 0)

    def test_half_plane_restriction(self, grid, bump):
        with pytest.raises(ValueError):
            ops.apply_T1z(0.5, bump)

    def test_singularity_propagates(self, grid):
        g = GridFunction(grid, grid.x ** (-0.8))
        with pytest.raises(SingularityError):
            ops.apply_T1z(0.4, g)  # integrand ~ x^{-1.2} at the origin


class TestResolvent:
    def test_point_validation(self):
        with pytest.raises(ValueError):
            ops.ResolventPoint(1.0 + 1.0j)  # on the spectrum circle
        with pytest.raises(ValueError):
            ops.ResolventPoint(0.5)  # inside
        ops.ResolventPoint(3.0)  # exterior: fine

    @pytest.mark.parametrize("z", [3.0, -1.0, 1.0 + 2.0j])
    def test_residual(self, grid, z):
        f = GridFunction.from_callable(
            grid, lambda x: np.exp(-0.5 * (np.log(x) / 2.0) ** 2))
        g = ops.resolvent_T1(z, f)
        t1g = ops.apply_cesaro(1, GridFunction(grid, g.values))
        residual = t1g.values - z * g.values - f.values
        assert _rel_l2(grid, residual, f) <= 1e-6

    def test_zero_function(self, grid):
        out = ops.resolvent_T1(3.0, GridFunction(grid, np.zeros(len(grid))))
        assert np.all(out.values == 0)


class TestWeightedPair:
    def test_b_side_is_cesaro_average(self, grid, bump):
        spec = ops.power_weight_pair(0)
        out = ops.weighted_pair_apply(spec, "B", bump)
        plain = ops.apply_cesaro(1, bump)
        np.testing.assert_allclose(out.values, plain.values, rtol=1e-12)

    def test_k_values(self):
        assert ops.power_weight_pair(0).K == 1.0
        assert ops.power_weight_pair(1).K == pytest.approx(1.0 / 3.0)

    def test_zero(self, grid):
        spec = ops.power_weight_pair(0)
        z = GridFunction(grid, np.zeros(len(grid)))
        assert np.all(ops.weighted_pair_apply(spec, "A", z).values == 0)
        assert np.all(ops.weighted_pair_apply(spec, "B", z).values == 0)

    def test_bad_side(self, grid, bump):
        with pytest.raises(ValueError):
            ops.weighted_pair_apply(ops.power_weight_pair(0), "C", bump)

    def test_adjoint_property_quadrature(self, grid, bump):
        # <A f, g>_w = <f, B g>_w on the discrete weighted inner product
        spec = ops.power_weight_pair(1)
        g2 = GridFunction.from_callable(
            grid, lambda x: x * np.exp(-0.5 * (np.log(x) - 1.0) ** 2))
        Af = ops.weighted_pair_apply(spec, "A", bump)
        Bg = ops.weighted_pair_apply(spec, "B", g2)
        q = ops._trapezoid_weights_u(grid) * spec.w(grid.x)
        lhs = float(np.sum(q * Af.values * g2.values))
        rhs = float(np.sum(q * bump.values * Bg.values))
        scale = (norm_sq(bump) * norm_sq(g2)) ** 0.5
        assert abs(lhs - rhs) <= 1e-8 * scale

    def test_discrete_adjoint_exact(self, grid):
        # the linear cut discretization is an exact weighted transpose
        spec = ops.power_weight_pair(0)
        op = ops.DiscreteWeightedPair(spec, grid, "A", power=0, boundary="cut")
        rng = np.random.default_rng(3)
        v = rng.standard_normal(len(grid))
        w = rng.standard_normal(len(grid))
        q = op.quad_weights
        lhs = float(np.sum(q * op.apply(v) * w))
        rhs = float(np.sum(q * v * op.adjoint_apply(w)))
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


class TestNormEstimation:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_cesaro_norm_wrap(self, grid, n):
        est = ops.estimate_operator_norm(ops.DiscreteCesaro(n, grid), grid)
        target = float(cesaro_norm(n))
        assert abs(est - target) <= 0.02 * target

    def test_cesaro_norm_cut_biased_low(self, grid):
        # the hard window cut loses a few percent: documented behaviour
        est = ops.estimate_operator_norm(
            ops.DiscreteCesaro(1, grid, boundary="cut"), grid)
        assert 1.9 < est < 2.0

    def test_pair_norm(self, grid):
        spec = ops.power_weight_pair(0)
        est = ops.estimate_operator_norm(
            ops.DiscreteWeightedPair(spec, grid, "A", power=0), grid)
        assert abs(est - 2.0) <= 0.04  # 2K = 2

    def test_adjoint_consistency_wrap(self, grid):
        op = ops.DiscreteCesaro(2, grid)
        rng = np.random.default_rng(11)
        v = rng.standard_normal(len(grid))
        w = rng.standard_normal(len(grid))
        q = op.quad_weights
        lhs = float(np.sum(q * op.apply(v) * w))
        rhs = float(np.sum(q * v * op.adjoint_apply(w)))
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)

    def test_non_convergence_raises_with_estimate(self, grid):
        with pytest.raises(ConvergenceError) as err:
            ops.estimate_operator_norm(ops.DiscreteCesaro(1, grid), grid,
                                       max_iter=1, tol=1e-16)
        assert err.value.last_estimate is not None

    def test_deterministic_given_seed(self, grid):
        op = ops.DiscreteCesaro(2, grid)
        a = ops.estimate_operator_norm(op, grid, seed=7)
        b = ops.estimate_operator_norm(op, grid, seed=7)
        assert a == b
