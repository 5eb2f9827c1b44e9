import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scarf_spectrum import (
    DomainError,
    JacobiOrder,
    ValidationError,
    basis_eval,
    basis_norm,
    derive_params,
    jacobi_eval,
    y_matrix_element,
)

from oracles import jacobi_norm_squared, jacobi_series_value, jacobi_weighted_integral

params_strategy = st.tuples(
    st.floats(min_value=-0.9, max_value=5.0),
    st.floats(min_value=-0.9, max_value=5.0),
)


class TestEval:
    def test_degree_zero_is_one(self):
        for mu, nu, y in ((0.5, 0.5, 0.3), (1.2, -0.4, -0.9), (0.0, 3.0, 1.0)):
            assert jacobi_eval(JacobiOrder(mu, nu, 0), y) == 1.0

    def test_degree_one_closed_form(self):
        mu = nu = 0.5
        assert jacobi_eval(JacobiOrder(mu, nu, 1), 0.0) == pytest.approx(0.0, abs=1e-15)
        for y in (-0.8, 0.1, 0.9):
            expected = 0.5 * (mu + nu + 2.0) * y + 0.5 * (mu - nu)
            assert jacobi_eval(JacobiOrder(mu, nu, 1), y) == pytest.approx(expected, rel=1e-14)

    def test_against_series_definition(self):
        for n in (2, 3, 5, 8):
            for mu, nu in ((0.5, 0.5), (0.7, -0.3), (2.0, 1.25)):
                for y in (-0.9, -0.25, 0.5, 0.95):
                    got = jacobi_eval(JacobiOrder(mu, nu, n), y)
                    want = jacobi_series_value(n, mu, nu, y)
                    assert got == pytest.approx(want, rel=1e-11, abs=1e-12)

    def test_strict_domain(self):
        with pytest.raises(DomainError):
            jacobi_eval(JacobiOrder(0.5, 0.5, 2), 1.5)
        # analytic continuation allowed when strictness is off
        val = jacobi_eval(JacobiOrder(0.5, 0.5, 2), 1.5, strict=False)
        assert math.isfinite(val)

    def test_invalid_order(self):
        with pytest.raises(ValidationError):
            JacobiOrder(-1.5, 0.0, 2)

    def test_array_input(self):
        ys = np.linspace(-1, 1, 11)
        vals = jacobi_eval(JacobiOrder(0.3, 0.8, 3), ys)
        assert vals.shape == ys.shape


class TestDifferentialIdentities:
    @pytest.mark.parametrize("mu,nu", [(0.5, 0.5), (0.548325, 0.548325),
                                       (1.3, -0.2), (0.0, 2.0)])
    @pytest.mark.parametrize("n", [1, 2, 4, 6])
    def test_second_order_equation(self, mu, nu, n):
        # (1-y^2) P'' - [(mu+nu+2)y + mu - nu] P' + n(n+mu+nu+1) P = 0
        h = 1e-5
        order = JacobiOrder(mu, nu, n)
        for y in (-0.6, -0.1, 0.2, 0.7):
            pm, p0, pp = (jacobi_eval(order, y + k * h) for k in (-1, 0, 1))
            d1 = (pp - pm) / (2 * h)
            d2 = (pp - 2 * p0 + pm) / (h * h)
            resid = (1 - y * y) * d2 - ((mu + nu + 2) * y + mu - nu) * d1 \
                + n * (n + mu + nu + 1) * p0
            scale = abs(n * (n + mu + nu + 1) * p0) + abs(d1) + 1.0
            assert abs(resid) / scale < 1e-6

    @pytest.mark.parametrize("mu,nu", [(0.5, 0.5), (1.1, 0.3), (0.2, 1.7)])
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_first_derivative_relation(self, mu, nu, n):
        # (1-y^2) P_n' = -n(y + (nu-mu)/(2n+mu+nu)) P_n + 2(n+mu)(n+nu)/(2n+mu+nu) P_{n-1}
        # (degree-consistent reading of the lowering relation)
        h = 1e-6
        for y in (-0.5, 0.0, 0.45, 0.8):
            pn = jacobi_eval(JacobiOrder(mu, nu, n), y)
            pn1 = jacobi_eval(JacobiOrder(mu, nu, n - 1), y)
            d1 = (jacobi_eval(JacobiOrder(mu, nu, n), y + h)
                  - jacobi_eval(JacobiOrder(mu, nu, n), y - h)) / (2 * h)
            s = 2 * n + mu + nu
            rhs = -n * (y + (nu - mu) / s) * pn + 2 * (n + mu) * (n + nu) / s * pn1
            lhs = (1 - y * y) * d1
            assert lhs == pytest.approx(rhs, rel=2e-6, abs=2e-6)


class TestNormalization:
    def test_m0_half_half(self):
        # A_0 at mu = nu = 1/2 is sqrt(2/pi)
        assert basis_norm(JacobiOrder(0.5, 0.5, 0)) == pytest.approx(
            math.sqrt(2.0 / math.pi), rel=1e-14)

    def test_inverse_of_orthogonality_norm(self):
        for n in (0, 1, 4, 9):
            for mu, nu in ((0.5, 0.5), (0.7, -0.3), (2.4, 1.1)):
                a = basis_norm(JacobiOrder(mu, nu, n))
                assert a == pytest.approx(1.0 / math.sqrt(jacobi_norm_squared(n, mu, nu)),
                                          rel=1e-12)

    def test_normalized_quadrature_is_one(self):
        for n in (0, 2, 5):
            for mu, nu in ((0.5, 0.5), (0.548325, 0.548325), (1.5, 0.25)):
                a = basis_norm(JacobiOrder(mu, nu, n))
                val = jacobi_weighted_integral(
                    lambda y: (a * jacobi_eval(JacobiOrder(mu, nu, n), y)) ** 2, mu, nu)
                assert val == pytest.approx(1.0, abs=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(params_strategy)
    def test_positive_for_all_degrees(self, mu_nu):
        mu, nu = mu_nu
        for m in range(0, 51, 5):
            assert basis_norm(JacobiOrder(mu, nu, m)) > 0.0


class TestYMatrixElement:
    def test_diagonal_vanishes_for_equal_exponents(self):
        for n in range(6):
            assert y_matrix_element(0.73, 0.73, n, n) == 0.0

    def test_super_diagonal_half_half(self):
        assert y_matrix_element(0.5, 0.5, 0, 1) == pytest.approx(0.5, rel=1e-15)
        assert y_matrix_element(0.5, 0.5, 1, 0) == pytest.approx(0.5, rel=1e-15)

    def test_far_elements_vanish(self):
        assert y_matrix_element(0.5, 0.5, 0, 2) == 0.0
        assert y_matrix_element(1.2, 0.1, 5, 2) == 0.0

    def test_symmetric(self):
        for n in range(4):
            assert y_matrix_element(0.9, 0.2, n, n + 1) == pytest.approx(
                y_matrix_element(0.9, 0.2, n + 1, n), rel=1e-15)

    def test_removable_singularity_at_zero_sum(self):
        # mu = nu = 0 makes 2n + mu + nu vanish at n = 0
        assert y_matrix_element(0.0, 0.0, 0, 0) == 0.0
        assert math.isfinite(y_matrix_element(0.0, 0.0, 0, 1))

    @pytest.mark.parametrize("mu,nu", [(0.5, 0.5), (0.548325, 0.548325), (1.3, 0.4)])
    def test_against_weighted_quadrature(self, mu, nu):
        # <n|y|m> with the weight absorbed into the quadrature rule
        for n in range(6):
            for m in range(6):
                if abs(n - m) > 1:
                    continue
                an = basis_norm(JacobiOrder(mu, nu, n))
                am = basis_norm(JacobiOrder(mu, nu, m))
                val = jacobi_weighted_integral(
                    lambda y: y * an * am
                    * jacobi_eval(JacobiOrder(mu, nu, n), y)
                    * jacobi_eval(JacobiOrder(mu, nu, m), y), mu, nu)
                assert val == pytest.approx(y_matrix_element(mu, nu, n, m),
                                            abs=1e-10)


class TestOrthogonality:
    @pytest.mark.parametrize("mu,nu", [(0.5, 0.5), (0.548325, 0.548325)])
    def test_gram_matrix_is_identity(self, mu, nu):
        size = 9
        gram = np.empty((size, size))
        for n in range(size):
            for m in range(size):
                an = basis_norm(JacobiOrder(mu, nu, n))
                am = basis_norm(JacobiOrder(mu, nu, m))
                gram[n, m] = jacobi_weighted_integral(
                    lambda y: an * am
                    * jacobi_eval(JacobiOrder(mu, nu, n), y)
                    * jacobi_eval(JacobiOrder(mu, nu, m), y), mu, nu)
        assert np.max(np.abs(gram - np.eye(size))) < 1e-10


class TestBasisEval:
    def test_vanishes_at_walls(self, case2_params):
        for m in range(4):
            assert basis_eval(case2_params, m, 1.0) == 0.0
            assert basis_eval(case2_params, m, -1.0) == 0.0

    def test_m0_value_at_origin(self, case2_params):
        # weight factors are 1 at y = 0 and P_0 = 1
        assert basis_eval(case2_params, 0, 0.0) == pytest.approx(
            math.sqrt(2.0 / math.pi), rel=1e-14)

    def test_sign_near_right_wall_follows_polynomial(self, case1_params):
        y = 1.0 - 1e-6
        for m in range(5):
            pm = jacobi_eval(JacobiOrder(case1_params.mu, case1_params.nu, m), 1.0)
            val = basis_eval(case1_params, m, y)
            assert math.copysign(1.0, val) == math.copysign(1.0, pm)
