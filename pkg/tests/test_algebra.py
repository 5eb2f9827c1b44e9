import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scarf_spectrum import (
    EnergyPolynomial,
    SingularPointError,
    StructuredRational,
    ZeroPolynomialError,
    real_roots,
    rf_add,
    rf_derivative,
    rf_equal,
    rf_eval,
    rf_mul,
)

P = EnergyPolynomial


def srat(num_rows, d):
    return StructuredRational([P(row) for row in num_rows], d)


# dyadic coefficients keep every ring operation exact in doubles
dyadic = st.integers(min_value=-8, max_value=8).map(lambda k: k / 2.0)
energy_poly = st.lists(dyadic, min_size=0, max_size=3).map(P)
rationals = st.builds(
    StructuredRational,
    st.lists(energy_poly, min_size=0, max_size=4),
    st.integers(min_value=0, max_value=2),
)


class TestStructuredRationalOps:
    def test_add_identity(self):
        a = srat([(1.0, 2.0), (3.0,)], 1)
        assert rf_equal(rf_add(a, StructuredRational.zero()), a)

    def test_add_like_terms(self):
        # y/(1-y^2) + y/(1-y^2) = 2y/(1-y^2)
        a = srat([(), (1.0,)], 1)
        out = rf_add(a, a)
        assert rf_equal(out, srat([(), (2.0,)], 1))

    def test_add_cross_multiplied(self):
        # 1/(1-y^2) + 1 = (2 - y^2)/(1-y^2)
        a = srat([(1.0,)], 1)
        b = StructuredRational.one()
        out = rf_add(a, b)
        assert rf_equal(out, srat([(2.0,), (), (-1.0,)], 1))

    def test_mul_identity(self):
        a = srat([(1.0, -1.0), (0.5,)], 2)
        assert rf_equal(rf_mul(a, StructuredRational.one()), a)

    def test_mul_square(self):
        # (3y/(1-y^2))^2 = 9y^2/(1-y^2)^2
        a = srat([(), (3.0,)], 1)
        out = rf_mul(a, a)
        assert rf_equal(out, srat([(), (), (9.0,)], 2))

    def test_mul_cancels_common_factor(self):
        # [(1-y^2) p(y)]/(1-y^2) collapses to p(y) with d = 0
        p_num = [(2.0,), (1.0,)]  # p = 2 + y
        lifted = srat([(2.0,), (1.0,), (-2.0,), (-1.0,)], 1)  # (1-y^2)(2+y)/(1-y^2)
        assert lifted.denom_power == 0
        assert rf_equal(lifted, srat(p_num, 0))

    def test_derivative_linear(self):
        a = srat([(), (1.0,)], 0)
        assert rf_equal(rf_derivative(a), StructuredRational.one())

    def test_derivative_quotient_rule(self):
        # d/dy [3y/(1-y^2)] = 3(1+y^2)/(1-y^2)^2
        a = srat([(), (3.0,)], 1)
        out = rf_derivative(a)
        assert rf_equal(out, srat([(3.0,), (), (3.0,)], 2))

    def test_derivative_matches_finite_difference(self):
        r = srat([(1.0, 0.5), (2.0,), (-1.0, 1.0)], 2)
        dr = rf_derivative(r)
        h = 1e-6
        for y in (-0.7, -0.2, 0.0, 0.4, 0.8):
            for eps in (-1.5, 0.3, 2.0):
                fd = (rf_eval(r, y + h, eps) - rf_eval(r, y - h, eps)) / (2 * h)
                exact = rf_eval(dr, y, eps)
                assert exact == pytest.approx(fd, rel=1e-8)


class TestEval:
    def test_constant(self):
        assert rf_eval(StructuredRational.one(), 0.3, 5.0) == 1.0

    def test_simple_pole_value(self):
        a = srat([(), (3.0,)], 1)  # 3y/(1-y^2)
        assert rf_eval(a, 0.5, 0.0) == pytest.approx(2.0, rel=1e-15)

    def test_singular_point_raises(self):
        a = srat([(), (3.0,)], 1)
        with pytest.raises(SingularPointError):
            rf_eval(a, 1.0, 0.0)

    def test_polynomial_at_singular_point_is_fine(self):
        a = srat([(2.0,), (1.0,)], 0)
        assert rf_eval(a, 1.0, 0.0) == 3.0


class TestRingProperties:
    @settings(max_examples=150, deadline=None)
    @given(rationals, rationals, rationals)
    def test_associative_addition(self, a, b, c):
        assert rf_equal(rf_add(rf_add(a, b), c), rf_add(a, rf_add(b, c)))

    @settings(max_examples=150, deadline=None)
    @given(rationals, rationals, rationals)
    def test_distributive(self, a, b, c):
        left = rf_mul(a, rf_add(b, c))
        right = rf_add(rf_mul(a, b), rf_mul(a, c))
        assert rf_equal(left, right)

    @settings(max_examples=150, deadline=None)
    @given(rationals, rationals)
    def test_product_rule(self, a, b):
        left = rf_derivative(rf_mul(a, b))
        right = rf_add(rf_mul(a, rf_derivative(b)), rf_mul(rf_derivative(a), b))
        assert rf_equal(left, right)

    @settings(max_examples=100, deadline=None)
    @given(rationals, rationals)
    def test_commutative(self, a, b):
        assert rf_equal(rf_mul(a, b), rf_mul(b, a))
        assert rf_equal(rf_add(a, b), rf_add(b, a))


class TestRealRoots:
    def test_factored_quadratic(self):
        roots = real_roots(P((4.0, -5.0, 1.0)))  # (eps-1)(eps-4)
        assert list(roots) == pytest.approx([1.0, 4.0], abs=1e-13)

    def test_degree_zero_has_no_roots(self):
        assert len(real_roots(P((7.0,)))) == 0

    def test_zero_polynomial_raises(self):
        with pytest.raises(ZeroPolynomialError):
            real_roots(P(()))

    def test_quadratic_vs_formula_oracle(self):
        # the t=1 quantization quadratic for V+ = 0.25, V1 = 1, L = 1
        u1 = 2.0 / math.pi ** 2
        uplus = 0.5 / math.pi ** 2
        a = 0.25 * (-1.0 + math.sqrt(1.0 + 4.0 * uplus))
        c0 = (4 + 24 * a + 52 * a ** 2 + 48 * a ** 3 + 16 * a ** 4) / u1 ** 2
        c1 = -(5 + 12 * a + 8 * a ** 2) / u1 ** 2
        c2 = 1.0 / u1 ** 2
        roots = real_roots(P((c0, c1, c2)))
        disc = math.sqrt(c1 * c1 - 4 * c2 * c0)
        expected = sorted([(-c1 - disc) / (2 * c2), (-c1 + disc) / (2 * c2)])
        assert list(roots) == pytest.approx(expected, rel=1e-13)
        assert roots.roots[0] == pytest.approx(1.0989859, abs=5e-7)
        assert roots.roots[1] == pytest.approx(4.1956364, abs=5e-7)

    def test_window_excludes_outside_roots(self):
        p = P.from_roots([-50.0, 0.5, 80.0])
        roots = real_roots(p, window=(-10.0, 10.0))
        assert list(roots) == pytest.approx([0.5], abs=1e-12)

    def test_multiple_root_merged_and_flagged(self):
        p = P.from_roots([2.0, 2.0, -1.0])
        roots = real_roots(p)
        assert list(roots) == pytest.approx([-1.0, 2.0], abs=1e-7)
        assert roots.multiplicities[1] == 2
        assert roots.merged[1]

    def test_no_real_roots(self):
        assert len(real_roots(P((1.0, 0.0, 1.0)))) == 0  # eps^2 + 1

    @settings(max_examples=120, deadline=None)
    @given(st.lists(st.integers(min_value=-10, max_value=10).map(lambda k: k / 2.0),
                    min_size=1, max_size=8, unique=True),
           st.sampled_from([1.0, -2.0, 0.5]))
    def test_recovers_constructed_roots(self, root_list, lead):
        # Half-integer roots keep the expanded coefficients exact in doubles,
        # so the constructed locations really are the polynomial's roots.
        root_list = sorted(root_list)
        p = P.from_roots(root_list, leading=lead)
        found = real_roots(p, window=(-100.0, 100.0))
        assert len(found) == len(root_list)
        for got, want in zip(found, root_list):
            assert got == pytest.approx(want, abs=1e-10)

    def test_extended_precision_refinement(self):
        with mp.workdps(40):
            p = P((mp.mpf(-2), mp.mpf(0), mp.mpf(1)))  # eps^2 - 2
            roots = real_roots(p)
            assert abs(roots.roots[1] - math.sqrt(2)) < 1e-15


class TestEnergyPolynomial:
    def test_trim_and_degree(self):
        assert P((1.0, 2.0, 0.0)).degree == 1
        assert P(()).degree == -1
        assert P((0.0,)).is_zero

    def test_horner_eval(self):
        p = P((1.0, -3.0, 2.0))
        assert p(2.0) == 1.0 - 6.0 + 8.0

    def test_derivative(self):
        assert P((5.0, 1.0, 3.0)).derivative() == P((1.0, 6.0))
