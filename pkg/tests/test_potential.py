import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scarf_spectrum import (
    DomainError,
    ValidationError,
    build_wave_matrix,
    derive_params,
    dimensionless_energy,
    potential_value,
    scarf_closed_spectrum,
)

PI2 = math.pi ** 2


class TestDeriveParams:
    def test_symmetric_zero_couplings_give_half(self):
        p = derive_params(0.0, 0.0, 0.0, 1.0, 1.0)
        assert p.mu == pytest.approx(0.5, rel=1e-15)
        assert p.nu == pytest.approx(0.5, rel=1e-15)

    def test_case1_derived_values(self):
        p = derive_params(0.0, 0.25, 0.0, 1.0, 1.0)
        assert p.mu == pytest.approx(math.sqrt(0.25 + 0.5 / PI2), rel=1e-15)
        assert p.mu == pytest.approx(0.5483253, abs=5e-8)
        assert p.aim_alpha == pytest.approx(0.0241626, abs=5e-8)
        assert p.u1 == pytest.approx(2.0 / PI2, rel=1e-15)

    def test_mu_squared_negative_rejected(self):
        lam2 = PI2
        with pytest.raises(ValidationError):
            derive_params(0.0, -lam2 / 8 - 0.01, 0.0, 0.0, 1.0)

    def test_negative_vminus_rejected(self):
        with pytest.raises(ValidationError):
            derive_params(0.0, 0.0, -0.1, 0.0, 1.0)

    def test_nonpositive_length_rejected(self):
        with pytest.raises(ValidationError):
            derive_params(0.0, 0.0, 0.0, 0.0, -1.0)

    def test_aim_alpha_only_without_vminus(self):
        assert derive_params(0.0, 0.2, 0.1, 0.0, 1.0).aim_alpha is None
        assert derive_params(0.0, 0.2, 0.0, 0.0, 1.0).aim_alpha is not None

    def test_lambda_is_pi_over_L(self):
        p = derive_params(0.0, 0.0, 0.0, 0.0, 2.5)
        assert p.lam == math.pi / 2.5

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=-1.0, max_value=4.0),
           st.floats(min_value=0.0, max_value=2.0),
           st.floats(min_value=0.25, max_value=4.0))
    def test_dimensionless_consistency(self, vp, vm, L):
        lam2 = (math.pi / L) ** 2
        if vp - vm < -lam2 / 8 or vp + vm < -lam2 / 8:
            return
        p = derive_params(0.7, vp, vm, -0.3, L)
        for u, v in ((p.u0, 0.7), (p.u1, -0.3), (p.uplus, vp), (p.uminus, vm)):
            assert u * lam2 / 2.0 == pytest.approx(v, rel=1e-13, abs=1e-15)


class TestPotentialValue:
    def test_at_origin(self):
        p = derive_params(0.3, 0.2, 0.1, 5.0, 1.0)
        assert potential_value(p, 0.0) == pytest.approx(0.5, rel=1e-15)

    def test_figure_parameters_origin(self, figure1_params):
        assert potential_value(figure1_params, 0.0) == pytest.approx(1.25, rel=1e-15)

    def test_wall_is_out_of_domain(self):
        p = derive_params(0.0, 0.0, 0.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            potential_value(p, 0.5)
        with pytest.raises(DomainError):
            potential_value(p, -0.7)

    def test_even_when_odd_couplings_vanish(self):
        p = derive_params(0.4, 0.3, 0.0, 0.0, 1.0)
        for x in np.linspace(0.01, 0.49, 25):
            assert potential_value(p, x) == pytest.approx(potential_value(p, -x),
                                                          rel=1e-14)


class TestClosedSpectrum:
    def test_square_well_limit(self):
        p = derive_params(0.0, 0.0, 0.0, 0.0, 1.0)
        for n in range(6):
            eps = dimensionless_energy(p, scarf_closed_spectrum(p, n))
            assert eps == pytest.approx((n + 1) ** 2, rel=1e-14)

    def test_case1_ground_state(self):
        p = derive_params(0.0, 0.25, 0.0, 0.0, 1.0)
        eps0 = dimensionless_energy(p, scarf_closed_spectrum(p, 0))
        assert eps0 == pytest.approx(1.0989860, abs=5e-7)

    def test_v0_shift_is_additive(self):
        base = derive_params(0.0, 0.3, 0.1, 0.0, 1.0)
        lifted = derive_params(2.5, 0.3, 0.1, 0.0, 1.0)
        for n in range(4):
            assert scarf_closed_spectrum(lifted, n) == pytest.approx(
                scarf_closed_spectrum(base, n) + 2.5, rel=1e-14)

    def test_requires_v1_zero(self):
        p = derive_params(0.0, 0.0, 0.0, 1.0, 1.0)
        with pytest.raises(ValidationError):
            scarf_closed_spectrum(p, 0)

    def test_matches_tridiagonal_diagonal(self):
        # closed form == matrix diagonal when the coupling term is absent
        p = derive_params(0.35, 0.4, 0.2, 0.0, 1.3)
        T = build_wave_matrix(p, 21)
        for n in range(21):
            eps = dimensionless_energy(p, scarf_closed_spectrum(p, n))
            assert eps == pytest.approx(T.diag[n], rel=1e-14)
