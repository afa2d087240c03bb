import numpy as np
import pytest
from scipy.special import gamma

from src.core.exceptions import DataFormatError, DomainError
from src.frac_calc.operators import (
    FracOrder,
    deriv_ibp_residual,
    frac_integral_left,
    frac_integral_right,
    ibp_residual,
    weyl_deriv_left,
    weyl_deriv_right,
)
from src.path_core.grid import GridPath, Window


def _sine(n):
    return GridPath.from_function(lambda t: np.sin(2 * np.pi * t), n)


def _inversion_error(n, order=0.4, band=0.02):
    f = _sine(n)
    recovered = weyl_deriv_left(frac_integral_left(f, order), order)
    skip = int(np.ceil(band * n))
    gap = np.abs(recovered.values[:, 0] - f.values[1:, 0])
    return gap[skip - 1 : n - skip].max()


class TestFractionalIntegrals:
    """Riemann-Liouville integrals on uniform grids"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_integral_of_one(self):
        """I^α_{a+} 1 = (t-a)^α / Γ(α+1)"""
        one = GridPath(0.0, 1.0, np.ones(65))
        out = frac_integral_left(one, 0.3)
        t = one.times
        np.testing.assert_allclose(out.values[:, 0], t**0.3 / gamma(1.3), atol=1e-10)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_right_integral_of_one(self):
        """I^α_{b-} 1 = (b-t)^α / Γ(α+1)"""
        one = GridPath(0.0, 1.0, np.ones(65))
        out = frac_integral_right(one, 0.6)
        t = one.times
        np.testing.assert_allclose(out.values[:, 0], (1 - t) ** 0.6 / gamma(1.6), atol=1e-10)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_window_base_point(self):
        """On a window the integral starts from the window's left node"""
        line = GridPath.from_function(lambda t: t, 64)
        out = frac_integral_left(line.shift(-0.5), 0.5, Window(32, 64))
        t = out.times - 0.5
        np.testing.assert_allclose(out.values[:, 0], t**1.5 / gamma(2.5), atol=1e-10)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_order_range(self):
        """Orders outside (0, 1) are domain errors"""
        with pytest.raises(DomainError):
            FracOrder(1.2)
        with pytest.raises(DomainError):
            frac_integral_left(_sine(8), 0.0)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_integration_by_parts(self):
        """∫ I^α_{a+}f · g = ∫ f · I^α_{b-}g"""
        f = _sine(1024)
        g = GridPath.from_function(lambda t: np.cos(np.pi * t), 1024)
        assert abs(ibp_residual(f, g, 0.4)) <= 1e-3

    @pytest.mark.unit
    @pytest.mark.fast
    def test_derivative_integration_by_parts(self):
        """∫ D^α_{a+}f · g = ∫ f · D^α_{b-}g when f(a) = g(b) = 0"""
        f = GridPath.from_function(lambda t: np.sin(np.pi * t), 1024)
        g = GridPath.from_function(lambda t: np.cos(np.pi * t / 2), 1024)
        assert abs(deriv_ibp_residual(f, g, 0.4)) <= 5e-3

    @pytest.mark.unit
    @pytest.mark.fast
    def test_derivative_integration_by_parts_polynomial(self):
        """f = t and g = (1-t)²: both sides equal 2/Γ(5-α)"""
        f = GridPath.from_function(lambda t: t, 1024)
        g = GridPath.from_function(lambda t: (1 - t) ** 2, 1024)
        assert abs(deriv_ibp_residual(f, g, 0.35)) <= 1e-2 * 2 / gamma(4.65)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_derivative_integration_by_parts_boundary_values(self):
        """f(a) ≠ 0 is rejected"""
        f = GridPath.from_function(lambda t: 1.0 + t, 64)
        g = GridPath.from_function(lambda t: 1.0 - t, 64)
        with pytest.raises(DomainError):
            deriv_ibp_residual(f, g, 0.4)


class TestWeylDerivatives:
    """Marchaud-form derivatives and inversion"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_derivative_of_line(self):
        """D^α_{a+} t = t^{1-α} / Γ(2-α)"""
        line = GridPath.from_function(lambda t: t, 128)
        out = weyl_deriv_left(line, 0.35)
        t = out.times
        np.testing.assert_allclose(out.values[:, 0], t**0.65 / gamma(1.65), rtol=1e-8)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_right_derivative_of_line(self):
        """D^α_{b-} (b - t) = (b-t)^{1-α} / Γ(2-α)"""
        line = GridPath.from_function(lambda t: 1.0 - t, 128)
        out = weyl_deriv_right(line, 0.35)
        t = out.times
        np.testing.assert_allclose(out.values[:, 0], (1 - t) ** 0.65 / gamma(1.65), rtol=1e-8)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_derivative_skips_base_point(self):
        """The singular node t = a is dropped"""
        out = weyl_deriv_left(_sine(32), 0.4)
        assert out.n_points == 31
        assert out.t0 == pytest.approx(1 / 32)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_short_window(self):
        """Windows of one interval have no interior node"""
        with pytest.raises(DomainError):
            weyl_deriv_left(_sine(32), 0.4, Window(3, 4))

    @pytest.mark.unit
    @pytest.mark.fast
    def test_inversion_accuracy(self):
        """D^α(I^α f) recovers f on interior nodes"""
        assert _inversion_error(1024) <= 1e-3

    @pytest.mark.unit
    def test_inversion_first_order(self):
        """The inversion error halves when N doubles"""
        ratio = _inversion_error(512) / _inversion_error(1024)
        assert 1.4 <= ratio <= 2.6

    @pytest.mark.unit
    @pytest.mark.fast
    def test_non_finite_operand(self):
        """Operands are validated before the operators run"""
        with pytest.raises(DataFormatError):
            GridPath(0.0, 1.0, np.array([0.0, np.inf, 1.0]))
