import numpy as np
import pytest

from src.core.exceptions import DataFormatError, DomainError
from src.path_core.grid import GridPath, HolderExponent, Window, as_beta


class TestGridPath:
    """Construction and arithmetic of uniformly sampled paths"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_from_function_shapes(self):
        """Scalar and vector samplers give (n+1, dim) values"""
        scalar = GridPath.from_function(lambda t: t, 10)
        vector = GridPath.from_function(lambda t: np.stack([t, t**2, -t]), 10)
        assert scalar.values.shape == (11, 1)
        assert vector.values.shape == (11, 3)
        assert vector.step == pytest.approx(0.1)
        assert vector.times[-1] == pytest.approx(1.0)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_values_are_read_only(self, linear_path):
        """Stored values cannot be modified in place"""
        with pytest.raises(ValueError):
            linear_path.values[0, 0] = 5.0

    @pytest.mark.unit
    @pytest.mark.fast
    def test_rejects_non_finite_values(self):
        """NaN entries are a data-format error"""
        with pytest.raises(DataFormatError):
            GridPath(0.0, 1.0, np.array([0.0, np.nan, 1.0]))

    @pytest.mark.unit
    @pytest.mark.fast
    def test_rejects_empty_interval(self):
        """T must exceed t0"""
        with pytest.raises(DomainError):
            GridPath(1.0, 1.0, np.zeros(3))

    @pytest.mark.unit
    @pytest.mark.fast
    def test_restrict_and_window_values(self, linear_path):
        """Restriction keeps node times and values of the window"""
        part = linear_path.restrict(Window(16, 32))
        assert part.n_points == 16
        assert part.t0 == pytest.approx(0.25)
        assert part.T == pytest.approx(0.5)
        np.testing.assert_allclose(part.values[:, 0], linear_path.times[16:33])

    @pytest.mark.unit
    @pytest.mark.fast
    def test_difference_needs_same_grid(self, linear_path):
        """Paths on different grids cannot be subtracted"""
        other = GridPath.from_function(lambda t: t, 32)
        with pytest.raises(DomainError):
            linear_path.difference(other)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_shift_scale_difference(self, linear_path, quadratic_path):
        """Arithmetic helpers act node-wise"""
        moved = linear_path.shift(2.0).scale(3.0)
        np.testing.assert_allclose(moved.values, 3.0 * (linear_path.values + 2.0))
        gap = linear_path.difference(quadratic_path)
        np.testing.assert_allclose(gap.values[:, 0], linear_path.times - linear_path.times**2)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_reversed(self, quadratic_path):
        """Reversal maps x(t) to x(t0 + T - t)"""
        rev = quadratic_path.reversed()
        np.testing.assert_allclose(rev.values[:, 0], (1.0 - quadratic_path.times) ** 2)


class TestWindowAndExponent:
    """Index windows and Hölder exponents"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_window_ordering(self):
        """lo must lie strictly below hi"""
        with pytest.raises(DomainError):
            Window(3, 3)
        with pytest.raises(DomainError):
            Window(-1, 2)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_window_exceeding_grid(self):
        """A window past the last node is rejected"""
        with pytest.raises(DomainError):
            Window(0, 20).check(10)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_rough_range(self):
        """The rough range is (1/3, 1/2)"""
        assert HolderExponent(0.4).rough().beta == 0.4
        with pytest.raises(DomainError):
            HolderExponent(0.3).rough()
        with pytest.raises(DomainError):
            as_beta(1.2)
