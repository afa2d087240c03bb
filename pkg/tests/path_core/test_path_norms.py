import numpy as np
import pytest

from src.core.exceptions import DomainError
from src.path_core.grid import GridPath, Window
from src.path_core.norms import (
    holder_exponent_estimate,
    holder_norm,
    holder_norm_refinement,
    p_variation,
    resample,
    subsample,
    sup_norm,
)


class TestHolderNorms:
    """Grid Hölder, sup and p-variation norms"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_linear_holder_norm(self, linear_path):
        """|t-s| / |t-s|^β peaks at the full interval"""
        assert holder_norm(linear_path, 0.4) == pytest.approx(1.0)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_holder_norm_on_window(self, linear_path):
        """Restricting to a window of length 1/4 gives (1/4)^{1-β}"""
        value = holder_norm(linear_path, 0.4, Window(0, 16))
        assert value == pytest.approx(0.25**0.6)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_constant_path_has_zero_norm(self):
        """Constants have vanishing seminorm"""
        path = GridPath(0.0, 1.0, np.full(17, 3.0))
        assert holder_norm(path, 0.4) == 0.0
        assert sup_norm(path) == pytest.approx(3.0)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_p_variation_of_monotone_path(self, quadratic_path):
        """For a monotone scalar path every p-variation equals the total increment"""
        assert p_variation(quadratic_path, 1.0) == pytest.approx(1.0)
        assert p_variation(quadratic_path, 2.5) == pytest.approx(1.0)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_p_variation_below_holder_norm(self):
        """Var_{1/β} is bounded by the β-Hölder norm on [0, 1]"""
        path = GridPath.from_function(lambda t: np.sin(6 * np.pi * t) * np.sqrt(t), 64)
        assert p_variation(path, 1 / 0.4) <= holder_norm(path, 0.4) + 1e-12

    @pytest.mark.unit
    @pytest.mark.fast
    def test_p_variation_rejects_small_p(self, linear_path):
        """p below one is outside the domain"""
        with pytest.raises(DomainError):
            p_variation(linear_path, 0.5)


class TestRefinement:
    """Resampling and refinement diagnostics"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_resample_then_subsample(self, quadratic_path):
        """Subsampling a linear resample returns the original nodes"""
        fine = resample(quadratic_path, 4)
        assert fine.n_points == 4 * quadratic_path.n_points
        np.testing.assert_allclose(subsample(fine, 4).values, quadratic_path.values)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_subsample_requires_divisor(self, linear_path):
        """Strides must divide the grid"""
        with pytest.raises(DomainError):
            subsample(linear_path, 5)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_refinement_keys(self, linear_path):
        """Dyadic sub-samplings are keyed by interval count"""
        out = holder_norm_refinement(linear_path, 0.4, levels=4)
        assert list(out) == [8, 16, 32, 64]
        assert all(v == pytest.approx(1.0) for v in out.values())

    @pytest.mark.unit
    @pytest.mark.fast
    def test_exponent_estimate(self, linear_path):
        """Lipschitz paths report exponent one, constants report one"""
        assert holder_exponent_estimate(linear_path) == pytest.approx(1.0)
        assert holder_exponent_estimate(GridPath(0.0, 1.0, np.ones(9))) == 1.0
        rough = GridPath.from_function(lambda t: np.sqrt(t), 1024)
        assert holder_exponent_estimate(rough) < 0.9
