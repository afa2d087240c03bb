import numpy as np
import pytest

from src.core.exceptions import DomainError
from src.mult_func.functional import area_from_lipschitz, chen_defect_batch, validate_chen
from src.path_core.grid import GridPath
from src.rde_solver.fields import linear_scalar
from src.rough_integral.sums import compensated_riemann_sum
from src.stochastic.brownian import (
    GENERATOR_ID,
    BrownianConfig,
    coarse_cells,
    fine_increments,
    increment_statistics,
    modulus_constant,
    pathwise_integral_brownian,
    polygonal,
    polygonal_error_norms,
    sample_brownian,
)
from tests.utils.reference_values import BETA, LINEAR_MODULUS


class TestBrownianConfig:
    """Validation of the sampling parameters"""

    @pytest.mark.unit
    @pytest.mark.fast
    @pytest.mark.parametrize(
        "params",
        [{"d": 0}, {"T": 0.0}, {"n_coarse": 1}, {"refine_factor": 3}, {"refine_factor": 1}, {"sigma": -1.0}],
    )
    def test_invalid(self, params):
        with pytest.raises(DomainError):
            BrownianConfig(**params)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_provenance(self, brownian_config):
        """Provenance names the generator and fine grid"""
        prov = brownian_config.provenance()
        assert prov["generator"] == GENERATOR_ID
        assert prov["n_fine"] == 128 * 8
        assert prov["seed"] == 7


class TestSampling:
    """The Brownian functional (B, B, B⊗B)"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_deterministic(self, brownian_config):
        """The same seed gives the same increments"""
        np.testing.assert_array_equal(
            fine_increments(brownian_config), fine_increments(brownian_config)
        )

    @pytest.mark.unit
    @pytest.mark.fast
    def test_diagonal_area(self, brownian_functional):
        """Diagonal one-cell areas are ½(ΔB^i)²"""
        inc = brownian_functional.y.increments()
        for i in range(2):
            np.testing.assert_allclose(
                brownian_functional.cell_area[:, i, i], 0.5 * inc[:, i] ** 2, rtol=1e-8, atol=1e-15
            )

    @pytest.mark.unit
    @pytest.mark.fast
    def test_chen(self, brownian_functional):
        """The sampled functional satisfies Chen"""
        assert validate_chen(brownian_functional) <= 1e-8
        rng = np.random.default_rng(0)
        s, u, t = np.sort(rng.integers(0, 129, size=(3, 500)), axis=0)
        assert np.abs(chen_defect_batch(brownian_functional, s, u, t)).max() <= 1e-12

    @pytest.mark.unit
    @pytest.mark.fast
    def test_coarse_cells_sum_fine_increments(self):
        """Off-diagonal cells are left-point sums of the fine increments"""
        db = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, -1.0], [1.0, 1.0]])
        cells = coarse_cells(db, 2)
        assert cells[0, 0, 1] == 1.0
        assert cells[0, 1, 0] == 0.0
        assert cells[1, 0, 1] == 2.0
        assert cells[1, 1, 0] == -1.0
        np.testing.assert_allclose(cells[:, 0, 0], [0.5, 4.5])

    @pytest.mark.unit
    @pytest.mark.fast
    def test_increment_statistics(self):
        """Increments match N(0, Δt) in mean and variance"""
        b = sample_brownian(BrownianConfig(d=2, n_coarse=4096, refine_factor=2, seed=3), BETA)
        stats = increment_statistics(b.y)
        assert stats.count == 8192
        assert stats.passed

    @pytest.mark.unit
    @pytest.mark.fast
    def test_zero_volatility(self):
        """sigma = 0 gives the zero path"""
        b = sample_brownian(BrownianConfig(d=2, n_coarse=32, refine_factor=2, sigma=0.0), BETA)
        assert np.all(b.y.values == 0.0)
        assert np.all(b.cell_area == 0.0)

    @pytest.mark.slow
    def test_stratonovich_integral(self):
        """∫ B ∘ dB = ½ B_T² in one dimension"""
        b = sample_brownian(BrownianConfig(d=1, n_coarse=512, refine_factor=4, seed=2), BETA)
        half_square = 0.5 * b.y.values[-1, 0] ** 2
        assert compensated_riemann_sum(linear_scalar(), b)[0] == pytest.approx(half_square, abs=1e-12)
        value = pathwise_integral_brownian(linear_scalar(), b, None)[0]
        assert abs(value - half_square) <= 0.05


class TestPolygonal:
    """Polygonal approximations and their errors"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_full_resolution_is_identity(self, brownian_functional):
        b = brownian_functional.y
        np.testing.assert_allclose(polygonal(b, b.n_points).values, b.values)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_single_piece_is_linear(self, brownian_functional):
        """n = 1 joins the end points"""
        b = brownian_functional.y
        line = polygonal(b, 1)
        t = b.times[:, None]
        np.testing.assert_allclose(line.values, b.values[0] + t * (b.values[-1] - b.values[0]))

    @pytest.mark.unit
    @pytest.mark.fast
    def test_nodes_kept(self, brownian_functional):
        b = brownian_functional.y
        pi = polygonal(b, 16)
        np.testing.assert_allclose(pi.values[::8], b.values[::8])

    @pytest.mark.unit
    @pytest.mark.fast
    @pytest.mark.parametrize("n", [0, 3, 256])
    def test_non_divisor(self, brownian_functional, n):
        with pytest.raises(DomainError):
            polygonal(brownian_functional.y, n)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_piecewise_linear_driver_errors_vanish(self):
        """A piecewise-linear functional is its own polygon"""
        y = GridPath.from_function(lambda t: np.stack([t, np.abs(t - 0.5)]), 64)
        norms = polygonal_error_norms(area_from_lipschitz(y, y, BETA), 64, BETA)
        assert max(norms.values()) <= 1e-12

    @pytest.mark.unit
    @pytest.mark.fast
    def test_brownian_full_resolution(self, brownian_functional):
        """At full resolution only the Lévy area remains in e2"""
        norms = polygonal_error_norms(brownian_functional, 128, BETA)
        assert norms["e1"] <= 1e-12 and norms["e_sup"] <= 1e-12
        assert norms["e2"] > 1e-6

    @pytest.mark.unit
    @pytest.mark.fast
    def test_errors_shrink(self, brownian_functional):
        """Finer polygons are closer in sup norm"""
        coarse = polygonal_error_norms(brownian_functional, 4, BETA)
        fine = polygonal_error_norms(brownian_functional, 64, BETA)
        assert fine["e_sup"] < coarse["e_sup"]
        assert fine["e1"] < coarse["e1"]


class TestModulus:
    """Lévy modulus constant"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_linear_path(self):
        """For x_t = t on [0, 1/2] the supremum sits at the full lag"""
        line = GridPath.from_function(lambda t: t, 64, 0.0, 0.5)
        assert modulus_constant(line) == pytest.approx(LINEAR_MODULUS, rel=1e-12)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_brownian_order_one(self):
        """Unit lags already push the constant above one half"""
        b = sample_brownian(BrownianConfig(d=1, n_coarse=1024, refine_factor=2, seed=1), BETA)
        assert modulus_constant(b.y) > 0.5
