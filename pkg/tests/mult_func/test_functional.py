import numpy as np
import pytest

from src.core.exceptions import ChenViolationError, DomainError
from src.mult_func.functional import (
    MultFunc,
    area_from_lipschitz,
    area_holder_norm,
    chen_defect,
    chen_defect_batch,
    driver_norms,
    transpose_area,
    validate_chen,
)
from src.stochastic.brownian import BrownianConfig, sample_brownian


def _all_triples(n):
    s, u, t = np.meshgrid(np.arange(n + 1), np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = (s <= u) & (u <= t)
    return s[keep], u[keep], t[keep]


class TestChenRelation:
    """The multiplicative identity on constructed areas"""

    @pytest.mark.unit
    def test_exhaustive_smooth(self, smooth_functional):
        """Every triple of a 128-interval smooth functional"""
        s, u, t = _all_triples(smooth_functional.n_points)
        assert chen_defect_batch(smooth_functional, s, u, t).max() <= 1e-12

    @pytest.mark.unit
    def test_exhaustive_brownian(self):
        """Every triple of a 128-interval Brownian functional"""
        mf = sample_brownian(BrownianConfig(d=2, n_coarse=128, refine_factor=4, seed=3), 0.4)
        s, u, t = _all_triples(mf.n_points)
        assert chen_defect_batch(mf, s, u, t).max() <= 1e-12

    @pytest.mark.unit
    def test_random_triples_brownian(self):
        """10⁴ random triples on a 1024-interval Brownian functional"""
        mf = sample_brownian(BrownianConfig(d=2, n_coarse=1024, refine_factor=4, seed=11), 0.4)
        rng = np.random.default_rng(0)
        s, u, t = np.sort(rng.integers(0, 1025, size=(3, 10_000)), axis=0)
        assert chen_defect_batch(mf, s, u, t).max() <= 1e-12

    @pytest.mark.unit
    @pytest.mark.fast
    def test_single_triple(self, linear_functional):
        """chen_defect agrees with the batch version"""
        single = chen_defect(linear_functional, 3, 10, 40)
        assert np.abs(single).max() <= 1e-14

    @pytest.mark.unit
    @pytest.mark.fast
    def test_triple_order(self, linear_functional):
        """Out-of-order indices are domain errors"""
        with pytest.raises(DomainError):
            chen_defect(linear_functional, 10, 3, 40)
        with pytest.raises(DomainError):
            linear_functional.area_at(5, 3)


class TestAreaConstructions:
    """Closed-form, transposed and resampled areas"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_linear_area(self, linear_functional):
        """(t, t) has area ½(t-s)²"""
        t = linear_functional.x.times
        assert linear_functional.area_at(8, 40)[0, 0] == pytest.approx(0.5 * (t[40] - t[8]) ** 2)
        assert linear_functional.area[0, 64, 0, 0] == pytest.approx(0.5)
        assert linear_functional.area[10, 3, 0, 0] == 0.0

    @pytest.mark.unit
    @pytest.mark.fast
    def test_norms_of_linear_area(self, linear_functional):
        """‖t‖_β = 1 and ‖½(t-s)²‖_{2β} = ½ on [0, 1]"""
        y_norm, area_norm = driver_norms(linear_functional)
        assert y_norm == pytest.approx(1.0)
        assert area_norm == pytest.approx(0.5)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_transpose_identity(self, smooth_functional):
        """(y⊗x)_{s,t} = Δy ⊗ Δx - ((x⊗y)_{s,t})ᵀ on every pair"""
        mf = smooth_functional
        tr = transpose_area(mf)
        i, j = np.triu_indices(mf.n_points + 1)
        dx = mf.x.values[j] - mf.x.values[i]
        dy = mf.y.values[j] - mf.y.values[i]
        expected = dy[:, :, None] * dx[:, None, :] - np.transpose(mf.area_pairs(i, j), (0, 2, 1))
        np.testing.assert_allclose(tr.area_pairs(i, j), expected, atol=1e-12)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_resample_keeps_coarse_pairs(self, brownian_functional):
        """Refined functionals agree with the original on coarse node pairs"""
        fine = brownian_functional.resample(4)
        assert fine.n_points == 4 * brownian_functional.n_points
        i, j = np.triu_indices(brownian_functional.n_points + 1)
        np.testing.assert_allclose(
            fine.area_pairs(4 * i, 4 * j), brownian_functional.area_pairs(i, j), atol=1e-12
        )

    @pytest.mark.unit
    @pytest.mark.fast
    def test_component(self, smooth_functional):
        """Components are scalar functionals with the matching area entry"""
        comp = smooth_functional.component(0, 1)
        assert (comp.m, comp.d) == (1, 1)
        assert comp.area_at(2, 50)[0, 0] == pytest.approx(smooth_functional.area_at(2, 50)[0, 1])


class TestValidateChen:
    """Validation of explicit area tables"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_constructed_table_passes(self, linear_functional):
        """A dense table built from cells is multiplicative"""
        table = MultFunc.from_table(
            linear_functional.x, linear_functional.y, linear_functional.area, 0.4
        )
        assert validate_chen(table) <= 1.0

    @pytest.mark.unit
    @pytest.mark.fast
    def test_perturbed_table_fails(self, linear_functional):
        """A single corrupted long-range entry is detected"""
        table = np.array(linear_functional.area)
        table[0, 64, 0, 0] += 1e-3
        mf = MultFunc.from_table(linear_functional.x, linear_functional.y, table, 0.4)
        with pytest.raises(ChenViolationError):
            validate_chen(mf)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_non_zero_diagonal_fails(self, linear_functional):
        """area(s, s) must vanish"""
        table = np.array(linear_functional.area)
        table[5, 5, 0, 0] = 1e-4
        mf = MultFunc.from_table(linear_functional.x, linear_functional.y, table, 0.4)
        with pytest.raises(ChenViolationError):
            validate_chen(mf)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_area_holder_norm_scaling(self, linear_path):
        """Scaling both paths by c scales the area norm by c²"""
        base = area_holder_norm(area_from_lipschitz(linear_path, linear_path, 0.4))
        scaled = area_holder_norm(
            area_from_lipschitz(linear_path.scale(3.0), linear_path.scale(3.0), 0.4)
        )
        assert scaled == pytest.approx(9.0 * base)
