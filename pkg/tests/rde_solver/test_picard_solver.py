import json

import numpy as np
import pytest
from scipy.integrate import quad

from src.core.exceptions import BoxExitError, DomainError, SolverError
from src.mult_func.functional import area_from_lipschitz
from src.path_core.grid import GridPath, Window
from src.rde_solver.classical import classical_solve
from src.rde_solver.fields import constant_field, linear_scalar, rotation_field, sine_field
from src.rde_solver.io import write_solution
from src.rde_solver.solver import (
    SolverConfig,
    growth_from_norms,
    picard_step,
    solve,
    step_threshold,
)
from src.rde_solver.stability import stability_gap
from src.rough_integral.config import IntegralConfig
from tests.utils.reference_values import (
    ALPHA_ALT,
    BETA,
    THRESHOLD_EXAMPLE,
    THRESHOLD_EXAMPLE_EPSILON,
    sine_flow,
)


def _driver(func, n):
    y = GridPath.from_function(func, n)
    return area_from_lipschitz(y, y, BETA)


def _planar(t):
    return np.stack([t, np.sin(2 * np.pi * t) / (2 * np.pi)])


@pytest.fixture
def sc(cfg):
    """Default solver configuration"""
    return SolverConfig(cfg=cfg)


class TestStepThreshold:
    """Window thresholds 1/α(y)"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_worked_example(self):
        """ρ_f = k = ‖y‖ = ‖y⊗y‖ = 1 at β = 0.4, ε = 0.05"""
        cfg = IntegralConfig(beta=BETA, alpha=ALPHA_ALT, epsilon=THRESHOLD_EXAMPLE_EPSILON)
        sc = SolverConfig(cfg=cfg)
        f = constant_field(1.0)
        assert f.rho == 1.0
        growth = growth_from_norms(1.0, 1.0, f, sc)
        assert 1.0 / growth == pytest.approx(THRESHOLD_EXAMPLE, rel=1e-12)
        assert 1.0 / growth == pytest.approx(0.00984, abs=1e-5)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_zero_driver(self, sc):
        """A constant driver allows the whole interval"""
        assert growth_from_norms(0.0, 0.0, sine_field(), sc) == 1.0
        flat = _driver(lambda t: 0.0 * t, 32)
        assert step_threshold(flat, sine_field(), sc) == 1.0

    @pytest.mark.unit
    @pytest.mark.fast
    def test_uniqueness_is_stricter(self, cfg):
        """β(y) >= α(y) for the same driver"""
        y = _driver(lambda t: t, 64)
        f = sine_field()
        existence = step_threshold(y, f, SolverConfig(cfg=cfg))
        uniqueness = step_threshold(y, f, SolverConfig(cfg=cfg, mode="uniqueness"))
        assert 0 < uniqueness <= existence


class TestSolve:
    """Picard solutions against closed forms and the classical oracle"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_constant_field_exact(self, sc):
        """f ≡ c gives x = x₀ + c (y - y₀)"""
        y = _driver(lambda t: t + 0.1 * np.sin(6 * t), 64)
        sol = solve(constant_field(2.0), y, [1.0], sc)
        expected = 1.0 + 2.0 * (y.y.values[:, 0] - y.y.values[0, 0])
        np.testing.assert_allclose(sol.x.values[:, 0], expected, atol=1e-13)
        assert sol.x.n_points == 64

    @pytest.mark.unit
    @pytest.mark.fast
    def test_sine_flow(self, sc):
        """x′ = sin(x) against 2 arctan(tan(x₀/2) e^t)"""
        y = _driver(lambda t: t, 256)
        sol = solve(sine_field(), y, [1.0], sc)
        exact = sine_flow(y.y.times)
        assert np.abs(sol.x.values[:, 0] - exact).max() <= 1e-3

    @pytest.mark.unit
    @pytest.mark.fast
    def test_sine_flow_second_order(self, sc):
        """Halving the step cuts the error by about four"""
        errors = []
        for n in (64, 128):
            y = _driver(lambda t: t, n)
            sol = solve(sine_field(), y, [1.0], sc)
            errors.append(np.abs(sol.x.values[:, 0] - sine_flow(y.y.times)).max())
        assert errors[0] / errors[1] > 3.0

    @pytest.mark.unit
    def test_planar_against_classical(self, sc):
        """Non-commuting planar field against DOP853 on the linear interpolant"""
        y = _driver(_planar, 128)
        f = rotation_field(2, 0.5)
        sol = solve(f, y, [0.5, -0.5], sc)
        oracle = classical_solve(f, y.y, [0.5, -0.5])
        assert np.abs(sol.x.values - oracle.values).max() <= 1e-3

    @pytest.mark.unit
    @pytest.mark.fast
    def test_residual(self, sc):
        """The solution is a fixed point of the integral equation"""
        y = _driver(_planar, 64)
        f = rotation_field(2, 0.5)
        sol = solve(f, y, [0.5, -0.5], sc)
        assert sol.residual(f) <= 1e-8

    @pytest.mark.unit
    @pytest.mark.fast
    def test_initial_iterates_agree(self, cfg):
        """Constant and Euler starts reach the same fixed point"""
        y = _driver(lambda t: t, 64)
        a = solve(sine_field(), y, [1.0], SolverConfig(cfg=cfg))
        b = solve(sine_field(), y, [1.0], SolverConfig(cfg=cfg, initial_iterate="euler"))
        np.testing.assert_allclose(a.x.values, b.x.values, atol=1e-9)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_uniqueness_mode(self, cfg):
        """Uniqueness thresholds reach the same solution"""
        y = _driver(lambda t: t, 64)
        a = solve(sine_field(), y, [1.0], SolverConfig(cfg=cfg))
        b = solve(sine_field(), y, [1.0], SolverConfig(cfg=cfg, mode="uniqueness"))
        np.testing.assert_allclose(a.x.values, b.x.values, atol=1e-9)
        assert b.diagnostics["mode"] == "uniqueness"

    @pytest.mark.unit
    @pytest.mark.fast
    def test_fractional_evaluator(self, cfg):
        """The fractional evaluator agrees with the Riemann one for f ≡ c"""
        y = _driver(lambda t: t, 32)
        f = constant_field(2.0)
        sc = SolverConfig(cfg=cfg, evaluator="fractional", k_universal=1e-3)
        sol = solve(f, y, [1.0], sc)
        assert len(sol.steps) == 1
        np.testing.assert_allclose(sol.x.values[:, 0], 1.0 + 2.0 * y.y.times, atol=0.1)

    @pytest.mark.unit
    def test_evaluators_agree_on_sine_flow(self, cfg):
        """x′ = sin(x): fractional and Riemann evaluators reach the same path"""
        y = _driver(lambda t: t, 32)
        riemann = solve(sine_field(), y, [1.0], SolverConfig(cfg=cfg, k_universal=1e-3))
        fractional = solve(
            sine_field(), y, [1.0], SolverConfig(cfg=cfg, evaluator="fractional", k_universal=1e-3)
        )
        np.testing.assert_allclose(fractional.x.values, riemann.x.values, atol=2e-2)
        np.testing.assert_allclose(
            fractional.xy_area.cell_area, riemann.xy_area.cell_area, atol=1e-4
        )

    @pytest.mark.unit
    @pytest.mark.fast
    def test_zero_driver(self, sc):
        """A constant driver leaves x at x₀ in one window"""
        y = _driver(lambda t: 0.0 * t, 32)
        sol = solve(sine_field(), y, [0.3], sc)
        np.testing.assert_array_equal(sol.x.values[:, 0], 0.3)
        assert len(sol.steps) == 1
        assert sol.threshold_used == 1.0

    @pytest.mark.unit
    @pytest.mark.fast
    def test_windows_cover_grid(self, sc):
        """Step records tile [0, N] in order"""
        y = _driver(lambda t: t, 64)
        sol = solve(sine_field(), y, [1.0], sc)
        records = sol.step_records()
        assert records[0]["lo"] == 0 and records[-1]["hi"] == 64
        assert all(a["hi"] == b["lo"] for a, b in zip(records, records[1:]))
        assert 0 < sol.diagnostics["a_priori_ratio"] < np.inf


class TestSolverFailures:
    """Errors raised by the solver"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_box_exit(self, sc):
        """x′ = x leaves [-1.5, 1.5] before t = 1"""
        y = _driver(lambda t: t, 64)
        with pytest.raises(BoxExitError):
            solve(linear_scalar(radius=1.5), y, [1.0], sc)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_start_outside_box(self, sc):
        y = _driver(lambda t: t, 16)
        with pytest.raises(BoxExitError):
            solve(linear_scalar(radius=1.0), y, [2.0], sc)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_no_contraction(self, cfg):
        """A single Picard pass cannot meet the tolerance"""
        y = _driver(lambda t: t, 16)
        with pytest.raises(SolverError) as exc_info:
            solve(sine_field(), y, [1.0], SolverConfig(cfg=cfg, max_picard=1))
        assert len(exc_info.value.diagnostics) == 1
        assert exc_info.value.diagnostics[0]["lo"] == 0

    @pytest.mark.unit
    @pytest.mark.fast
    def test_dimension_mismatch(self, sc):
        """The field's d must match the driver"""
        y = _driver(_planar, 16)
        with pytest.raises(DomainError):
            solve(sine_field(), y, [1.0], sc)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_initial_value_shape(self, sc):
        y = _driver(lambda t: t, 16)
        with pytest.raises(DomainError):
            solve(sine_field(), y, [1.0, 2.0], sc)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_cross_functional_rejected(self, sc):
        """The driver must carry its own area"""
        x = GridPath.from_function(lambda t: t**2, 16)
        y = GridPath.from_function(lambda t: t, 16)
        with pytest.raises(DomainError):
            solve(sine_field(), area_from_lipschitz(x, y, BETA), [1.0], sc)


class TestPicardStep:
    """One application of the Picard map"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_step_from_constant_iterate(self, cfg):
        """From a constant iterate with zero area the step is an Euler sum"""
        y = _driver(lambda t: t, 16)
        f = sine_field()
        x = y.y.with_values(np.ones((17, 1)))
        xy = area_from_lipschitz(x, y.y, BETA)
        new_x, new_xy = picard_step(x, xy, y, y, f, Window(4, 8), cfg)
        h = y.step
        np.testing.assert_allclose(new_x.values[4:9, 0], 1.0 + np.sin(1.0) * h * np.arange(5))
        np.testing.assert_array_equal(new_x.values[:4, 0], 1.0)
        np.testing.assert_allclose(new_xy.cell_area[4:8, 0, 0], np.sin(1.0) * h**2 / 2)
        np.testing.assert_array_equal(new_xy.cell_area[:4], 0.0)

    @pytest.mark.unit
    def test_fractional_level_two_on_exact_iterate(self, cfg):
        """On the exact sine flow the fractional J₂ carries the f′ (x⊗y⊗y) term"""
        n = 16
        y = _driver(lambda t: t, n)
        x = y.y.with_values(sine_flow(y.y.times)[:, None])
        xy = area_from_lipschitz(x, y.y, BETA)
        w = Window(0, n)
        h = y.step
        exact = np.array(
            [
                quad(lambda r, s=s: sine_flow(r) - sine_flow(s), s, s + h)[0]
                for s in y.y.times[:-1]
            ]
        )
        _, riemann = picard_step(x, xy, y, y, sine_field(), w, cfg)
        _, fractional = picard_step(x, xy, y, y, sine_field(), w, cfg, evaluator="fractional")
        riemann_err = np.abs(riemann.cell_area[:, 0, 0] - exact).max()
        fractional_err = np.abs(fractional.cell_area[:, 0, 0] - exact).max()
        assert fractional_err < 0.25 * riemann_err
        expected = np.sin(x.values[:-1, 0]) * h**2 / 2
        expected += np.cos(x.values[:-1, 0]) * x.increments()[:, 0] * h**2 / 6
        np.testing.assert_allclose(fractional.cell_area[:, 0, 0], expected, rtol=1e-10)


class TestStabilityAndOutput:
    """Stability report and solution artifacts"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_translated_initial_value(self, sc):
        """For f ≡ c the solutions differ by the initial gap"""
        y = _driver(lambda t: t, 32)
        f = constant_field(1.0)
        report = stability_gap(solve(f, y, [1.0], sc), solve(f, y, [1.1], sc), y, y)
        assert report.sup_gap == pytest.approx(0.1)
        assert report.x0_gap == pytest.approx(0.1)
        assert report.driver_gap == 0.0
        assert report.ratio == pytest.approx(1.0)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_perturbed_driver(self, sc):
        """A scaled driver moves the solution by the driver gap"""
        y = _driver(lambda t: t, 32)
        y_tilde = _driver(lambda t: 1.05 * t, 32)
        f = constant_field(1.0)
        report = stability_gap(solve(f, y, [1.0], sc), solve(f, y_tilde, [1.0], sc), y, y_tilde)
        assert report.sup_gap == pytest.approx(0.05)
        assert report.driver_gap == pytest.approx(0.05)
        assert report.cross_area_gap > 0
        assert 0 < report.ratio <= 1.0
        assert set(report.to_dict()) >= {"sup_gap", "input_gap", "ratio"}

    @pytest.mark.unit
    @pytest.mark.fast
    def test_write_solution(self, sc, output_dir):
        """Path, area and step files are written"""
        y = _driver(lambda t: t, 16)
        sol = solve(sine_field(), y, [1.0], sc)
        written = write_solution(sol, output_dir)
        assert set(written) == {"path", "area", "diagnostics"}
        assert all(p.exists() for p in written.values())
        lines = written["diagnostics"].read_text().strip().splitlines()
        assert len(lines) == len(sol.steps)
        assert json.loads(lines[0])["lo"] == 0

    @pytest.mark.unit
    @pytest.mark.fast
    def test_classical_partition(self):
        """The oracle rejects partitions that do not span the grid"""
        y = GridPath.from_function(lambda t: t, 16)
        with pytest.raises(DomainError):
            classical_solve(sine_field(), y, [1.0], [0, 8])

    @pytest.mark.unit
    @pytest.mark.fast
    def test_classical_coarse_partition(self):
        """On a single linear piece the oracle solves x′ = sin(x)"""
        y = GridPath.from_function(lambda t: t, 16)
        x = classical_solve(sine_field(), y, [1.0], [0, 16])
        np.testing.assert_allclose(x.values[:, 0], sine_flow(y.times), atol=1e-8)
