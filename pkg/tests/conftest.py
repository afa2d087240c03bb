import numpy as np
import pytest

from src.core.config import Settings, get_settings
from src.mult_func.functional import area_from_lipschitz
from src.path_core.grid import GridPath
from src.rough_integral.config import IntegralConfig
from src.stochastic.brownian import BrownianConfig, sample_brownian
from tests.utils.reference_values import ALPHA, BETA, EPSILON


def get_settings_override():
    """Override settings for testing"""
    return Settings(MAX_WORKERS=2, HOLDER_EXHAUSTIVE_LIMIT=2048)


@pytest.fixture
def settings():
    """Settings fixture"""
    return get_settings_override()


@pytest.fixture
def cfg():
    """Default admissible integral configuration"""
    return IntegralConfig(beta=BETA, alpha=ALPHA, epsilon=EPSILON)


@pytest.fixture
def linear_path():
    """x_t = t on [0, 1] with 64 intervals"""
    return GridPath.from_function(lambda t: t, 64)


@pytest.fixture
def quadratic_path():
    """x_t = t² on [0, 1] with 64 intervals"""
    return GridPath.from_function(lambda t: t**2, 64)


@pytest.fixture
def linear_functional(linear_path):
    """(t, t, ½(t-s)²) on 64 intervals"""
    return area_from_lipschitz(linear_path, linear_path, BETA)


@pytest.fixture
def smooth_functional():
    """Two-dimensional smooth self-area functional on 128 intervals"""
    y = GridPath.from_function(
        lambda t: np.stack([np.sin(2 * np.pi * t), np.cos(2 * np.pi * t) * t]), 128
    )
    return area_from_lipschitz(y, y, BETA)


@pytest.fixture
def brownian_config():
    """Small two-dimensional Brownian driver"""
    return BrownianConfig(d=2, n_coarse=128, refine_factor=8, seed=7)


@pytest.fixture
def brownian_functional(brownian_config):
    """(B, B, B⊗B) for the small Brownian driver"""
    return sample_brownian(brownian_config, BETA)


@pytest.fixture
def output_dir(tmp_path):
    """Fresh output directory per test"""
    out = tmp_path / "results"
    out.mkdir()
    return out


@pytest.fixture(autouse=True)
def clear_settings_cache():
    """Settings are cached per process; reset around each test"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
