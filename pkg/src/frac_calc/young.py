import logging
from typing import Optional

import numpy as np
from scipy.special import gamma

from src.frac_calc.operators import (
    _check_finite,
    _order,
    weyl_left_values,
    weyl_right_values,
)
from src.frac_calc.quadrature import power_weights
from src.path_core.grid import GridPath, Window
from src.path_core.norms import holder_exponent_estimate

logger = logging.getLogger(__name__)


def right_remainder_derivative(values: np.ndarray, h: float, order: float) -> np.ndarray:
    """D^order_{b-} applied to g - g(b), with the vanishing limit at b filled in."""
    out = weyl_right_values(values - values[-1], h, order)
    out[-1] = 0.0
    return out


def left_weighted_integral(integrand: np.ndarray, h: float, alpha: float) -> float:
    """int_a^b (r-a)**(-alpha) P(r) dr for P linear between nodes."""
    n = integrand.shape[0] - 1
    return h ** (1.0 - alpha) * (power_weights(n, -alpha) @ integrand)


def _warn_if_inadmissible(f: GridPath, g: GridPath, alpha: float, w: Window) -> None:
    lam = holder_exponent_estimate(f, w)
    mu = holder_exponent_estimate(g, w)
    if lam + mu <= 1.0 or lam <= alpha or mu <= 1.0 - alpha:
        logger.warning(
            f"Young pairing may be inadmissible: estimated exponents "
            f"{lam:.3f} (f), {mu:.3f} (g) with alpha={alpha}"
        )


def young_integral(f: GridPath, g: GridPath, alpha, w: Optional[Window] = None) -> float:
    """int f dg = -int D^alpha_{a+}f(t) D^{1-alpha}_{b-}g_{b-}(t) dt.

    D^alpha_{a+}f carries the boundary singularity (t-a)**(-alpha); the
    remaining factor (t-a)**alpha D^alpha_{a+}f tends to f(a)/Gamma(1-alpha).
    """
    a = _order(alpha)
    f.require_same_grid(g)
    w = (w or f.full_window()).check(f.n_points)
    fv = f.window_values(w)[:, 0]
    gv = g.window_values(w)[:, 0]
    _check_finite(fv)
    _check_finite(gv)
    _warn_if_inadmissible(f, g, a, w)

    h = f.step
    n = w.length
    offsets = h * np.arange(n + 1)
    weighted = offsets**a * weyl_left_values(fv, h, a)
    weighted[0] = fv[0] / gamma(1.0 - a)
    dg = right_remainder_derivative(gv, h, 1.0 - a)
    return float(-left_weighted_integral(weighted * dg, h, a))
