"""Classical oracle: the ODE x′ = f(x) ẏ for a piecewise-linear driver."""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from src.core.exceptions import DomainError, NumericalError
from src.path_core.grid import GridPath
from src.rde_solver.fields import VectorField

logger = logging.getLogger(__name__)

ODE_RTOL = 1e-10
ODE_ATOL = 1e-12


def classical_solve(
    f: VectorField,
    y: GridPath,
    x0,
    partition: Optional[Sequence[int]] = None,
    rtol: float = ODE_RTOL,
    atol: float = ODE_ATOL,
) -> GridPath:
    """Solve on y's grid with y replaced by its interpolant through the partition nodes.

    The partition defaults to every grid node. Each linear piece is one
    DOP853 run with output at the grid nodes it covers.
    """
    n = y.n_points
    p = np.arange(n + 1) if partition is None else np.asarray(partition, dtype=int)
    if p[0] != 0 or p[-1] != n or np.any(np.diff(p) <= 0):
        raise DomainError("partition must run strictly increasing from 0 to the grid end")
    x0 = np.asarray(x0, dtype=float).reshape(f.m)
    if y.dim != f.d:
        raise DomainError(f"driver dimension {y.dim} does not match field '{f.name}' (d={f.d})")

    times = y.times
    out = np.empty((n + 1, f.m))
    out[0] = x0
    for a, b in zip(p[:-1], p[1:]):
        slope = (y.values[b] - y.values[a]) / (times[b] - times[a])
        if not np.any(slope):
            out[a + 1 : b + 1] = out[a]
            continue
        result = solve_ivp(
            lambda _, x: f.eval(x) @ slope,
            (times[a], times[b]),
            out[a],
            method="DOP853",
            t_eval=times[a : b + 1],
            rtol=rtol,
            atol=atol,
        )
        if not result.success:
            raise NumericalError(f"classical solve failed on [{times[a]:.6g}, {times[b]:.6g}]: {result.message}")
        out[a + 1 : b + 1] = result.y.T[1:]
    return y.with_values(out)
