"""Tensor product of two multiplicative functionals sharing a middle path.

For scalar functionals (x, y, x⊗y) and (y, z, y⊗z) the product is

    (x ⊗ (y⊗z)_{·,c})_{a,b} = ∫_a^b (x_r - x_a)(z_c - z_r) dy_r,

the integral of F(x, z) = (x - x_a)(z_c - z) along the joint path (x, z)
against y. Its level-two data is (x⊗y, z⊗y) with z⊗y the transpose of y⊗z,
so the value comes out of the fractional integral with no further kernel.

``cell_triples`` gives the same level-three quantity one grid cell at a time,
for vector-valued functionals.
"""

from typing import Optional

import numpy as np

from src.core.exceptions import DomainError
from src.mult_func.functional import MultFunc, transpose_area
from src.path_core.grid import GridPath, Window


def _require_shared(mf_xy: MultFunc, mf_yz: MultFunc) -> None:
    if mf_xy.y.values.shape != mf_yz.x.values.shape or not np.allclose(
        mf_xy.y.values, mf_yz.x.values
    ):
        raise DomainError("the two functionals must share the middle path y")
    mf_xy.x.require_same_grid(mf_yz.y)


def joint_functional(mf_xy: MultFunc, mf_yz: MultFunc) -> MultFunc:
    """((x, z), y, (x⊗y, z⊗y)) from (x, y, x⊗y) and (y, z, y⊗z)."""
    _require_shared(mf_xy, mf_yz)
    mf_zy = transpose_area(mf_yz)
    x = GridPath(mf_xy.x.t0, mf_xy.x.T, np.hstack([mf_xy.x.values, mf_zy.x.values]))
    cells = np.concatenate([mf_xy.cell_area, mf_zy.cell_area], axis=1)
    return MultFunc.from_cell_areas(
        x, mf_xy.y, cells, min(mf_xy.beta, mf_yz.beta), {"construction": "joint"}
    )


def _triple_field(x_a: float, z_c: float, bound: float):
    from src.rde_solver.fields import FieldBounds, VectorField

    def func(p):
        return ((p[..., 0] - x_a) * (z_c - p[..., 1]))[..., None, None]

    def jac(p):
        out = np.empty(p.shape[:-1] + (1, 1, 2))
        out[..., 0, 0, 0] = z_c - p[..., 1]
        out[..., 0, 0, 1] = -(p[..., 0] - x_a)
        return out

    def hess(p):
        out = np.zeros(p.shape[:-1] + (1, 1, 2, 2))
        out[..., 0, 0, 0, 1] = out[..., 0, 0, 1, 0] = -1.0
        return out

    bounds = FieldBounds(
        sup_f=bound**2, sup_f1=bound, holder_f1_lambda=1.0, sup_f2=1.0, holder_f2_lambda=0.0
    )
    return VectorField(
        m=2, d=1, rows=1, func=func, jac=jac, hess=hess, bounds=bounds, name="triple"
    )


def tensor_triple(
    mf_xy: MultFunc,
    mf_yz: MultFunc,
    a: int,
    b: int,
    c: int,
    cfg=None,
) -> float:
    """(x ⊗ (y⊗z)_{·,c})_{a,b} for scalar functionals and grid indices a <= b <= c.

    The two-term fractional formula for this product pairs a compensated
    derivative of (x_r - x_a)(z_c - z_r) with D^{1-α}_{b-} y, and a kernel
    term built from Γ^{α-ε} of x⊗y and of z⊗y weighted by the two partial
    derivatives z_c - z_r and -(x_r - x_a). Those are exactly the two terms
    of ``rough_int`` for F(x, z) = (x - x_a)(z_c - z) on the joint functional,
    so either Λ method of ``cfg`` carries over unchanged.
    """
    from src.rough_integral.integral import rough_int

    if not 0 <= a <= b <= c <= mf_xy.n_points:
        raise DomainError(f"tensor_triple needs a <= b <= c on the grid, got ({a}, {b}, {c})")
    if mf_xy.m != 1 or mf_xy.d != 1 or mf_yz.d != 1:
        raise DomainError("tensor_triple is defined for scalar functionals")
    if a == b:
        return 0.0
    joint = joint_functional(mf_xy, mf_yz)
    x_a = float(mf_xy.x.values[a, 0])
    z_c = float(mf_yz.y.values[c, 0])
    scale = float(np.abs(joint.x.values).max() + abs(x_a) + abs(z_c))
    field = _triple_field(x_a, z_c, max(scale, 1.0))
    return float(rough_int(field, joint, Window(a, b), cfg)[0])


def triple_area(mf_xy: MultFunc, mf_yz: MultFunc, a: int, b: int, cfg=None) -> float:
    """(x ⊗ y ⊗ z)_{a,b} = ∫_a^b (x_r - x_a)(z_b - z_r) dy_r."""
    return tensor_triple(mf_xy, mf_yz, a, b, b, cfg)


def triple_area_riemann(mf_xy: MultFunc, mf_yz: MultFunc, a: int, b: int, c: Optional[int] = None) -> float:
    """Compensated-sum counterpart of ``tensor_triple`` used as a cross-check."""
    from src.rough_integral.sums import compensated_riemann_sum

    c = b if c is None else c
    if not 0 <= a < b <= c <= mf_xy.n_points:
        raise DomainError(f"need a < b <= c on the grid, got ({a}, {b}, {c})")
    joint = joint_functional(mf_xy, mf_yz)
    field = _triple_field(float(mf_xy.x.values[a, 0]), float(mf_yz.y.values[c, 0]), 1.0)
    return float(compensated_riemann_sum(field, joint, np.arange(a, b + 1))[0])


def cell_triples(mf_xy: MultFunc, mf_yz: MultFunc) -> np.ndarray:
    """(x ⊗ y ⊗ z) over every grid cell, shape (n, m, d, e).

    Inside a cell the functionals are taken as refined by ``MultFunc.resample``:
    straight increments with the area left over spread evenly. As the
    refinement grows, ``triple_area`` on the refined cell tends to

        Δx Δy Δz / 6 + ½ (A^{xy} Δz + Δx A^{yz}),    A = cell area - ½ Δ ⊗ Δ,

    which is what is returned.
    """
    _require_shared(mf_xy, mf_yz)
    dx = mf_xy.x.increments()
    dy = mf_xy.y.increments()
    dz = mf_yz.y.increments()
    a_xy = mf_xy.cell_area - 0.5 * np.einsum("ci,cj->cij", dx, dy)
    a_yz = mf_yz.cell_area - 0.5 * np.einsum("cj,cl->cjl", dy, dz)
    out = np.einsum("ci,cj,cl->cijl", dx, dy, dz) / 6.0
    out += 0.5 * np.einsum("cij,cl->cijl", a_xy, dz)
    out += 0.5 * np.einsum("ci,cjl->cijl", dx, a_yz)
    return out


def refined_cell_triple(
    mf_xy: MultFunc, mf_yz: MultFunc, k: int, refine: int, cfg=None
) -> float:
    """``triple_area`` of grid cell k after splitting it into ``refine`` sub-cells."""
    if not 0 <= k < mf_xy.n_points:
        raise DomainError(f"cell index {k} outside the grid of {mf_xy.n_points} cells")
    if refine < 2:
        raise DomainError(f"refine must be >= 2, got {refine}")
    w = Window(k, k + 1)
    fine_xy = mf_xy.restrict(w).resample(refine)
    fine_yz = mf_yz.restrict(w).resample(refine)
    return triple_area(fine_xy, fine_yz, 0, refine, cfg)
