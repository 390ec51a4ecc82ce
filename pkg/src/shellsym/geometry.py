"""Shallow-shell geometry: curvature tensor, invariants, reduced load.

The midsurface is the graph x3 = f(x1, x2) over a rectangle; within the
shallow approximation the metric is the identity, so the curvature tensor
is the Hessian of f, the mean curvature H is half its trace, the Gaussian
curvature K its determinant, and the reduced load combines the biharmonic
of f with the transverse load:  P = 2*D*laplace(H) + p = D*biharm(f) + p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Expr, diff, evaluate, make_negate, make_product, make_sum, Constant

__all__ = [
    "Domain2D", "ShellSpec", "MaterialParams", "GeometryFields",
    "curvature_tensor", "mean_curvature", "gauss_curvature", "reduced_load",
    "laplacian_expr", "geometry_fields", "shallowness_check",
]

SHALLOWNESS_GRID = 201  # dense sample per axis for the slope bound


@dataclass(frozen=True)
class Domain2D:
    """Rectangle [a1, b1] x [a2, b2]."""

    a1: float
    b1: float
    a2: float
    b2: float

    def __post_init__(self):
        if not (self.b1 > self.a1 and self.b2 > self.a2):
            raise ValueError("domain must satisfy b1 > a1 and b2 > a2")

    @property
    def widths(self) -> tuple[float, float]:
        return (self.b1 - self.a1, self.b2 - self.a2)

    def grid(self, n: int):
        """n x n uniform sample including the boundary, as meshgrid arrays."""
        x1 = np.linspace(self.a1, self.b1, n)
        x2 = np.linspace(self.a2, self.b2, n)
        return np.meshgrid(x1, x2, indexing="ij")


@dataclass(frozen=True)
class ShellSpec:
    """Problem input: midsurface height f, transverse load p, domain, shallowness bound."""

    f: Expr
    p: Expr
    domain: Domain2D
    epsilon: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")


@dataclass(frozen=True)
class MaterialParams:
    """Bending rigidity D, Young's modulus E, thickness h (all positive)."""

    D: float = 1.0
    E: float = 1.0
    h: float = 1.0

    def __post_init__(self):
        if min(self.D, self.E, self.h) <= 0.0:
            raise ValueError("material constants must be strictly positive")

    @property
    def Eh(self) -> float:
        return self.E * self.h


def curvature_tensor(spec: ShellSpec) -> tuple[Expr, Expr, Expr]:
    """Curvature tensor of the shallow midsurface: (f_,11, f_,12, f_,22)."""
    f = spec.f
    return diff(diff(f, 1), 1), diff(diff(f, 1), 2), diff(diff(f, 2), 2)


def mean_curvature(spec: ShellSpec) -> Expr:
    """H = (f_,11 + f_,22) / 2."""
    b11, _, b22 = curvature_tensor(spec)
    return make_product((Constant(0.5), make_sum((b11, b22))))


def gauss_curvature(spec: ShellSpec) -> Expr:
    """K = f_,11 * f_,22 - f_,12^2 (determinant of the Hessian)."""
    b11, b12, b22 = curvature_tensor(spec)
    return make_sum((make_product((b11, b22)),
                     make_negate(make_product((b12, b12)))))


def laplacian_expr(e: Expr) -> Expr:
    return make_sum((diff(diff(e, 1), 1), diff(diff(e, 2), 2)))


def reduced_load(spec: ShellSpec, mat: MaterialParams) -> Expr:
    """P = 2*D*laplace(H) + p, the load carried over to the plate form."""
    H = mean_curvature(spec)
    return make_sum((make_product((Constant(2.0 * mat.D), laplacian_expr(H))),
                     spec.p))


@dataclass(frozen=True)
class GeometryFields:
    """Symbolic curvature data for one shell problem."""

    b11: Expr
    b12: Expr
    b22: Expr
    H: Expr
    K: Expr
    P: Expr
    domain: Domain2D

    def sample(self, n: int) -> dict[str, np.ndarray]:
        """Sample every field on an n x n grid including the boundary."""
        X1, X2 = self.domain.grid(n)
        names = ("b11", "b12", "b22", "H", "K", "P")
        return {name: evaluate(getattr(self, name), X1, X2) for name in names}


def geometry_fields(spec: ShellSpec, mat: MaterialParams) -> GeometryFields:
    b11, b12, b22 = curvature_tensor(spec)
    return GeometryFields(b11=b11, b12=b12, b22=b22,
                          H=mean_curvature(spec),
                          K=gauss_curvature(spec),
                          P=reduced_load(spec, mat),
                          domain=spec.domain)


def shallowness_check(spec: ShellSpec) -> tuple[float, bool]:
    """Largest slope product max(|f_,1|, |f_,2|)^2 over a dense grid.

    Returns (max_slope_product, ok) with ok True iff the product stays
    below epsilon^2.  This is a report, never an abort: the equations are
    well defined for non-shallow input, the approximation just degrades.
    """
    X1, X2 = spec.domain.grid(SHALLOWNESS_GRID)
    s1 = np.max(np.abs(evaluate(diff(spec.f, 1), X1, X2)))
    s2 = np.max(np.abs(evaluate(diff(spec.f, 2), X1, X2)))
    product = float(max(s1, s2) ** 2)
    return product, product <= spec.epsilon ** 2
