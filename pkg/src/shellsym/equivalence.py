"""Change of variables carrying the shallow-shell system to plate form.

Shifting the deflection by the midsurface height, wt = w + f, turns the
Marguerre equilibrium system into nonhomogeneous von Karman equations
whose right-hand sides are the reduced load P (first equation) and the
Gaussian curvature K (second equation).  This holds as an algebraic
identity of the residuals, for solutions and non-solutions alike.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np

from .expr import (
    Constant, Expr, diff, make_negate, make_product, make_sum,
)
from .geometry import (
    MaterialParams, ShellSpec, gauss_curvature, laplacian_expr, reduced_load,
)
from .solver import BCData, BoundaryConditions

__all__ = [
    "VonKarmanForm", "AnisotropicParams", "to_vonkarman",
    "transform_boundary_data", "anisotropic_rhs",
    "bracket_expr", "marguerre_residual_exprs", "vonkarman_residual_exprs",
]


@dataclass(frozen=True)
class VonKarmanForm:
    """Right-hand sides of the transformed plate system plus the shift wt = w + shift."""

    P: Expr
    K: Expr
    shift: Expr


def to_vonkarman(spec: ShellSpec, mat: MaterialParams) -> VonKarmanForm:
    """Plate form of a shell problem: (P, K, f) with wt = w + f."""
    return VonKarmanForm(P=reduced_load(spec, mat),
                         K=gauss_curvature(spec),
                         shift=spec.f)


def transform_boundary_data(bc: BoundaryConditions, spec: ShellSpec) -> BoundaryConditions:
    """Boundary data for the shifted unknown wt = w + f.

    Dirichlet data gains the trace of f, the gradient data gains grad(f)
    (clamped) or the Laplacian data gains laplace(f) (simply supported).
    Stress-function data is unchanged.
    """
    w = bc.w
    f = spec.f
    dirichlet = make_sum((w.dirichlet, f))
    if w.kind == "clamped":
        shifted = BCData(kind="clamped",
                         dirichlet=dirichlet,
                         grad1=make_sum((w.grad1, diff(f, 1))),
                         grad2=make_sum((w.grad2, diff(f, 2))))
    elif w.kind == "simply_supported":
        shifted = BCData(kind="simply_supported",
                         dirichlet=dirichlet,
                         laplacian=make_sum((w.laplacian, laplacian_expr(f))))
    else:
        raise ValueError(f"unsupported boundary condition kind {w.kind!r}")
    return BoundaryConditions(w=shifted, phi=bc.phi)


# ---------------------------------------------------------------------------
# Anisotropic right-hand side
# ---------------------------------------------------------------------------

_PAIRS = tuple(iproduct((0, 1), repeat=4))


@dataclass(frozen=True)
class AnisotropicParams:
    """Fourth-order bending/membrane stiffness tensors (2x2x2x2 each).

    Both tensors must be symmetric under swapping the first pair, the
    second pair, and the two pairs (6 independent components).
    """

    Dtensor: np.ndarray
    Etensor: np.ndarray

    def __post_init__(self):
        for name in ("Dtensor", "Etensor"):
            t = np.asarray(getattr(self, name), dtype=float)
            if t.shape != (2, 2, 2, 2):
                raise ValueError(f"{name} must have shape (2, 2, 2, 2)")
            object.__setattr__(self, name, t)
            scale = max(1.0, float(np.max(np.abs(t))))
            bad = max(float(np.max(np.abs(t - t.transpose(1, 0, 2, 3)))),
                      float(np.max(np.abs(t - t.transpose(0, 1, 3, 2)))),
                      float(np.max(np.abs(t - t.transpose(2, 3, 0, 1)))))
            if bad > 1e-12 * scale:
                raise ValueError(f"{name} violates the required index symmetries")

    @classmethod
    def isotropic(cls, D: float, Eh_inv: float) -> "AnisotropicParams":
        """Isotropic specialization D^abmn = D*delta^ab*delta^mn (and the
        membrane analogue scaled by 1/(E*h))."""
        delta = np.eye(2)
        base = np.einsum("ab,mn->abmn", delta, delta)
        return cls(Dtensor=D * base, Etensor=Eh_inv * base)


def anisotropic_rhs(aniso: AnisotropicParams, spec: ShellSpec) -> tuple[Expr, Expr]:
    """Right-hand sides of the anisotropic plate form.

    First equation: sum_abmn D^abmn f_,abmn + p; second equation: the
    Gaussian curvature, exactly as in the isotropic case.
    """
    terms = []
    for a, b, m, n in _PAIRS:
        c = float(aniso.Dtensor[a, b, m, n])
        if c == 0.0:
            continue
        d4 = spec.f
        for idx in (a, b, m, n):
            d4 = diff(d4, idx + 1)
        terms.append(make_product((Constant(c), d4)))
    terms.append(spec.p)
    return make_sum(terms), gauss_curvature(spec)


# ---------------------------------------------------------------------------
# Continuous residual builders (symbolic trial fields)
# ---------------------------------------------------------------------------

def bracket_expr(u: Expr, v: Expr) -> Expr:
    """Symbolic Monge-Ampere bracket [u, v] = u_,11 v_,22 + u_,22 v_,11 - 2 u_,12 v_,12."""
    u11, u12, u22 = diff(diff(u, 1), 1), diff(diff(u, 1), 2), diff(diff(u, 2), 2)
    v11, v12, v22 = diff(diff(v, 1), 1), diff(diff(v, 1), 2), diff(diff(v, 2), 2)
    return make_sum((make_product((u11, v22)),
                     make_product((u22, v11)),
                     make_negate(make_product((Constant(2.0), u12, v12)))))


def _biharmonic_expr(u: Expr) -> Expr:
    return laplacian_expr(laplacian_expr(u))


def marguerre_residual_exprs(w: Expr, phi: Expr, spec: ShellSpec,
                             mat: MaterialParams) -> tuple[Expr, Expr]:
    """Continuous residuals of the shallow-shell system for trial fields (w, phi)."""
    f = spec.f
    r1 = make_sum((make_product((Constant(mat.D), _biharmonic_expr(w))),
                   make_negate(bracket_expr(w, phi)),
                   make_negate(bracket_expr(f, phi)),
                   make_negate(spec.p)))
    r2 = make_sum((make_product((Constant(1.0 / mat.Eh), _biharmonic_expr(phi))),
                   make_product((Constant(0.5), bracket_expr(w, w))),
                   bracket_expr(f, w)))
    return r1, r2


def vonkarman_residual_exprs(wt: Expr, phi: Expr, form: VonKarmanForm,
                             mat: MaterialParams) -> tuple[Expr, Expr]:
    """Continuous residuals of the transformed plate system for trial fields (wt, phi)."""
    r1 = make_sum((make_product((Constant(mat.D), _biharmonic_expr(wt))),
                   make_negate(bracket_expr(wt, phi)),
                   make_negate(form.P)))
    r2 = make_sum((make_product((Constant(1.0 / mat.Eh), _biharmonic_expr(phi))),
                   make_product((Constant(0.5), bracket_expr(wt, wt))),
                   make_negate(form.K)))
    return r1, r2
