"""Finite-difference Newton solver for the shallow-shell and plate systems.

Uniform rectangular grid, centered second differences for Hessians, the
13-point stencil for the squared Laplacian.  Ghost points are eliminated
through the boundary conditions:

    clamped:           u_{-1} = u_1 - 2 h g'         (g' = prescribed gradient)
    simply supported:  u_{-1} = -u_1 + 2 g_D + h^2 g_L

Both eliminations are affine in the interior values, which makes the
discrete problem an affine function of the unknowns plus the bilinear
bracket; the Newton linearization is assembled analytically from that
structure.

Residuals and iterates are kept in extended precision where the platform
provides it: stencil entries scale like 1/h^4, so double-precision
evaluation noise would otherwise sit near the solver tolerance on fine
grids.  Jacobians and the sparse LU stay in double precision.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .expr import Expr, ZERO, diff, evaluate
from .geometry import Domain2D, MaterialParams, ShellSpec

__all__ = [
    "REAL", "Grid", "FieldGrid", "BCData", "BoundaryConditions",
    "SolverOptions", "SolveReport", "SolverError", "SingularSystemError",
    "NonConvergenceError", "extend_field", "biharmonic", "bracket",
    "biharmonic_raw", "bracket_raw", "hessian_raw",
    "DiscreteSystem", "marguerre_system", "vonkarman_system", "newton_solve",
    "closed_values", "write_field_csv", "field_csv_text",
]

# Extended precision if the platform has real 80-bit floats; plain doubles
# otherwise (tolerances near 1e-10 may then be unreachable on fine grids).
REAL = np.longdouble if np.finfo(np.longdouble).eps < 1e-18 else np.float64


class SolverError(RuntimeError):
    pass


class SingularSystemError(SolverError):
    pass


class NonConvergenceError(SolverError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Grid:
    """n1 x n2 interior unknowns on a rectangle; spacing h = width / (n + 1)."""

    domain: Domain2D
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 9 or self.n2 < 9:
            raise ValueError("need at least 9 interior points per axis")

    @property
    def h1(self) -> float:
        return (self.domain.b1 - self.domain.a1) / (self.n1 + 1)

    @property
    def h2(self) -> float:
        return (self.domain.b2 - self.domain.a2) / (self.n2 + 1)

    @property
    def x1_closed(self) -> np.ndarray:
        return self.domain.a1 + self.h1 * np.arange(self.n1 + 2)

    @property
    def x2_closed(self) -> np.ndarray:
        return self.domain.a2 + self.h2 * np.arange(self.n2 + 2)

    @property
    def x1_interior(self) -> np.ndarray:
        return self.x1_closed[1:-1]

    @property
    def x2_interior(self) -> np.ndarray:
        return self.x2_closed[1:-1]

    def interior_meshgrid(self):
        return np.meshgrid(self.x1_interior, self.x2_interior, indexing="ij")

    def sample_interior(self, e: Expr) -> np.ndarray:
        X1, X2 = self.interior_meshgrid()
        return np.asarray(evaluate(e, X1, X2), dtype=float)


@dataclass
class FieldGrid:
    """Interior samples of a scalar field."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.n1, self.grid.n2):
            raise ValueError("field shape does not match the grid")
        if not np.all(np.isfinite(self.values.astype(float))):
            raise ValueError("field contains non-finite values")


@dataclass(frozen=True)
class BCData:
    """Boundary data for one unknown.

    `dirichlet` is the trace; clamped conditions prescribe the gradient
    (grad1, grad2), from which the outward normal derivative follows on
    each edge, and simply supported conditions prescribe the Laplacian.
    """

    kind: str
    dirichlet: Expr = ZERO
    grad1: Expr = ZERO
    grad2: Expr = ZERO
    laplacian: Expr = ZERO

    def __post_init__(self):
        if self.kind not in ("clamped", "simply_supported"):
            raise ValueError(f"unsupported boundary condition kind {self.kind!r}")

    @classmethod
    def homogeneous(cls, kind: str = "clamped") -> "BCData":
        return cls(kind=kind)

    @classmethod
    def from_field(cls, kind: str, u: Expr) -> "BCData":
        """Traces of a globally defined field u (used for exact data)."""
        from .geometry import laplacian_expr
        return cls(kind=kind, dirichlet=u, grad1=diff(u, 1), grad2=diff(u, 2),
                   laplacian=laplacian_expr(u))


@dataclass(frozen=True)
class BoundaryConditions:
    w: BCData
    phi: BCData


# ---------------------------------------------------------------------------
# Affine extension: interior values -> padded array with boundary + ghosts
# ---------------------------------------------------------------------------

class _Extender:
    """Caches the boundary frame and ghost offsets for one (grid, bc) pair."""

    def __init__(self, grid: Grid, bc: BCData):
        self.grid = grid
        self.kind = bc.kind
        self.sign = 1.0 if bc.kind == "clamped" else -1.0
        n1, n2 = grid.n1, grid.n2
        h1, h2 = grid.h1, grid.h2
        x1c, x2c = grid.x1_closed, grid.x2_closed
        x1i, x2i = grid.x1_interior, grid.x2_interior
        a1, b1 = grid.domain.a1, grid.domain.b1
        a2, b2 = grid.domain.a2, grid.domain.b2
        g = bc.dirichlet

        self.frame_left = np.asarray(evaluate(g, np.full(n2 + 2, a1), x2c), float)
        self.frame_right = np.asarray(evaluate(g, np.full(n2 + 2, b1), x2c), float)
        self.frame_bottom = np.asarray(evaluate(g, x1c, np.full(n1 + 2, a2)), float)
        self.frame_top = np.asarray(evaluate(g, x1c, np.full(n1 + 2, b2)), float)

        def dirich(x1, x2):
            return np.asarray(evaluate(g, x1, x2), float)

        if bc.kind == "clamped":
            g1, g2 = bc.grad1, bc.grad2
            self.off_left = -2 * h1 * np.asarray(evaluate(g1, np.full(n2, a1), x2i), float)
            self.off_right = 2 * h1 * np.asarray(evaluate(g1, np.full(n2, b1), x2i), float)
            self.off_bottom = -2 * h2 * np.asarray(evaluate(g2, x1i, np.full(n1, a2)), float)
            self.off_top = 2 * h2 * np.asarray(evaluate(g2, x1i, np.full(n1, b2)), float)
        else:
            gl = bc.laplacian
            self.off_left = (2 * dirich(np.full(n2, a1), x2i)
                             + h1 ** 2 * np.asarray(evaluate(gl, np.full(n2, a1), x2i), float))
            self.off_right = (2 * dirich(np.full(n2, b1), x2i)
                              + h1 ** 2 * np.asarray(evaluate(gl, np.full(n2, b1), x2i), float))
            self.off_bottom = (2 * dirich(x1i, np.full(n1, a2))
                               + h2 ** 2 * np.asarray(evaluate(gl, x1i, np.full(n1, a2)), float))
            self.off_top = (2 * dirich(x1i, np.full(n1, b2))
                            + h2 ** 2 * np.asarray(evaluate(gl, x1i, np.full(n1, b2)), float))

    def __call__(self, values: np.ndarray) -> np.ndarray:
        n1, n2 = self.grid.n1, self.grid.n2
        ext = np.zeros((n1 + 4, n2 + 4), dtype=REAL)
        ext[2:-2, 2:-2] = values
        ext[1, 1:-1] = self.frame_left
        ext[-2, 1:-1] = self.frame_right
        ext[1:-1, 1] = self.frame_bottom
        ext[1:-1, -2] = self.frame_top
        s = self.sign
        ext[0, 2:-2] = s * values[0, :] + self.off_left
        ext[-1, 2:-2] = s * values[-1, :] + self.off_right
        ext[2:-2, 0] = s * values[:, 0] + self.off_bottom
        ext[2:-2, -1] = s * values[:, -1] + self.off_top
        return ext


def extend_field(values: np.ndarray, grid: Grid, bc: BCData) -> np.ndarray:
    """Pad interior values with the boundary frame and eliminated ghosts."""
    return _Extender(grid, bc)(np.asarray(values, dtype=REAL))


# ---------------------------------------------------------------------------
# Stencils on extended arrays (any dtype), returning interior arrays
# ---------------------------------------------------------------------------

def _d11(ext, h1):
    return (ext[3:-1, 2:-2] - 2 * ext[2:-2, 2:-2] + ext[1:-3, 2:-2]) / h1 ** 2


def _d22(ext, h2):
    return (ext[2:-2, 3:-1] - 2 * ext[2:-2, 2:-2] + ext[2:-2, 1:-3]) / h2 ** 2


def _d12(ext, h1, h2):
    return (ext[3:-1, 3:-1] - ext[3:-1, 1:-3]
            - ext[1:-3, 3:-1] + ext[1:-3, 1:-3]) / (4 * h1 * h2)


def hessian_raw(ext, h1, h2):
    return _d11(ext, h1), _d22(ext, h2), _d12(ext, h1, h2)


def biharmonic_raw(ext, h1, h2):
    """13-point squared-Laplacian stencil applied to an extended array."""
    u1111 = (ext[4:, 2:-2] - 4 * ext[3:-1, 2:-2] + 6 * ext[2:-2, 2:-2]
             - 4 * ext[1:-3, 2:-2] + ext[:-4, 2:-2]) / h1 ** 4
    u2222 = (ext[2:-2, 4:] - 4 * ext[2:-2, 3:-1] + 6 * ext[2:-2, 2:-2]
             - 4 * ext[2:-2, 1:-3] + ext[2:-2, :-4]) / h2 ** 4
    t = ext[3:-1, :] - 2 * ext[2:-2, :] + ext[1:-3, :]
    u1122 = (t[:, 3:-1] - 2 * t[:, 2:-2] + t[:, 1:-3]) / (h1 ** 2 * h2 ** 2)
    return u1111 + 2 * u1122 + u2222


def bracket_raw(u_ext, v_ext, h1, h2):
    """[u, v] = u_,11 v_,22 + u_,22 v_,11 - 2 u_,12 v_,12 on extended arrays."""
    return (_d11(u_ext, h1) * _d22(v_ext, h2)
            + _d22(u_ext, h2) * _d11(v_ext, h1)
            - 2 * _d12(u_ext, h1, h2) * _d12(v_ext, h1, h2))


def biharmonic(u: FieldGrid, bc: BCData) -> FieldGrid:
    """Discrete squared Laplacian of a field, ghosts eliminated per bc."""
    ext = extend_field(u.values, u.grid, bc)
    out = biharmonic_raw(ext, u.grid.h1, u.grid.h2)
    return FieldGrid(np.asarray(out, dtype=float), u.grid)


def bracket(u: FieldGrid, v: FieldGrid, bc_u: BCData, bc_v: BCData) -> FieldGrid:
    """Discrete bracket of two fields on the same grid."""
    if u.grid != v.grid:
        raise ValueError("bracket operands must share a grid")
    ue = extend_field(u.values, u.grid, bc_u)
    ve = extend_field(v.values, v.grid, bc_v)
    out = bracket_raw(ue, ve, u.grid.h1, u.grid.h2)
    return FieldGrid(np.asarray(out, dtype=float), u.grid)


# ---------------------------------------------------------------------------
# Sparse operator matrices (double precision, for the Newton linearization)
# ---------------------------------------------------------------------------

def _restriction(n):
    return sp.csr_matrix((np.ones(n), (np.arange(n), np.arange(n) + 2)),
                         shape=(n, n + 4))


def _band(n, offsets, weights):
    rows, cols, vals = [], [], []
    for off, wgt in zip(offsets, weights):
        rows.extend(range(n))
        cols.extend(np.arange(n) + off)
        vals.extend([wgt] * n)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n + 4))


def _extension_linear(n, kind):
    sign = 1.0 if kind == "clamped" else -1.0
    rows = [0, n + 3] + list(range(2, n + 2))
    cols = [0, n - 1] + list(range(n))
    vals = [sign, sign] + [1.0] * n
    return sp.csr_matrix((vals, (rows, cols)), shape=(n + 4, n))


@dataclass(frozen=True)
class _OperatorMatrices:
    """Interior-to-interior operators composed with one bc elimination."""

    bih: sp.spmatrix
    m11: sp.spmatrix
    m22: sp.spmatrix
    m12: sp.spmatrix


def _operator_matrices(grid: Grid, kind: str) -> _OperatorMatrices:
    n1, n2, h1, h2 = grid.n1, grid.n2, grid.h1, grid.h2
    r1, r2 = _restriction(n1), _restriction(n2)
    d2_1 = _band(n1, (1, 2, 3), np.array([1.0, -2.0, 1.0]) / h1 ** 2)
    d2_2 = _band(n2, (1, 2, 3), np.array([1.0, -2.0, 1.0]) / h2 ** 2)
    d1_1 = _band(n1, (1, 3), np.array([-1.0, 1.0]) / (2 * h1))
    d1_2 = _band(n2, (1, 3), np.array([-1.0, 1.0]) / (2 * h2))
    d4_1 = _band(n1, (0, 1, 2, 3, 4), np.array([1.0, -4.0, 6.0, -4.0, 1.0]) / h1 ** 4)
    d4_2 = _band(n2, (0, 1, 2, 3, 4), np.array([1.0, -4.0, 6.0, -4.0, 1.0]) / h2 ** 4)
    L = sp.kron(_extension_linear(n1, kind), _extension_linear(n2, kind), format="csr")
    bih = (sp.kron(d4_1, r2) + 2 * sp.kron(d2_1, d2_2) + sp.kron(r1, d4_2)) @ L
    return _OperatorMatrices(bih=bih.tocsr(),
                             m11=(sp.kron(d2_1, r2) @ L).tocsr(),
                             m22=(sp.kron(r1, d2_2) @ L).tocsr(),
                             m12=(sp.kron(d1_1, d1_2) @ L).tocsr())


def _frozen_bracket_op(ext_frozen, grid: Grid, mats: _OperatorMatrices) -> sp.spmatrix:
    """Matrix of delta -> [frozen, delta] for a frozen extended field."""
    f11, f22, f12 = (np.asarray(h, dtype=float).ravel()
                     for h in hessian_raw(ext_frozen, grid.h1, grid.h2))
    return (sp.diags(f11) @ mats.m22 + sp.diags(f22) @ mats.m11
            - 2.0 * sp.diags(f12) @ mats.m12)


# ---------------------------------------------------------------------------
# Discrete systems
# ---------------------------------------------------------------------------

class DiscreteSystem:
    """Discretized coupled system in the unknowns (u, phi).

        r1 = D * biharm(u) - [u, phi] - [base, phi] - load * rhs1
        r2 = (1/(E h)) * biharm(phi) + [u, u]/2 + [base, u] - rhs2

    The shell form uses base = f, rhs1 = p, rhs2 = 0; the plate form uses
    base = 0, rhs1 = P, rhs2 = K.
    """

    def __init__(self, grid: Grid, mat: MaterialParams,
                 bc: BoundaryConditions, base_ext: np.ndarray | None,
                 rhs1: np.ndarray, rhs2: np.ndarray, label: str):
        self.grid = grid
        self.mat = mat
        self.bc = bc
        self.label = label
        self.extend_u = _Extender(grid, bc.w)
        self.extend_phi = _Extender(grid, bc.phi)
        if base_ext is None:
            base_ext = np.zeros((grid.n1 + 4, grid.n2 + 4), dtype=REAL)
        self.base_ext = np.asarray(base_ext, dtype=REAL)
        self.rhs1 = np.asarray(rhs1, dtype=REAL)
        self.rhs2 = np.asarray(rhs2, dtype=REAL)
        self.mats_u = _operator_matrices(grid, bc.w.kind)
        self.mats_phi = _operator_matrices(grid, bc.phi.kind)

    @property
    def shape(self):
        return (self.grid.n1, self.grid.n2)

    def zero_fields(self):
        return (np.zeros(self.shape, dtype=REAL), np.zeros(self.shape, dtype=REAL))

    def residual(self, u, phi, load: float = 1.0):
        g = self.grid
        ue = self.extend_u(u)
        pe = self.extend_phi(phi)
        r1 = (self.mat.D * biharmonic_raw(ue, g.h1, g.h2)
              - bracket_raw(ue, pe, g.h1, g.h2)
              - bracket_raw(self.base_ext, pe, g.h1, g.h2)
              - REAL(load) * self.rhs1)
        r2 = (biharmonic_raw(pe, g.h1, g.h2) / self.mat.Eh
              + 0.5 * bracket_raw(ue, ue, g.h1, g.h2)
              + bracket_raw(self.base_ext, ue, g.h1, g.h2)
              - self.rhs2)
        return r1, r2

    def data_scale(self, load: float = 1.0) -> float:
        s1 = float(np.max(np.abs(self.rhs1))) if self.rhs1.size else 0.0
        s2 = float(np.max(np.abs(self.rhs2))) if self.rhs2.size else 0.0
        return max(abs(load) * s1, s2)

    def jacobian(self, u, phi) -> sp.spmatrix:
        g = self.grid
        ue = self.extend_u(u)
        pe = self.extend_phi(phi)
        total = ue + self.base_ext
        j11 = self.mat.D * self.mats_u.bih - _frozen_bracket_op(pe, g, self.mats_u)
        j12 = -_frozen_bracket_op(total, g, self.mats_phi)
        j21 = _frozen_bracket_op(total, g, self.mats_u)
        j22 = self.mats_phi.bih / self.mat.Eh
        return sp.bmat([[j11, j12], [j21, j22]], format="csc")


def marguerre_system(spec: ShellSpec, mat: MaterialParams, grid: Grid,
                     bc: BoundaryConditions) -> DiscreteSystem:
    """Discrete shallow-shell system; curvature data sampled from f with the
    same extension stencil that acts on the unknown deflection."""
    f_ext = _Extender(grid, BCData.from_field(bc.w.kind, spec.f))(
        np.asarray(grid.sample_interior(spec.f), dtype=REAL))
    p_int = grid.sample_interior(spec.p)
    rhs2 = np.zeros_like(p_int)
    return DiscreteSystem(grid, mat, bc, f_ext, p_int, rhs2, label="marguerre")


def vonkarman_system(spec: ShellSpec, mat: MaterialParams, grid: Grid,
                     bc: BoundaryConditions, data: str = "matched") -> DiscreteSystem:
    """Discrete plate system with right-hand sides (P, K).

    data="matched": P and K are produced by the same discrete stencils from
    sampled f, which makes the change of variables wt = w + f an exact
    identity between the two discrete systems.  data="symbolic": P and K
    are sampled from their closed forms (for convergence studies).
    """
    if data == "matched":
        f_ext = _Extender(grid, BCData.from_field(bc.w.kind, spec.f))(
            np.asarray(grid.sample_interior(spec.f), dtype=REAL))
        p_int = np.asarray(grid.sample_interior(spec.p), dtype=REAL)
        rhs1 = mat.D * biharmonic_raw(f_ext, grid.h1, grid.h2) + p_int
        rhs2 = 0.5 * bracket_raw(f_ext, f_ext, grid.h1, grid.h2)
    elif data == "symbolic":
        from .geometry import gauss_curvature, reduced_load
        rhs1 = grid.sample_interior(reduced_load(spec, mat))
        rhs2 = grid.sample_interior(gauss_curvature(spec))
    else:
        raise ValueError(f"unknown data mode {data!r}")
    return DiscreteSystem(grid, mat, bc, None, rhs1, rhs2, label="vonkarman")


# ---------------------------------------------------------------------------
# Newton iteration with load continuation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolverOptions:
    tol_abs: float = 1e-10
    tol_rel: float = 1e-10
    max_iter: int = 30
    max_load_steps: int = 16


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    residual_norm_history: list = field(default_factory=list)
    final_residual_inf: float = np.inf
    load_steps_used: int = 1


def _residual_inf(r1, r2) -> float:
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


def _newton_at_load(system: DiscreteSystem, u, phi, load: float,
                    options: SolverOptions):
    tol = options.tol_abs + options.tol_rel * system.data_scale(load)
    r1, r2 = system.residual(u, phi, load)
    rinf = _residual_inf(r1, r2)
    history = [rinf]
    iterations = 0
    n = system.grid.n1 * system.grid.n2
    while rinf > tol and iterations < options.max_iter:
        J = system.jacobian(u, phi)
        rhs = -np.concatenate([np.asarray(r1, float).ravel(),
                               np.asarray(r2, float).ravel()])
        try:
            delta = splu(J).solve(rhs)
        except RuntimeError as err:
            raise SingularSystemError(f"singular linear system: {err}") from err
        if not np.all(np.isfinite(delta)):
            raise SingularSystemError("linear solve produced non-finite update")
        du = delta[:n].reshape(system.shape)
        dphi = delta[n:].reshape(system.shape)
        # Backtracking: accept the longest step that does not increase the
        # residual; a step that lands below tolerance is always accepted.
        alpha = 1.0
        accepted = False
        while alpha >= 2.0 ** -10:
            u_try = u + REAL(alpha) * du
            phi_try = phi + REAL(alpha) * dphi
            r1t, r2t = system.residual(u_try, phi_try, load)
            rt = _residual_inf(r1t, r2t)
            if rt <= tol or rt <= rinf * (1.0 - 1e-4 * alpha):
                u, phi, r1, r2, rinf = u_try, phi_try, r1t, r2t, rt
                accepted = True
                break
            alpha *= 0.5
        iterations += 1
        if not accepted:
            break
        history.append(rinf)
    return u, phi, history, iterations, rinf <= tol, rinf


def newton_solve(system: DiscreteSystem, init=None,
                 options: SolverOptions = SolverOptions()):
    """Solve the discrete system; load continuation kicks in only if the
    full-load iteration stalls.  Returns (u, phi, report)."""
    if init is None:
        u0, phi0 = system.zero_fields()
    else:
        u0 = np.asarray(init[0].values if isinstance(init[0], FieldGrid) else init[0],
                        dtype=REAL)
        phi0 = np.asarray(init[1].values if isinstance(init[1], FieldGrid) else init[1],
                          dtype=REAL)

    schedules = [m for m in (1, 2, 4, 8, 16) if m <= max(1, options.max_load_steps)]
    best = None
    for steps in schedules:
        u, phi = u0.copy(), phi0.copy()
        ok = True
        history, iterations, rinf = [], 0, np.inf
        for k in range(1, steps + 1):
            load = 2.0 ** (k - steps)
            u, phi, history, iterations, ok, rinf = _newton_at_load(
                system, u, phi, load, options)
            if not ok:
                break
        best = (u, phi, history, iterations, rinf, steps)
        if ok:
            report = SolveReport(converged=True, iterations=iterations,
                                 residual_norm_history=history,
                                 final_residual_inf=rinf,
                                 load_steps_used=steps)
            return (FieldGrid(np.asarray(u, float), system.grid),
                    FieldGrid(np.asarray(phi, float), system.grid),
                    report)

    u, phi, history, iterations, rinf, steps = best
    report = SolveReport(converged=False, iterations=iterations,
                         residual_norm_history=history,
                         final_residual_inf=rinf, load_steps_used=steps)
    return (FieldGrid(np.asarray(u, float), system.grid),
            FieldGrid(np.asarray(phi, float), system.grid),
            report)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def closed_values(u: FieldGrid, bc: BCData) -> np.ndarray:
    """Field on the closed grid, boundary filled from the Dirichlet trace."""
    g = u.grid
    out = np.empty((g.n1 + 2, g.n2 + 2))
    out[1:-1, 1:-1] = np.asarray(u.values, float)
    x1c, x2c = g.x1_closed, g.x2_closed
    out[0, :] = evaluate(bc.dirichlet, np.full(g.n2 + 2, x1c[0]), x2c)
    out[-1, :] = evaluate(bc.dirichlet, np.full(g.n2 + 2, x1c[-1]), x2c)
    out[:, 0] = evaluate(bc.dirichlet, x1c, np.full(g.n1 + 2, x2c[0]))
    out[:, -1] = evaluate(bc.dirichlet, x1c, np.full(g.n1 + 2, x2c[-1]))
    return out


def field_csv_text(u: FieldGrid, bc: BCData) -> str:
    """CSV dump 'x1,x2,value', row-major over the closed grid, 17 significant digits."""
    g = u.grid
    vals = closed_values(u, bc)
    buf = io.StringIO()
    buf.write("x1,x2,value\n")
    x1c, x2c = g.x1_closed, g.x2_closed
    for i in range(g.n1 + 2):
        for j in range(g.n2 + 2):
            buf.write(f"{x1c[i]:.17g},{x2c[j]:.17g},{vals[i, j]:.17g}\n")
    return buf.getvalue()


def write_field_csv(path, u: FieldGrid, bc: BCData) -> None:
    with open(path, "w") as fh:
        fh.write(field_csv_text(u, bc))
