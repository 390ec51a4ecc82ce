"""End-to-end verification campaigns.

Three independent witnesses tie the package together:

* equivalence -- solve the shell problem and its transformed plate form on
  the same grid with matched-stencil data; the solutions must agree to
  solver tolerance after the shift wt = w + f.
* reduction -- the full determining system and the reduced invariance
  conditions on (P, K) must vanish together, for random generators,
  surfaces and points.
* orbit -- a one-parameter group generated by an admitted vector field
  maps a computed solution to another solution; the transported field's
  residual must stay at the interpolation-noise floor, while a
  non-admitted generator drives it orders of magnitude above.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.linalg import expm

from .equivalence import (
    VonKarmanForm, to_vonkarman, transform_boundary_data,
    bracket_expr,
)
from .expr import Constant, ZERO, evaluate, make_negate, make_product, make_sum, parse
from .geometry import (
    Domain2D, MaterialParams, ShellSpec, geometry_fields, laplacian_expr,
)
from .solver import (
    BCData, BoundaryConditions, DiscreteSystem, FieldGrid, Grid,
    NonConvergenceError, SolverOptions, biharmonic_raw, bracket_raw,
    closed_values, marguerre_system, newton_solve, vonkarman_system,
)
from .symmetry import Generator, check_full_DE, invariance_residuals

__all__ = [
    "VerificationReport", "EquivalenceReport", "ReductionReport",
    "OrbitConfig", "OrbitReport", "ManufacturedStudy",
    "verify_equivalence", "verify_reduction", "orbit_residual",
    "manufactured_case", "manufactured_study",
]


@dataclass
class VerificationReport:
    """Aggregated campaign result; fields are None for checks not run."""

    case_id: str
    max_equivalence_gap_w: float | None = None
    max_equivalence_gap_phi: float | None = None
    orbit_residual_ratio: float | None = None
    reduction_residual_max: float | None = None
    passes: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(self.passes.values())


# ---------------------------------------------------------------------------
# Equivalence of the two discrete solves
# ---------------------------------------------------------------------------

@dataclass
class EquivalenceReport:
    gap_w: float
    gap_phi: float
    iterations_shell: int
    iterations_plate: int
    passed: bool


def verify_equivalence(spec: ShellSpec, mat: MaterialParams, grid: Grid,
                       bc: BoundaryConditions,
                       options: SolverOptions = SolverOptions(),
                       gap_tol: float = 1e-9) -> EquivalenceReport:
    """Solve both formulations independently and compare the solutions."""
    sys_shell = marguerre_system(spec, mat, grid, bc)
    bc_plate = transform_boundary_data(bc, spec)
    sys_plate = vonkarman_system(spec, mat, grid, bc_plate, data="matched")
    w, phi, rep_shell = newton_solve(sys_shell, options=options)
    wt, phi_p, rep_plate = newton_solve(sys_plate, options=options)
    if not rep_shell.converged:
        raise NonConvergenceError("shell solve did not converge", rep_shell)
    if not rep_plate.converged:
        raise NonConvergenceError("plate solve did not converge", rep_plate)
    f_int = np.asarray(sys_shell.base_ext[2:-2, 2:-2], float)
    gap_w = float(np.max(np.abs(w.values + f_int - wt.values)))
    gap_phi = float(np.max(np.abs(phi.values - phi_p.values)))
    return EquivalenceReport(gap_w=gap_w, gap_phi=gap_phi,
                             iterations_shell=rep_shell.iterations,
                             iterations_plate=rep_plate.iterations,
                             passed=(gap_w <= gap_tol and gap_phi <= gap_tol))


# ---------------------------------------------------------------------------
# Reduction: full determining system vs (P, K) conditions
# ---------------------------------------------------------------------------

@dataclass
class ReductionReport:
    tensor_condition_max: float        # drag-form residual of the 2nd-order condition
    vanish_residual_max: float         # full residuals where the reduced ones vanish
    contrapositive_violations: int     # reduced large but full small
    n_checked: int
    passed: bool


def verify_reduction(spec: ShellSpec, mat: MaterialParams, n_random: int = 60,
                     seed: int = 42,
                     vanish_tol: float = 1e-10,
                     full_tol: float = 1e-8) -> ReductionReport:
    """Cross-check the determining system against the reduced conditions."""
    rng = np.random.default_rng(seed)
    fields = geometry_fields(spec, mat)
    dom = spec.domain
    w1, w2 = dom.widths
    tensor_max = 0.0
    vanish_max = 0.0
    violations = 0
    for i in range(n_random):
        vals = rng.uniform(-1, 1, size=10)
        if i % 4 == 0:
            vals[:4] = 0.0           # kernel draw: always admitted
        gen = Generator(**dict(zip(
            ("C1", "C2", "C3", "C4", "A1", "A2", "A3", "B1", "B2", "B3"),
            map(float, vals))))
        x = (float(rng.uniform(dom.a1 + 0.05 * w1, dom.b1 - 0.05 * w1)),
             float(rng.uniform(dom.a2 + 0.05 * w2, dom.b2 - 0.05 * w2)))
        r11, r12, r22, r_compat, r_load = check_full_DE(gen, spec, mat, x)
        rP, rK = invariance_residuals(gen, fields.P, fields.K, x)
        tensor_max = max(tensor_max, abs(r11), abs(r12), abs(r22))
        if max(abs(rP), abs(rK)) < vanish_tol:
            vanish_max = max(vanish_max, abs(r_compat), abs(r_load))
        if abs(rP) > 1e-6 and abs(r_load) <= full_tol:
            violations += 1
        if abs(rK) > 1e-6 and abs(r_compat) <= full_tol:
            violations += 1
    passed = (tensor_max < 1e-9 and vanish_max < full_tol and violations == 0)
    return ReductionReport(tensor_condition_max=tensor_max,
                           vanish_residual_max=vanish_max,
                           contrapositive_violations=violations,
                           n_checked=n_random, passed=passed)


# ---------------------------------------------------------------------------
# Orbit test: transport a solution along a one-parameter group
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitConfig:
    t: float = 0.3
    coarsen: int = 4          # subgrid spacing = coarsen * solution spacing
    margin_frac: float = 0.12  # interior window kept away from the boundary
    shift_frac: float = 0.5   # noise-floor probe offset, in subgrid spacings
    ratio_tol: float = 10.0


@dataclass
class OrbitReport:
    ratio: float
    transformed_residual: float
    floor_residual: float
    t: float
    subgrid_points: int
    passed: bool


class OrbitDomainError(ValueError):
    """The transported evaluation stencil left the computational domain."""


def _flow_matrix(gen: Generator) -> np.ndarray:
    """Generator of the augmented linear flow on (x1, x2, 1, alpha, beta)."""
    return np.array([
        [gen.C1, gen.C2, gen.C3, 0.0, 0.0],
        [-gen.C2, gen.C1, gen.C4, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0],
        [gen.A1, gen.A2, gen.A3, 0.0, 0.0],
        [gen.B1, gen.B2, gen.B3, 0.0, 0.0],
    ])


def _vk_residual_on_lattice(wt_vals, phi_vals, hs1, hs2, P_int, K_int,
                            mat: MaterialParams):
    r1 = (mat.D * biharmonic_raw(wt_vals, hs1, hs2)
          - bracket_raw(wt_vals, phi_vals, hs1, hs2) - P_int)
    r2 = (biharmonic_raw(phi_vals, hs1, hs2) / mat.Eh
          + 0.5 * bracket_raw(wt_vals, wt_vals, hs1, hs2) - K_int)
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


def orbit_residual(w: FieldGrid, phi: FieldGrid, gen: Generator,
                   spec: ShellSpec, mat: MaterialParams,
                   bc: BoundaryConditions,
                   config: OrbitConfig = OrbitConfig()) -> OrbitReport:
    """Residual ratio of the group-transported solution.

    The shifted deflection wt = w + f transports as a scalar (plus the
    affine part integrated exactly along the flow), so the check runs on
    the plate form.  Fields are resampled by bicubic interpolation on a
    coarsened node-aligned subgrid; the reported ratio is

        max(transported residual, floor) / floor,

    where the floor is the residual of the untransported fields resampled
    half a subgrid cell away from the nodes -- the interpolation noise a
    perfect symmetry would still exhibit.  Admitted generators stay within
    a small multiple of 1; non-admitted ones exceed it by orders.
    """
    grid = w.grid
    dom = spec.domain
    form = to_vonkarman(spec, mat)
    bc_plate = transform_boundary_data(bc, spec)
    f_int = grid.sample_interior(spec.f)
    wt_closed = closed_values(FieldGrid(np.asarray(w.values, float) + f_int, grid),
                              bc_plate.w)
    phi_closed = closed_values(phi, bc.phi)
    sw = RectBivariateSpline(grid.x1_closed, grid.x2_closed, wt_closed)
    sphi = RectBivariateSpline(grid.x1_closed, grid.x2_closed, phi_closed)

    # node-aligned subgrid: every coarsen-th node inside the margin window,
    # padded by two rings for the stencils
    k = config.coarsen
    m1 = int(np.ceil(config.margin_frac * (grid.n1 + 1)))
    lo1, hi1 = 2 * k + m1, grid.n1 + 1 - 2 * k - m1
    lo2, hi2 = 2 * k + int(np.ceil(config.margin_frac * (grid.n2 + 1))), \
        grid.n2 + 1 - 2 * k - int(np.ceil(config.margin_frac * (grid.n2 + 1)))
    idx1 = np.arange(lo1 - 2 * k, hi1 + 2 * k + 1, k)
    idx2 = np.arange(lo2 - 2 * k, hi2 + 2 * k + 1, k)
    if len(idx1) < 13 or len(idx2) < 13:
        raise ValueError("solution grid too coarse for the requested subgrid")
    y1 = grid.x1_closed[0] + grid.h1 * idx1
    y2 = grid.x2_closed[0] + grid.h2 * idx2
    hs1, hs2 = k * grid.h1, k * grid.h2
    Y1, Y2 = np.meshgrid(y1, y2, indexing="ij")

    # pull every lattice point back along the flow and accumulate the
    # affine increments exactly
    back = expm(-config.t * _flow_matrix(gen))
    pts = np.stack([Y1.ravel(), Y2.ravel(), np.ones(Y1.size),
                    np.zeros(Y1.size), np.zeros(Y1.size)])
    z = back @ pts
    X1 = z[0].reshape(Y1.shape)
    X2 = z[1].reshape(Y1.shape)
    alpha = -z[3].reshape(Y1.shape)
    beta = -z[4].reshape(Y1.shape)
    tol1 = 1e-12 * (dom.b1 - dom.a1)
    tol2 = 1e-12 * (dom.b2 - dom.a2)
    if (X1.min() < dom.a1 - tol1 or X1.max() > dom.b1 + tol1
            or X2.min() < dom.a2 - tol2 or X2.max() > dom.b2 + tol2):
        raise OrbitDomainError("transformed stencil exits the domain")

    wt_tr = sw.ev(X1, X2) + alpha
    phi_tr = sphi.ev(X1, X2) + beta

    I = slice(2, -2)
    P_int = evaluate(form.P, Y1[I, I], Y2[I, I])
    K_int = evaluate(form.K, Y1[I, I], Y2[I, I])
    num = _vk_residual_on_lattice(wt_tr, phi_tr, hs1, hs2, P_int, K_int, mat)

    # interpolation-noise floor: same fields, no transport, sampled half a
    # subgrid cell off the nodes with data evaluated at the same offsets
    # (shift direction flips if the offset lattice would leave the domain)
    d1, d2 = config.shift_frac * hs1, config.shift_frac * hs2
    if float(Y1.max()) + d1 > dom.b1:
        d1 = -d1
    if float(Y2.max()) + d2 > dom.b2:
        d2 = -d2
    S1 = Y1 + d1
    S2 = Y2 + d2
    if (S1.min() < dom.a1 or S1.max() > dom.b1
            or S2.min() < dom.a2 or S2.max() > dom.b2):
        raise ValueError("margin too small for the noise-floor offset lattice")
    wt_fl = sw.ev(S1, S2)
    phi_fl = sphi.ev(S1, S2)
    P_fl = evaluate(form.P, S1[I, I], S2[I, I])
    K_fl = evaluate(form.K, S1[I, I], S2[I, I])
    floor = _vk_residual_on_lattice(wt_fl, phi_fl, hs1, hs2, P_fl, K_fl, mat)
    floor = max(floor, 1e-300)

    ratio = max(num, floor) / floor
    return OrbitReport(ratio=float(ratio), transformed_residual=num,
                       floor_residual=floor, t=config.t,
                       subgrid_points=int(Y1.size),
                       passed=(ratio <= config.ratio_tol))


# ---------------------------------------------------------------------------
# Manufactured plate solution for convergence studies
# ---------------------------------------------------------------------------

_WT_TEXT = "sin(pi*x1)*sin(pi*x2)"
_PHI_TEXT = "x1^2*x2^2"


def manufactured_case(mat: MaterialParams):
    """Exact plate fields and the right-hand sides they satisfy."""
    wt = parse(_WT_TEXT)
    phi = parse(_PHI_TEXT)
    P = make_sum((make_product((Constant(mat.D),
                                laplacian_expr(laplacian_expr(wt)))),
                  make_negate(bracket_expr(wt, phi))))
    K = make_sum((make_product((Constant(1.0 / mat.Eh),
                                laplacian_expr(laplacian_expr(phi)))),
                  make_product((Constant(0.5), bracket_expr(wt, wt)))))
    spec = ShellSpec(f=ZERO, p=ZERO, domain=Domain2D(0.0, 1.0, 0.0, 1.0))
    return spec, VonKarmanForm(P=P, K=K, shift=ZERO), _WT_TEXT, _PHI_TEXT


@dataclass
class ManufacturedStudy:
    ns: tuple
    errors: list          # max field error per grid
    orders: list          # observed order per consecutive grid pair
    iterations: list


def manufactured_study(mat: MaterialParams, grids=(33, 65, 129),
                       options: SolverOptions = SolverOptions()) -> ManufacturedStudy:
    """Solve the manufactured plate problem on a grid sequence and report
    observed convergence orders of the max-norm solution error."""
    spec, form, wt_text, phi_text = manufactured_case(mat)
    wt_exact, phi_exact = parse(wt_text), parse(phi_text)
    errors, iters, hs = [], [], []
    for n in grids:
        grid = Grid(spec.domain, n, n)
        bc = BoundaryConditions(w=BCData.from_field("clamped", wt_exact),
                                phi=BCData.from_field("clamped", phi_exact))
        system = DiscreteSystem(grid, mat, bc, None,
                                grid.sample_interior(form.P),
                                grid.sample_interior(form.K),
                                label="vonkarman")
        wt, phi, report = newton_solve(system, options=options)
        if not report.converged:
            raise NonConvergenceError(f"manufactured solve failed at n={n}", report)
        err = max(
            float(np.max(np.abs(wt.values - grid.sample_interior(wt_exact)))),
            float(np.max(np.abs(phi.values - grid.sample_interior(phi_exact)))))
        errors.append(err)
        iters.append(report.iterations)
        hs.append(grid.h1)
    orders = [float(np.log(errors[i] / errors[i + 1])
                    / np.log(hs[i] / hs[i + 1]))
              for i in range(len(errors) - 1)]
    return ManufacturedStudy(ns=tuple(grids), errors=errors, orders=orders,
                             iterations=iters)
