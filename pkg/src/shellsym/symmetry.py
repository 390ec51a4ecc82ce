"""Point-symmetry generators and group classification.

A candidate generator acts on (x1, x2, w, Phi) with an in-plane homothetic
motion (scale C1, rotation C2, translations C3/C4) plus affine shifts of
the deflection (A1..A3) and of the stress function (B1..B3):

    xi1 = C1*x1 + C2*x2 + C3
    xi2 = -C2*x1 + C1*x2 + C4
    eta = -(xi1*f_,1 + xi2*f_,2) + A1*x1 + A2*x2 + A3
    phi = B1*x1 + B2*x2 + B3

The A/B part (C = 0) is admitted for every surface and load: a 6-parameter
kernel.  Extra symmetry exists exactly when the reduced load P and the
Gaussian curvature K satisfy

    4*C1*Z + xi . grad(Z) = 0     for Z in {P, K},

which is linear in (C1..C4): classification reduces to the nullspace of a
sampled 2N x 4 coefficient matrix, computed by SVD and re-verified on an
independent dense grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expr import (
    Constant, Expr, Variable, diff, eval_at, evaluate, make_negate,
    make_product, make_sum,
)
from .geometry import MaterialParams, ShellSpec, geometry_fields

__all__ = [
    "Generator", "ClassificationConfig", "GeneratorCharacter",
    "ClassificationResult", "xi_eta_phi", "invariance_residuals",
    "assemble_classification_matrix", "classify", "check_full_DE",
    "eta_expr", "phi_expr", "halton_points", "dense_check_points",
    "admitted_residual_max",
]

KERNEL_DIMENSION = 6


@dataclass(frozen=True)
class Generator:
    """One candidate symmetry generator (10 real parameters)."""

    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0
    C4: float = 0.0
    A1: float = 0.0
    A2: float = 0.0
    A3: float = 0.0
    B1: float = 0.0
    B2: float = 0.0
    B3: float = 0.0

    def xi(self, x) -> tuple[float, float]:
        x1, x2 = x
        return (self.C1 * x1 + self.C2 * x2 + self.C3,
                -self.C2 * x1 + self.C1 * x2 + self.C4)

    @property
    def divergence(self) -> float:
        """xi^mu_,mu, identically 2*C1."""
        return 2.0 * self.C1

    @property
    def homothetic(self) -> np.ndarray:
        return np.array([self.C1, self.C2, self.C3, self.C4])


def _affine(c1: float, c2: float, c3: float) -> Expr:
    return make_sum((make_product((Constant(c1), Variable(1))),
                     make_product((Constant(c2), Variable(2))),
                     Constant(c3)))


def xi_exprs(gen: Generator) -> tuple[Expr, Expr]:
    return (_affine(gen.C1, gen.C2, gen.C3),
            _affine(-gen.C2, gen.C1, gen.C4))


def eta_expr(gen: Generator, spec: ShellSpec) -> Expr:
    """Deflection component eta = -xi . grad(f) + affine A-part."""
    xi1, xi2 = xi_exprs(gen)
    drag = make_sum((make_product((xi1, diff(spec.f, 1))),
                     make_product((xi2, diff(spec.f, 2)))))
    return make_sum((make_negate(drag), _affine(gen.A1, gen.A2, gen.A3)))


def phi_expr(gen: Generator) -> Expr:
    return _affine(gen.B1, gen.B2, gen.B3)


def xi_eta_phi(gen: Generator, spec: ShellSpec, x) -> tuple[float, float, float, float]:
    """Generator components (xi1, xi2, eta, phi) at a point."""
    xi1, xi2 = gen.xi(x)
    f1 = eval_at(diff(spec.f, 1), x)
    f2 = eval_at(diff(spec.f, 2), x)
    eta = -(xi1 * f1 + xi2 * f2) + gen.A1 * x[0] + gen.A2 * x[1] + gen.A3
    phi = gen.B1 * x[0] + gen.B2 * x[1] + gen.B3
    return xi1, xi2, eta, phi


# ---------------------------------------------------------------------------
# Reduced invariance conditions (linear in C1..C4)
# ---------------------------------------------------------------------------

def invariance_residuals(gen: Generator, P: Expr, K: Expr, x) -> tuple[float, float]:
    """Residuals 4*C1*Z + xi . grad(Z) for Z = P and Z = K at a point."""
    xi1, xi2 = gen.xi(x)

    def res(Z: Expr) -> float:
        return (4.0 * gen.C1 * eval_at(Z, x)
                + xi1 * eval_at(diff(Z, 1), x)
                + xi2 * eval_at(diff(Z, 2), x))

    return res(P), res(K)


def _coefficient_rows(Z: Expr, X1, X2) -> np.ndarray:
    """Columns (C1, C2, C3, C4) of the invariance condition for field Z."""
    v = evaluate(Z, X1, X2)
    z1 = evaluate(diff(Z, 1), X1, X2)
    z2 = evaluate(diff(Z, 2), X1, X2)
    return np.stack([4.0 * v + X1 * z1 + X2 * z2,
                     X2 * z1 - X1 * z2,
                     z1,
                     z2], axis=-1)


def assemble_classification_matrix(P: Expr, K: Expr, points) -> np.ndarray:
    """2N x 4 matrix: row 2k is the P-condition at point k, row 2k+1 the K-condition."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
        raise ValueError("need at least 4 sample points of shape (N, 2)")
    rows_p = _coefficient_rows(P, pts[:, 0], pts[:, 1])
    rows_k = _coefficient_rows(K, pts[:, 0], pts[:, 1])
    out = np.empty((2 * pts.shape[0], 4))
    out[0::2] = rows_p
    out[1::2] = rows_k
    return out


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _radical_inverse(i: int, base: int) -> float:
    out, denom = 0.0, 1.0
    while i > 0:
        i, rem = divmod(i, base)
        denom *= base
        out += rem / denom
    return out


def halton_points(n: int, domain, margin: float = 0.05, start: int = 1) -> np.ndarray:
    """n quasi-random interior points, kept `margin` of the width away from the edge."""
    u = np.array([[_radical_inverse(i, 2), _radical_inverse(i, 3)]
                  for i in range(start, start + n)])
    w1, w2 = domain.widths
    lo = np.array([domain.a1 + margin * w1, domain.a2 + margin * w2])
    hi = np.array([domain.b1 - margin * w1, domain.b2 - margin * w2])
    return lo + u * (hi - lo)


def dense_check_points(domain, n_grid: int, n_random: int, rng) -> np.ndarray:
    """Interior verification set: uniform n_grid^2 lattice plus random draws."""
    w1, w2 = domain.widths
    x1 = domain.a1 + (np.arange(1, n_grid + 1) / (n_grid + 1)) * w1
    x2 = domain.a2 + (np.arange(1, n_grid + 1) / (n_grid + 1)) * w2
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    lattice = np.stack([X1.ravel(), X2.ravel()], axis=1)
    rand = np.stack([rng.uniform(domain.a1, domain.b1, n_random),
                     rng.uniform(domain.a2, domain.b2, n_random)], axis=1)
    return np.vstack([lattice, rand])


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationConfig:
    n_samples: int = 64
    svd_tol: float = 1e-8         # relative to the largest singular value
    svd_floor: float = 1e-12      # absolute floor for the all-zero matrix
    margin: float = 0.05
    dense_n: int = 101
    n_random_checks: int = 500
    verify_tol: float = 1e-6      # relative to the coefficient scale
    seed: int = 42


@dataclass(frozen=True)
class GeneratorCharacter:
    kind: str                     # "invariant" (C1 = 0) or "eigenfunction"
    eigenvalue: float | None      # -4*C1 when kind == "eigenfunction"


@dataclass
class ClassificationResult:
    nullity: int
    basis: list = field(default_factory=list)            # orthonormal 4-vectors
    singular_values: np.ndarray = None
    algebra_dimension: int = KERNEL_DIMENSION
    characterizations: list = field(default_factory=list)
    dense_residuals: list = field(default_factory=list)  # max residual per basis vector
    spurious: list = field(default_factory=list)         # vectors rejected on the dense grid
    coefficient_scale: float = 0.0


def _fix_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def classify(spec: ShellSpec, mat: MaterialParams,
             config: ClassificationConfig = ClassificationConfig()) -> ClassificationResult:
    """Admitted point-symmetry algebra of the shell equilibrium equations.

    The 6-parameter kernel (C = 0) is always admitted; the extra dimensions
    are the nullspace of the sampled invariance conditions on P and K.
    Every nullspace vector is re-verified by direct residual evaluation on
    an independent dense grid; a vector failing there is reported as
    spurious (a sampling artifact) and excluded.
    """
    rng = np.random.default_rng(config.seed)
    fields = geometry_fields(spec, mat)
    start = 1 + int(rng.integers(0, 4096)) * config.n_samples
    pts = halton_points(config.n_samples, spec.domain,
                        margin=config.margin, start=start)
    A = assemble_classification_matrix(fields.P, fields.K, pts)
    _, s, Vt = np.linalg.svd(A)
    threshold = max(config.svd_tol * s[0], config.svd_floor)
    null_vecs = [Vt[i] for i in range(4) if s[i] < threshold]

    check = dense_check_points(spec.domain, config.dense_n,
                               config.n_random_checks, rng)
    rows = np.vstack([_coefficient_rows(fields.P, check[:, 0], check[:, 1]),
                      _coefficient_rows(fields.K, check[:, 0], check[:, 1])])
    scale = float(np.max(np.abs(rows))) if rows.size else 0.0
    vtol = config.verify_tol * max(1.0, scale)

    basis, residuals, spurious = [], [], []
    for v in null_vecs:
        r = float(np.max(np.abs(rows @ v)))
        if r <= vtol:
            basis.append(_fix_sign(v))
            residuals.append(r)
        else:
            spurious.append((_fix_sign(v), r))

    chars = []
    for v in basis:
        if abs(v[0]) < config.svd_tol:
            chars.append(GeneratorCharacter(kind="invariant", eigenvalue=None))
        else:
            chars.append(GeneratorCharacter(kind="eigenfunction",
                                            eigenvalue=-4.0 * float(v[0])))

    nullity = len(basis)
    return ClassificationResult(
        nullity=nullity,
        basis=basis,
        singular_values=s,
        algebra_dimension=KERNEL_DIMENSION + nullity,
        characterizations=chars,
        dense_residuals=residuals,
        spurious=spurious,
        coefficient_scale=scale,
    )


def admitted_residual_max(c: np.ndarray, spec: ShellSpec, mat: MaterialParams,
                          points) -> float:
    """Brute-force oracle: largest invariance residual of the homothetic
    vector c = (C1..C4) over an explicit point set, independent of any
    matrix assembly."""
    fields = geometry_fields(spec, mat)
    gen = Generator(C1=float(c[0]), C2=float(c[1]), C3=float(c[2]), C4=float(c[3]))
    worst = 0.0
    for x in points:
        rP, rK = invariance_residuals(gen, fields.P, fields.K, tuple(x))
        worst = max(worst, abs(rP), abs(rK))
    return worst


# ---------------------------------------------------------------------------
# Full determining system (second-order tensor condition, compatibility,
# fourth-order load condition) for cross-checks against the reduced form
# ---------------------------------------------------------------------------

def _full_de_exprs(gen: Generator, spec: ShellSpec, mat: MaterialParams):
    f = spec.f
    b = {(1, 1): diff(diff(f, 1), 1),
         (1, 2): diff(diff(f, 1), 2),
         (2, 2): diff(diff(f, 2), 2)}
    b[(2, 1)] = b[(1, 2)]
    dxi = {(1, 1): gen.C1, (1, 2): gen.C2, (2, 1): -gen.C2, (2, 2): gen.C1}
    xi1, xi2 = xi_exprs(gen)
    xi = {1: xi1, 2: xi2}
    eta = eta_expr(gen, spec)

    def tensor_row(a, bb):
        terms = []
        for m in (1, 2):
            terms.append(make_product((Constant(dxi[(m, bb)]), b[(a, m)])))
            terms.append(make_product((Constant(dxi[(m, a)]), b[(bb, m)])))
            terms.append(make_product((xi[m], diff(b[(a, bb)], m))))
        terms.append(diff(diff(eta, a), bb))
        return make_sum(terms)

    eta11 = diff(diff(eta, 1), 1)
    eta12 = diff(diff(eta, 1), 2)
    eta22 = diff(diff(eta, 2), 2)
    compat = make_sum((make_product((b[(1, 1)], eta22)),
                       make_product((b[(2, 2)], eta11)),
                       make_negate(make_product((Constant(2.0), b[(1, 2)], eta12)))))

    lap_eta = make_sum((eta11, eta22))
    bih_eta = make_sum((diff(diff(lap_eta, 1), 1), diff(diff(lap_eta, 2), 2)))
    load = make_sum((make_product((Constant(mat.D), bih_eta)),
                     make_negate(make_product((Constant(4.0 * gen.C1), spec.p))),
                     make_negate(make_product((xi1, diff(spec.p, 1)))),
                     make_negate(make_product((xi2, diff(spec.p, 2))))))

    return (tensor_row(1, 1), tensor_row(1, 2), tensor_row(2, 2), compat, load)


def full_de_residual_functions(gen: Generator, spec: ShellSpec, mat: MaterialParams):
    """Precompiled residual expressions of the five determining conditions."""
    exprs = _full_de_exprs(gen, spec, mat)

    def at(x):
        return tuple(eval_at(e, x) for e in exprs)

    return at


def check_full_DE(gen: Generator, spec: ShellSpec, mat: MaterialParams,
                  x) -> tuple[float, float, float, float, float]:
    """Residuals (r11, r12, r22, r_compat, r_load) of the full determining
    system at a point, with eta built from the drag-plus-affine form."""
    return full_de_residual_functions(gen, spec, mat)(x)
