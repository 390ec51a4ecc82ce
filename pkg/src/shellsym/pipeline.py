"""Case configuration and command orchestration.

A case is one JSON document (unknown keys rejected) describing the surface,
load, domain, material, grid, boundary conditions and solver/classification
settings.  The four commands -- classify, transform, solve, verify -- each
map a validated case to a JSON-serializable report plus optional output
files (CSV fields, boundary data).  All randomness derives from the single
seed recorded in the case, so identical configs give byte-identical
reports.
"""

from __future__ import annotations

import json
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .equivalence import to_vonkarman, transform_boundary_data
from .expr import Expr, ParseError, parse, to_string
from .geometry import (
    Domain2D, MaterialParams, ShellSpec, shallowness_check,
)
from .solver import (
    BCData, BoundaryConditions, FieldGrid, Grid, NonConvergenceError,
    SolverOptions, field_csv_text, marguerre_system, newton_solve,
    vonkarman_system,
)
from .symmetry import (
    ClassificationConfig, KERNEL_DIMENSION, Generator, classify,
)
from .verify import (
    OrbitConfig, VerificationReport, manufactured_study, orbit_residual,
    verify_equivalence, verify_reduction,
)

__all__ = [
    "CaseConfig", "ConfigError", "canonical_json", "load_config",
    "run_classify", "run_transform", "run_solve", "run_verify",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid case configuration (schema violation or unparseable expression)."""


class MaterialConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    D: float = Field(default=1.0, gt=0)
    E: float = Field(default=1.0, gt=0)
    h: float = Field(default=1.0, gt=0)


class GridConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n: int = Field(default=33, ge=9)


class BCConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    w_kind: Literal["clamped", "simply_supported"] = "clamped"
    phi_kind: Literal["clamped", "simply_supported"] = "clamped"
    w_dirichlet: str = "0"
    w_grad1: str = "0"
    w_grad2: str = "0"
    w_laplacian: str = "0"
    phi_dirichlet: str = "0"
    phi_grad1: str = "0"
    phi_grad2: str = "0"
    phi_laplacian: str = "0"


class SolverConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    tol_abs: float = Field(default=1e-10, gt=0)
    tol_rel: float = Field(default=1e-10, ge=0)
    max_iter: int = Field(default=30, ge=1)
    max_load_steps: int = Field(default=16, ge=1, le=16)
    vk_data: Literal["matched", "symbolic"] = "matched"


class ClassificationSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")
    n_samples: int = Field(default=64, ge=4)
    svd_tol: float = Field(default=1e-8, gt=0)


class GeneratorConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
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


class OrbitSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")
    generator: GeneratorConfig = GeneratorConfig(C2=1.0)
    t: float = 0.3
    coarsen: int = Field(default=2, ge=1)
    margin_frac: float = Field(default=0.12, ge=0.0, lt=0.5)
    shift_frac: float = 0.5
    ratio_tol: float = 10.0


class VerifySettings(BaseModel):
    model_config = ConfigDict(extra="forbid")
    equivalence_gap_tol: float = 1e-9
    reduction_samples: int = Field(default=60, ge=10)
    reduction_max_tol: float = 1e-8


class CaseConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    case_id: str = "case"
    surface: str = "0"
    load: str = "0"
    domain: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    epsilon: float = Field(default=0.1, gt=0, lt=1)
    material: MaterialConfig = MaterialConfig()
    grid: GridConfig = GridConfig()
    bc: BCConfig = BCConfig()
    solver: SolverConfig = SolverConfig()
    classification: ClassificationSettings = ClassificationSettings()
    orbit: OrbitSettings = OrbitSettings()
    verify: VerifySettings = VerifySettings()
    seed: int = 42


def load_config(data) -> CaseConfig:
    """Validate a dict (or JSON text) into a CaseConfig; raises ConfigError."""
    try:
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return CaseConfig.model_validate(data)
    except (ValidationError, json.JSONDecodeError) as err:
        raise ConfigError(str(err)) from err


def _parse_expr(text: str, what: str) -> Expr:
    try:
        return parse(text)
    except ParseError as err:
        raise ConfigError(f"cannot parse {what} {text!r}: {err}") from err


def _build_spec(config: CaseConfig) -> ShellSpec:
    a1, b1, a2, b2 = config.domain
    try:
        domain = Domain2D(a1, b1, a2, b2)
    except ValueError as err:
        raise ConfigError(str(err)) from err
    return ShellSpec(f=_parse_expr(config.surface, "surface"),
                     p=_parse_expr(config.load, "load"),
                     domain=domain, epsilon=config.epsilon)


def _build_material(config: CaseConfig) -> MaterialParams:
    m = config.material
    return MaterialParams(D=m.D, E=m.E, h=m.h)


def _build_grid(config: CaseConfig) -> Grid:
    a1, b1, a2, b2 = config.domain
    return Grid(Domain2D(a1, b1, a2, b2), config.grid.n, config.grid.n)


def _build_bcdata(kind: str, prefix: str, bc: BCConfig) -> BCData:
    get = lambda name: _parse_expr(getattr(bc, f"{prefix}_{name}"),
                                   f"bc {prefix}_{name}")
    return BCData(kind=kind, dirichlet=get("dirichlet"),
                  grad1=get("grad1"), grad2=get("grad2"),
                  laplacian=get("laplacian"))


def _build_bc(config: CaseConfig) -> BoundaryConditions:
    return BoundaryConditions(
        w=_build_bcdata(config.bc.w_kind, "w", config.bc),
        phi=_build_bcdata(config.bc.phi_kind, "phi", config.bc))


def _solver_options(config: CaseConfig) -> SolverOptions:
    s = config.solver
    return SolverOptions(tol_abs=s.tol_abs, tol_rel=s.tol_rel,
                         max_iter=s.max_iter, max_load_steps=s.max_load_steps)


def _shallowness_entry(spec: ShellSpec) -> dict:
    product, ok = shallowness_check(spec)
    entry = {"max_slope_product": float(product),
             "epsilon_squared": float(spec.epsilon ** 2),
             "ok": bool(ok)}
    if not ok:
        entry["warning"] = ("shallowness bound exceeded; results describe the "
                            "shallow approximation of this surface")
    return entry


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def run_classify(config: CaseConfig) -> dict:
    spec = _build_spec(config)
    mat = _build_material(config)
    cc = ClassificationConfig(n_samples=config.classification.n_samples,
                              svd_tol=config.classification.svd_tol,
                              seed=config.seed)
    result = classify(spec, mat, cc)
    extras = []
    for v, ch, res in zip(result.basis, result.characterizations,
                          result.dense_residuals):
        extras.append({
            "C1": float(v[0]), "C2": float(v[1]),
            "C3": float(v[2]), "C4": float(v[3]),
            "characterization": ch.kind,
            "eigenvalue": None if ch.eigenvalue is None else float(ch.eigenvalue),
            "dense_residual_max": float(res),
        })
    if result.nullity == 0:
        summary = "dimension 6 (kernel only)"
    else:
        summary = (f"dimension {result.algebra_dimension} = "
                   f"{KERNEL_DIMENSION} (kernel) + {result.nullity} (extra)")
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "classify",
        "case_id": config.case_id,
        "seed": config.seed,
        "algebra_dimension": int(result.algebra_dimension),
        "nullity": int(result.nullity),
        "kernel_dimension": KERNEL_DIMENSION,
        "kernel_note": "6-parameter kernel always present",
        "singular_values": [float(s) for s in result.singular_values],
        "extra_generators": extras,
        "spurious": [{"vector": [float(x) for x in v], "residual": float(r)}
                     for v, r in result.spurious],
        "shallowness": _shallowness_entry(spec),
        "summary": summary,
    }


def _bc_strings(bc: BoundaryConditions) -> dict:
    def one(data: BCData) -> dict:
        out = {"kind": data.kind, "dirichlet": to_string(data.dirichlet)}
        if data.kind == "clamped":
            out["grad1"] = to_string(data.grad1)
            out["grad2"] = to_string(data.grad2)
        else:
            out["laplacian"] = to_string(data.laplacian)
        return out

    return {"w": one(bc.w), "phi": one(bc.phi)}


def run_transform(config: CaseConfig) -> tuple[dict, dict]:
    spec = _build_spec(config)
    mat = _build_material(config)
    grid = _build_grid(config)
    bc = _build_bc(config)
    form = to_vonkarman(spec, mat)
    bc_plate = transform_boundary_data(bc, spec)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "transform",
        "case_id": config.case_id,
        "seed": config.seed,
        "P": to_string(form.P),
        "K": to_string(form.K),
        "shift": to_string(form.shift),
        "boundary_data": _bc_strings(bc_plate),
        "shallowness": _shallowness_entry(spec),
    }
    files = {}
    for name, e in (("P", form.P), ("K", form.K)):
        samples = FieldGrid(grid.sample_interior(e), grid)
        files[f"{name}.csv"] = field_csv_text(
            samples, BCData(kind="clamped", dirichlet=e))
    files["boundary_data.json"] = canonical_json(report["boundary_data"])
    return report, files


def run_solve(config: CaseConfig, system: str = "marguerre",
              manufactured: bool = False) -> tuple[dict, dict, str]:
    """Returns (report, files, status); status is 'ok' or 'non_convergence'."""
    mat = _build_material(config)
    if manufactured:
        study = manufactured_study(mat, grids=(33, 65, 129),
                                   options=_solver_options(config))
        report = {
            "schema_version": SCHEMA_VERSION,
            "command": "solve",
            "case_id": config.case_id,
            "seed": config.seed,
            "system": "vonkarman",
            "manufactured": True,
            "grids": list(study.ns),
            "max_errors": [float(e) for e in study.errors],
            "observed_orders": [float(o) for o in study.orders],
            "iterations": [int(i) for i in study.iterations],
        }
        return report, {}, "ok"

    spec = _build_spec(config)
    grid = _build_grid(config)
    bc = _build_bc(config)
    if system == "marguerre":
        discrete = marguerre_system(spec, mat, grid, bc)
        bc_u = bc.w
        field_name = "w"
    elif system == "vonkarman":
        bc = transform_boundary_data(bc, spec)
        discrete = vonkarman_system(spec, mat, grid, bc,
                                    data=config.solver.vk_data)
        bc_u = bc.w
        field_name = "wtilde"
    else:
        raise ConfigError(f"unknown system {system!r}")
    u, phi, rep = newton_solve(discrete, options=_solver_options(config))
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "solve",
        "case_id": config.case_id,
        "seed": config.seed,
        "system": system,
        "manufactured": False,
        "converged": bool(rep.converged),
        "iterations": int(rep.iterations),
        "load_steps_used": int(rep.load_steps_used),
        "final_residual_inf": float(rep.final_residual_inf),
        "residual_norm_history": [float(r) for r in rep.residual_norm_history],
        "max_abs_deflection": float(np.max(np.abs(u.values))),
        "max_abs_stress_function": float(np.max(np.abs(phi.values))),
        "shallowness": _shallowness_entry(spec),
    }
    files = {
        f"{field_name}.csv": field_csv_text(u, bc_u),
        "phi.csv": field_csv_text(phi, bc.phi),
    }
    return report, files, ("ok" if rep.converged else "non_convergence")


def run_verify(config: CaseConfig, check: str) -> tuple[dict, str]:
    """Returns (report, status); status in {'ok', 'verification_failure',
    'non_convergence'}."""
    spec = _build_spec(config)
    mat = _build_material(config)
    vr = VerificationReport(case_id=config.case_id)
    status = "ok"
    if check == "equivalence":
        try:
            rep = verify_equivalence(spec, mat, _build_grid(config),
                                     _build_bc(config),
                                     options=_solver_options(config),
                                     gap_tol=config.verify.equivalence_gap_tol)
        except NonConvergenceError as err:
            return ({"schema_version": SCHEMA_VERSION, "command": "verify",
                     "check": check, "case_id": config.case_id,
                     "error": str(err)}, "non_convergence")
        vr.max_equivalence_gap_w = rep.gap_w
        vr.max_equivalence_gap_phi = rep.gap_phi
        vr.passes["equivalence"] = rep.passed
    elif check == "reduction":
        rep = verify_reduction(spec, mat,
                               n_random=config.verify.reduction_samples,
                               seed=config.seed,
                               full_tol=config.verify.reduction_max_tol)
        vr.reduction_residual_max = max(rep.tensor_condition_max,
                                        rep.vanish_residual_max)
        vr.passes["reduction"] = rep.passed
    elif check == "orbit":
        grid = _build_grid(config)
        bc = _build_bc(config)
        discrete = marguerre_system(spec, mat, grid, bc)
        w, phi, solve_rep = newton_solve(discrete,
                                         options=_solver_options(config))
        if not solve_rep.converged:
            return ({"schema_version": SCHEMA_VERSION, "command": "verify",
                     "check": check, "case_id": config.case_id,
                     "error": "base solve did not converge"},
                    "non_convergence")
        ob = config.orbit
        gen = Generator(**ob.generator.model_dump())
        try:
            rep = orbit_residual(w, phi, gen, spec, mat, bc,
                                 OrbitConfig(t=ob.t, coarsen=ob.coarsen,
                                             margin_frac=ob.margin_frac,
                                             shift_frac=ob.shift_frac,
                                             ratio_tol=ob.ratio_tol))
        except ValueError as err:
            raise ConfigError(f"orbit settings unusable for this case: {err}") from err
        vr.orbit_residual_ratio = rep.ratio
        vr.passes["orbit"] = rep.passed
    else:
        raise ConfigError(f"unknown check {check!r}")

    if not vr.all_passed:
        status = "verification_failure"
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "check": check,
        "case_id": config.case_id,
        "seed": config.seed,
        "max_equivalence_gap_w": vr.max_equivalence_gap_w,
        "max_equivalence_gap_phi": vr.max_equivalence_gap_phi,
        "orbit_residual_ratio": vr.orbit_residual_ratio,
        "reduction_residual_max": vr.reduction_residual_max,
        "passes": vr.passes,
        "all_passed": vr.all_passed,
    }
    return report, status
