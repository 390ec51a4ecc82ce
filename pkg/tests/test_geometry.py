import math

import numpy as np
import pytest

from shellsym.expr import Constant, eval_at, evaluate, parse
from shellsym.geometry import (
    Domain2D, MaterialParams, ShellSpec, curvature_tensor, gauss_curvature,
    geometry_fields, mean_curvature, reduced_load, shallowness_check,
)

UNIT = Domain2D(0.0, 1.0, 0.0, 1.0)


def spec_of(f_text, p_text="0", domain=UNIT, epsilon=0.1):
    return ShellSpec(f=parse(f_text), p=parse(p_text), domain=domain, epsilon=epsilon)


def fd_hessian(f, x, h=1e-5):
    """Finite-difference Hessian oracle for a symbolic surface."""
    x1, x2 = x
    e = eval_at
    f11 = (e(f, (x1 + h, x2)) - 2 * e(f, x) + e(f, (x1 - h, x2))) / h**2
    f22 = (e(f, (x1, x2 + h)) - 2 * e(f, x) + e(f, (x1, x2 - h))) / h**2
    f12 = (e(f, (x1 + h, x2 + h)) - e(f, (x1 + h, x2 - h))
           - e(f, (x1 - h, x2 + h)) + e(f, (x1 - h, x2 - h))) / (4 * h**2)
    return f11, f12, f22


class TestCurvatureTensor:
    def test_plate(self):
        b11, b12, b22 = curvature_tensor(spec_of("0"))
        assert b11 == Constant(0.0) and b12 == Constant(0.0) and b22 == Constant(0.0)

    def test_paraboloid_constant_hessian(self):
        b11, b12, b22 = curvature_tensor(spec_of("0.5*(x1^2 + x2^2)"))
        assert b11 == Constant(1.0)
        assert b12 == Constant(0.0)
        assert b22 == Constant(1.0)

    def test_sine_surface_values_and_fd_oracle(self):
        spec = spec_of("sin(x1)*sin(x2)", domain=Domain2D(0, math.pi, 0, math.pi))
        b11, b12, b22 = curvature_tensor(spec)
        x = (math.pi / 2, math.pi / 2)
        assert eval_at(b12, x) == pytest.approx(0.0, abs=1e-15)
        assert eval_at(b11, x) == pytest.approx(-1.0)
        f11, f12, f22 = fd_hessian(spec.f, (0.8, 1.1))
        assert eval_at(b11, (0.8, 1.1)) == pytest.approx(f11, abs=1e-5)
        assert eval_at(b12, (0.8, 1.1)) == pytest.approx(f12, abs=1e-5)
        assert eval_at(b22, (0.8, 1.1)) == pytest.approx(f22, abs=1e-5)


class TestInvariants:
    def test_paraboloid_H_K(self):
        spec = spec_of("0.5*(x1^2 + x2^2)")
        assert mean_curvature(spec) == Constant(1.0)
        assert gauss_curvature(spec) == Constant(1.0)

    def test_parabolic_cylinder(self):
        spec = spec_of("0.5*x1^2")
        assert mean_curvature(spec) == Constant(0.5)
        assert gauss_curvature(spec) == Constant(0.0)

    def test_sine_surface_K_at_origin(self):
        spec = spec_of("sin(x1)*sin(x2)", domain=Domain2D(-1, 1, -1, 1))
        K = gauss_curvature(spec)
        assert eval_at(K, (0.0, 0.0)) == pytest.approx(-1.0)
        f11, f12, f22 = fd_hessian(spec.f, (0.0, 0.0))
        assert f11 * f22 - f12**2 == pytest.approx(-1.0, abs=1e-5)

    def test_trace_determinant_identities_random_points(self):
        rng = np.random.default_rng(42)
        for f_text in ["sin(x1)*sin(x2)", "0.5*(x1^2+x2^2)", "exp(0.3*x1)*cos(x2)",
                       "x1^3*x2 - 0.2*x2^2"]:
            spec = spec_of(f_text)
            b11, b12, b22 = curvature_tensor(spec)
            H, K = mean_curvature(spec), gauss_curvature(spec)
            X1 = rng.uniform(0, 1, size=10_000)
            X2 = rng.uniform(0, 1, size=10_000)
            vb11, vb12, vb22 = (evaluate(b, X1, X2) for b in (b11, b12, b22))
            vH, vK = evaluate(H, X1, X2), evaluate(K, X1, X2)
            assert np.max(np.abs(vH - 0.5 * (vb11 + vb22))) <= 1e-12
            det = vb11 * vb22 - vb12**2
            assert np.max(np.abs(vK - det)) <= 1e-12 * (1 + np.max(np.abs(det)))
            assert np.min(vH**2 - vK) >= -1e-12


class TestReducedLoad:
    def test_plate_collapses_to_load(self):
        spec = spec_of("0", "0")
        assert reduced_load(spec, MaterialParams()) == Constant(0.0)

    def test_paraboloid_harmonic_mean_curvature(self):
        spec = spec_of("0.5*(x1^2+x2^2)", "0")
        assert reduced_load(spec, MaterialParams()) == Constant(0.0)

    def test_sine_surface_biharmonic(self):
        spec = spec_of("sin(x1)*sin(x2)", "0",
                       domain=Domain2D(0, math.pi, 0, math.pi))
        P = reduced_load(spec, MaterialParams(D=1.0))
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = tuple(rng.uniform(0.1, 3.0, size=2))
            expected = 4.0 * math.sin(x[0]) * math.sin(x[1])
            assert eval_at(P, x) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_zero_surface_is_pointwise_load(self):
        spec = spec_of("0", "3*sin(x1) + x2^2")
        P = reduced_load(spec, MaterialParams(D=7.0))
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = tuple(rng.uniform(0, 1, size=2))
            assert eval_at(P, x) == eval_at(spec.p, x)

    def test_fd_stencil_convergence_ratio(self):
        # Second-order agreement with finite-difference stencils applied to
        # sampled f: the error should shrink ~4x when h halves.
        spec = spec_of("sin(x1)*exp(0.2*x2)", "0",
                       domain=Domain2D(0.0, 2.0, 0.0, 2.0))
        fields = geometry_fields(spec, MaterialParams())

        def stencil_error(n):
            x1 = np.linspace(0, 2, n)
            h = x1[1] - x1[0]
            X1, X2 = np.meshgrid(x1, x1, indexing="ij")
            F = evaluate(spec.f, X1, X2)
            I = slice(1, -1)
            f11 = (F[2:, I] - 2 * F[1:-1, I] + F[:-2, I]) / h**2
            f22 = (F[I, 2:] - 2 * F[I, 1:-1] + F[I, :-2]) / h**2
            f12 = (F[2:, 2:] - F[2:, :-2] - F[:-2, 2:] + F[:-2, :-2]) / (4 * h**2)
            vH = evaluate(fields.H, X1[I, I], X2[I, I])
            vK = evaluate(fields.K, X1[I, I], X2[I, I])
            errH = np.max(np.abs(vH - 0.5 * (f11 + f22)))
            errK = np.max(np.abs(vK - (f11 * f22 - f12**2)))
            return errH, errK

        eH1, eK1 = stencil_error(41)
        eH2, eK2 = stencil_error(81)
        assert 3.4 <= eH1 / eH2 <= 4.6
        assert 3.4 <= eK1 / eK2 <= 4.6


class TestShallowness:
    def test_plate_trivially_shallow(self):
        product, ok = shallowness_check(spec_of("0", epsilon=0.5))
        assert product == 0.0 and ok

    def test_mild_sine_surface(self):
        spec = spec_of("0.1*sin(x1)*sin(x2)",
                       domain=Domain2D(0, math.pi, 0, math.pi), epsilon=0.2)
        product, ok = shallowness_check(spec)
        assert product == pytest.approx(0.01, rel=1e-12)
        assert ok

    def test_unit_slope_flagged(self):
        product, ok = shallowness_check(spec_of("x1", epsilon=0.2))
        assert product == pytest.approx(1.0)
        assert not ok


class TestValidation:
    def test_bad_domain(self):
        with pytest.raises(ValueError):
            Domain2D(0.0, 0.0, 0.0, 1.0)

    def test_bad_epsilon(self):
        with pytest.raises(ValueError):
            ShellSpec(f=parse("0"), p=parse("0"), domain=UNIT, epsilon=1.5)

    def test_bad_material(self):
        with pytest.raises(ValueError):
            MaterialParams(D=-1.0)

    def test_geometry_fields_sampling(self):
        fields = geometry_fields(spec_of("0.5*(x1^2+x2^2)"), MaterialParams())
        sampled = fields.sample(11)
        assert sampled["H"].shape == (11, 11)
        np.testing.assert_allclose(sampled["K"], 1.0)
