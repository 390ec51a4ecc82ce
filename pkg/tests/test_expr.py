import math

import numpy as np
import pytest

from shellsym.expr import (
    Constant, Cos, DomainError, Log, Negate, ParseError, Power, Product,
    Sin, Sum, Variable, diff, eval_at, evaluate, parse, to_string,
)


def central_diff(e, var, x, h=1e-5):
    """Independent derivative oracle: second-order central difference."""
    x1, x2 = x
    if var == 1:
        return (eval_at(e, (x1 + h, x2)) - eval_at(e, (x1 - h, x2))) / (2 * h)
    return (eval_at(e, (x1, x2 + h)) - eval_at(e, (x1, x2 - h))) / (2 * h)


def random_expr(rng, depth=3):
    """Random small expression, smooth on (0.2, 1.8)^2."""
    if depth == 0:
        k = rng.integers(0, 3)
        if k == 0:
            return Constant(float(rng.uniform(-2, 2)))
        return Variable(int(k))
    k = rng.integers(0, 7)
    if k == 0:
        return Sum(tuple(random_expr(rng, depth - 1) for _ in range(2)))
    if k == 1:
        return Product(tuple(random_expr(rng, depth - 1) for _ in range(2)))
    if k == 2:
        return Power(Sum((Constant(3.0), Variable(int(rng.integers(1, 3))))),
                     float(rng.integers(1, 4)))
    if k == 3:
        return Sin(random_expr(rng, depth - 1))
    if k == 4:
        return Cos(random_expr(rng, depth - 1))
    if k == 5:
        return Negate(random_expr(rng, depth - 1))
    return Product((Constant(0.3), Variable(1), Variable(2)))


class TestParse:
    def test_sin_product_structure(self):
        assert parse("sin(x1)*sin(x2)") == Product((Sin(Variable(1)), Sin(Variable(2))))

    def test_zero(self):
        assert parse("0") == Constant(0.0)

    def test_scaled_sum_structure(self):
        expected = Product((Constant(0.5),
                            Sum((Power(Variable(1), 2.0), Power(Variable(2), 2.0)))))
        assert parse("0.5*(x1^2 + x2^2)") == expected

    def test_pi_and_funcs(self):
        assert eval_at(parse("sin(pi/2)"), (0.0, 0.0)) == pytest.approx(1.0)
        assert eval_at(parse("exp(log(2))"), (0.0, 0.0)) == pytest.approx(2.0)

    def test_division_is_product_power(self):
        e = parse("x1/x2")
        assert e == Product((Variable(1), Power(Variable(2), -1.0)))

    def test_unary_minus(self):
        assert eval_at(parse("-x1 + 3"), (1.0, 0.0)) == pytest.approx(2.0)

    def test_syntax_error_offset(self):
        with pytest.raises(ParseError) as err:
            parse("sin(x1) + $")
        assert err.value.offset == 10

    def test_unknown_identifier(self):
        with pytest.raises(ParseError, match="unknown identifier"):
            parse("x3 + 1")

    def test_missing_function_argument(self):
        with pytest.raises(ParseError):
            parse("sin + 1")

    def test_unbalanced_parens(self):
        with pytest.raises(ParseError):
            parse("(x1 + x2")

    def test_nonconstant_exponent_rejected(self):
        with pytest.raises(ParseError, match="constant"):
            parse("x1^x2")

    def test_constant_exponent_forms(self):
        assert eval_at(parse("x1^(-2)"), (2.0, 0.0)) == pytest.approx(0.25)
        assert eval_at(parse("x1^pi"), (2.0, 0.0)) == pytest.approx(2.0 ** math.pi)


class TestDiff:
    def test_sin_rule(self):
        assert diff(Sin(Variable(1)), 1) == Cos(Variable(1))

    def test_constant_rule(self):
        assert diff(Constant(4.2), 1) == Constant(0.0)
        assert diff(Constant(4.2), 2) == Constant(0.0)

    def test_power_rule_against_central_difference(self):
        e = Power(Variable(1), 2.0)
        d = diff(e, 1)
        sym = eval_at(d, (3.0, 0.0))
        fd = central_diff(e, 1, (3.0, 0.0))
        assert sym == pytest.approx(6.0)
        assert abs(sym - fd) <= 1e-8

    def test_product_and_chain_rules(self):
        e = parse("exp(x1*x2)")
        d = diff(e, 1)
        assert eval_at(d, (1.0, 2.0)) == pytest.approx(2.0 * math.e ** 2)
        assert abs(eval_at(d, (1.0, 2.0)) - central_diff(e, 1, (1.0, 2.0))) < 1e-7

    def test_log_rule(self):
        e = Log(Variable(1))
        assert eval_at(diff(e, 1), (4.0, 0.0)) == pytest.approx(0.25)

    def test_random_exprs_against_central_difference(self):
        rng = np.random.default_rng(1234)
        checked = 0
        while checked < 1000:
            e = random_expr(rng)
            x = tuple(rng.uniform(0.2, 1.8, size=2))
            try:
                v = eval_at(e, x)
                d1 = eval_at(diff(e, 1), x)
                d2 = eval_at(diff(e, 2), x)
            except DomainError:
                continue
            if not all(map(math.isfinite, (v, d1, d2))):
                continue
            for var, d in ((1, d1), (2, d2)):
                fd = central_diff(e, var, x)
                assert abs(d - fd) <= 1e-6 * (1.0 + abs(d)) + 1e-6
            checked += 1

    def test_mixed_partials_commute(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            e = random_expr(rng)
            a = diff(diff(e, 1), 2)
            b = diff(diff(e, 2), 1)
            x = tuple(rng.uniform(0.2, 1.8, size=2))
            try:
                va, vb = eval_at(a, x), eval_at(b, x)
            except DomainError:
                continue
            if not (math.isfinite(va) and math.isfinite(vb)):
                continue
            assert abs(va - vb) <= 1e-10 * (1.0 + abs(va))


class TestEvaluate:
    def test_sin_product_at_center(self):
        e = parse("sin(x1)*sin(x2)")
        assert eval_at(e, (math.pi / 2, math.pi / 2)) == pytest.approx(1.0)

    def test_paraboloid(self):
        e = parse("0.5*(x1^2+x2^2)")
        assert eval_at(e, (1.0, 1.0)) == pytest.approx(1.0)

    def test_array_broadcast(self):
        e = parse("x1^2 + x2")
        x1 = np.array([1.0, 2.0, 3.0])
        x2 = np.array([0.5, 0.5, 0.5])
        np.testing.assert_allclose(evaluate(e, x1, x2), x1 ** 2 + x2)

    def test_log_domain_error(self):
        with pytest.raises(DomainError):
            eval_at(parse("log(x1)"), (-1.0, 0.0))

    def test_negative_base_fractional_power(self):
        with pytest.raises(DomainError):
            eval_at(parse("x1^0.5"), (-2.0, 0.0))

    def test_negative_base_integer_power_ok(self):
        assert eval_at(parse("x1^3"), (-2.0, 0.0)) == pytest.approx(-8.0)

    def test_zero_base_negative_power(self):
        with pytest.raises(DomainError):
            eval_at(parse("x1^(-1)"), (0.0, 1.0))


class TestRoundTrip:
    def test_print_parse_pointwise_equal(self):
        rng = np.random.default_rng(777)
        for _ in range(300):
            e = random_expr(rng)
            text = to_string(e)
            e2 = parse(text)
            for _ in range(5):
                x = tuple(rng.uniform(0.2, 1.8, size=2))
                try:
                    va = eval_at(e, x)
                except DomainError:
                    continue
                vb = eval_at(e2, x)
                assert vb == pytest.approx(va, rel=1e-12, abs=1e-12)

    def test_examples_round_trip(self):
        for text in ["sin(x1)*sin(x2)", "0.5*(x1^2 + x2^2)", "-x1^2 + 2/x2",
                     "exp(x1*x2) - log(x2)", "cos(pi*x1)"]:
            e = parse(text)
            again = parse(to_string(e))
            x = (0.7, 1.3)
            assert eval_at(again, x) == pytest.approx(eval_at(e, x), rel=1e-14)

    def test_structural_equality_implies_equal_eval(self):
        a = parse("sin(x1)*cos(x2) + 0.25*x1^3")
        b = parse("sin(x1)*cos(x2) + 0.25*x1^3")
        assert a == b
        rng = np.random.default_rng(5)
        for _ in range(20):
            x = tuple(rng.uniform(-2, 2, size=2))
            assert eval_at(a, x) == eval_at(b, x)
