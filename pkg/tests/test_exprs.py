"""Expression language: grammar, diagnostics, jet evaluation."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biharm.exprs import (
    BinOp,
    Call,
    DomainError,
    ExprError,
    ExprSyntaxError,
    Lit,
    Param,
    UnboundConstantError,
    evaluate_expr,
    evaluate_jet,
    expr_constants,
    parse_expression,
)

from conftest import fd_partial, poly_partial, poly_to_source, random_poly


def test_ast_spec_example():
    e = parse_expression("u1^2 + sin(u2)", ["u1", "u2"])
    assert e == BinOp("+", BinOp("^", Param("u1", 0), Lit(2.0)), Call("sin", Param("u2", 1)))


def test_constants_ast():
    e = parse_expression("2*pi*r", [])
    assert expr_constants(e) == {"pi", "r"}
    assert evaluate_expr(e, (), {"r": 3.0}) == pytest.approx(6.0 * math.pi)


def test_unbalanced_parenthesis_position():
    with pytest.raises(ExprSyntaxError) as err:
        parse_expression("sin(u1", ["u1"])
    assert err.value.position == 7


def test_unknown_token_position():
    with pytest.raises(ExprSyntaxError) as err:
        parse_expression("u1 + @", ["u1"])
    assert err.value.position == 6


def test_trailing_input():
    with pytest.raises(ExprSyntaxError):
        parse_expression("1 2", [])


def test_unknown_function():
    with pytest.raises(ExprSyntaxError):
        parse_expression("sinh(u1)", ["u1"])


def test_duplicate_params_rejected():
    with pytest.raises(ExprError):
        parse_expression("u1", ["u1", "u1"])


def test_precedence_and_associativity():
    assert evaluate_expr(parse_expression("2+3*4", []), ()) == 14.0
    assert evaluate_expr(parse_expression("2*3^2", []), ()) == 18.0
    assert evaluate_expr(parse_expression("-2^2", []), ()) == -4.0
    assert evaluate_expr(parse_expression("2^3^2", []), ()) == 512.0
    assert evaluate_expr(parse_expression("2^-2", []), ()) == 0.25
    assert evaluate_expr(parse_expression("6/3/2", []), ()) == 1.0
    assert evaluate_expr(parse_expression("1-2-3", []), ()) == -4.0


def test_whitespace_insensitive():
    a = parse_expression("u1 ^ 2 +  sin( u2 )", ["u1", "u2"])
    b = parse_expression("u1^2+sin(u2)", ["u1", "u2"])
    assert a == b


def test_evaluate_jet_spec_example():
    e = parse_expression("u1^2 + sin(u2)", ["u1", "u2"])
    j = evaluate_jet(e, (1.0, 0.0), 2)
    assert j.value == 1.0
    assert j.partial((1, 0)) == 2.0
    assert j.partial((0, 1)) == 1.0
    assert j.partial((2, 0)) == 2.0
    assert j.partial((0, 2)) == 0.0
    assert j.partial((1, 1)) == 0.0


def test_order_zero_jet_is_plain_evaluation():
    e = parse_expression("exp(u1)*atan(u1)+3", ["u1"])
    j = evaluate_jet(e, (0.37,), 0)
    assert j.order == 0
    assert j.value == pytest.approx(evaluate_expr(e, (0.37,)), rel=1e-15)


def test_unbound_constant():
    e = parse_expression("k*u1", ["u1"])
    with pytest.raises(UnboundConstantError):
        evaluate_jet(e, (1.0,), 1)


def test_domain_errors_surface():
    with pytest.raises(DomainError):
        evaluate_expr(parse_expression("log(0-1)", []), ())
    with pytest.raises(DomainError):
        evaluate_expr(parse_expression("1/(u1-u1)", ["u1"]), (2.0,))
    with pytest.raises(DomainError):
        evaluate_expr(parse_expression("0^(0-2)", []), ())
    with pytest.raises(DomainError):
        evaluate_expr(parse_expression("(0-2)^0.5", []), ())


def test_param_free_subexpression_stays_float():
    # sqrt of an exact zero constant must not trip the jet sqrt guard
    e = parse_expression("sqrt(1-rho^2)+0*u1", ["u1"])
    j = evaluate_jet(e, (0.4,), 3, {"rho": 1.0})
    assert j.value == 0.0


def test_parameter_dependent_exponent():
    e = parse_expression("u1^u2", ["u1", "u2"])
    j = evaluate_jet(e, (1.7, 2.3), 2)
    assert j.value == pytest.approx(1.7**2.3, rel=1e-13)
    expected = fd_partial(lambda p: p[0] ** p[1], [1.7, 2.3], (1, 1))
    assert j.partial((1, 1)) == pytest.approx(expected, rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_polynomial_expressions_match_symbolic_differentiation(seed):
    rng = np.random.RandomState(seed)
    nvars = int(rng.randint(1, 4))
    params = [f"u{i+1}" for i in range(nvars)]
    coeffs = random_poly(rng, nvars, degree=4)
    expr = parse_expression(poly_to_source(coeffs, params), params)
    point = rng.uniform(-1.0, 1.0, nvars)
    j = evaluate_jet(expr, point, 4)
    for mono in j.space.indices:
        assert j.partial(mono) == pytest.approx(
            poly_partial(coeffs, mono, point), abs=1e-12, rel=1e-12)


def test_mixed_expression_against_fd_oracle():
    src = "tan(u1)*exp(u2/2) + atan(u1*u2) - sqrt(u1+2)"
    e = parse_expression(src, ["u1", "u2"])
    point = (0.3, -0.4)

    def plain(pt):
        return mp.tan(pt[0]) * mp.exp(pt[1] / 2) + mp.atan(pt[0] * pt[1]) - mp.sqrt(pt[0] + 2)

    j = evaluate_jet(e, point, 4)
    for mono in j.space.indices:
        expected = fd_partial(plain, point, mono)
        assert j.partial(mono) == pytest.approx(expected, rel=1e-8, abs=1e-8), mono


def test_chain_rule_against_jet_composition():
    # jets of f(g(u1,u2)) equal f applied to the jet of g
    outer = parse_expression("sin(v1) + v1^3", ["v1"])
    inner = parse_expression("u1^2 + u2", ["u1", "u2"])
    composed = parse_expression("sin(u1^2 + u2) + (u1^2 + u2)^3", ["u1", "u2"])
    point = (0.6, -0.3)
    g = evaluate_jet(inner, point, 4)
    from biharm.exprs import evaluate_jet_env

    via_env = evaluate_jet_env(outer, [g])
    direct = evaluate_jet(composed, point, 4)
    assert np.abs(via_env.coeffs - direct.coeffs).max() < 1e-10
