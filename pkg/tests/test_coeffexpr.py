import math
import random

import numpy as np
import pytest

from vcnls import coeffexpr as ce
from vcnls.errors import EvalError

# Frozen fixed-grid Simpson oracle (200001 nodes) for int_0^pi exp(2 - cos s) ds.
INT_EXP_2_MINUS_COS = 29.389699163317562


def simpson_fixed(f, a, b, n=200001):
    xs = np.linspace(a, b, n)
    ys = f(xs)
    h = (b - a) / (n - 1)
    return h / 3 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-2:2].sum())


class TestParseAndEval:
    def test_one_plus_cos_at_zero(self):
        assert ce.evaluate(ce.parse("1 + cos(t)"), 0.0) == pytest.approx(2.0)

    def test_gaussian_at_zero(self):
        assert ce.evaluate(ce.parse("exp(-t^2/2)"), 0.0) == pytest.approx(1.0)

    def test_negative_product_at_zero(self):
        e = ce.parse("-4*(t+1)*exp(-t^2)")
        assert ce.evaluate(e, 0.0) == pytest.approx(-4.0)

    def test_cos_at_pi(self):
        assert ce.evaluate(ce.parse("cos(t)"), math.pi) == pytest.approx(-1.0)

    def test_exp_cos_at_zero(self):
        assert ce.evaluate(ce.parse("exp(cos(t))"), 0.0) == pytest.approx(math.e)

    def test_pole_raises(self):
        with pytest.raises(EvalError):
            ce.evaluate(ce.parse("t/ (t-1)"), 1.0)

    def test_sqrt_of_negative_raises(self):
        with pytest.raises(EvalError):
            ce.evaluate(ce.parse("sqrt(t)"), -1.0)

    def test_precedence(self):
        assert ce.evaluate(ce.parse("2+3*4"), 0.0) == 14.0
        # unary minus binds looser than ^
        assert ce.evaluate(ce.parse("-2^2"), 0.0) == -4.0
        assert ce.evaluate(ce.parse("2^-2"), 0.0) == 0.25

    def test_vectorized_evaluation(self):
        t = np.linspace(0, 1, 7)
        out = ce.evaluate(ce.parse("t^2 + sin(t)"), t)
        np.testing.assert_allclose(out, t ** 2 + np.sin(t), rtol=1e-15)

    def test_non_integer_exponent_rejected(self):
        with pytest.raises(ce.ParseError):
            ce.parse("t^2.5")

    def test_unknown_identifier(self):
        with pytest.raises(ce.ParseError) as err:
            ce.parse("2*x + 1")
        assert err.value.position == 2

    def test_unknown_function(self):
        with pytest.raises(ce.ParseError):
            ce.parse("tan(t)")

    def test_syntax_error_position(self):
        with pytest.raises(ce.ParseError) as err:
            ce.parse("1 + * 2")
        assert err.value.position == 4

    def test_unbalanced_paren(self):
        with pytest.raises(ce.ParseError):
            ce.parse("cos(t")

    def test_empty_source(self):
        with pytest.raises(ce.ParseError):
            ce.parse("   ")

    def test_trailing_garbage(self):
        with pytest.raises(ce.ParseError):
            ce.parse("1 + 2 )")


def canonical_random_expr(rng, depth):
    """Random tree in parser-canonical form (no negative Num literals)."""
    r = rng.random()
    if depth <= 0 or r < 0.3:
        if rng.random() < 0.5:
            v = round(rng.uniform(0, 5), 3) if rng.random() < 0.8 else float(rng.randint(0, 9))
            return ce.Num(v)
        return ce.Var()
    if r < 0.55:
        return ce.BinOp(rng.choice("+-*/"),
                        canonical_random_expr(rng, depth - 1),
                        canonical_random_expr(rng, depth - 1))
    if r < 0.7:
        return ce.Neg(canonical_random_expr(rng, depth - 1))
    if r < 0.82:
        return ce.Pow(canonical_random_expr(rng, depth - 1), rng.randint(-3, 3))
    return ce.Call(rng.choice(list(ce.FUNCTIONS)), canonical_random_expr(rng, depth - 1))


def test_roundtrip_corpus():
    rng = random.Random(20240817)
    for _ in range(1000):
        tree = canonical_random_expr(rng, 4)
        src = ce.to_source(tree)
        assert ce.parse(src) == tree, src


def test_roundtrip_of_parsed_sources():
    sources = [
        "1 + cos(t)", "exp(-t^2/2)", "-4*(t+1)*exp(-t^2)", "t/(t-1)",
        "-2^2", "2 - -3", "1 - 2 - 3", "8/4/2", "abs(-t)^3", "sqrt(t*t)",
    ]
    for src in sources:
        tree = ce.parse(src)
        assert ce.parse(ce.to_source(tree)) == tree


class TestDefiniteIntegral:
    def test_constant(self):
        assert ce.definite_integral(ce.parse("1"), 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_linear(self):
        assert ce.definite_integral(ce.parse("t"), 0.0, 2.0) == pytest.approx(2.0, abs=1e-12)

    def test_exp_cos_vs_fixed_simpson(self):
        e = ce.parse("exp(2 - cos(t))")
        val = ce.definite_integral(e, 0.0, math.pi, tol=1e-11)
        assert val == pytest.approx(INT_EXP_2_MINUS_COS, abs=1e-10)
        # oracle reproducibility
        assert simpson_fixed(lambda s: np.exp(2 - np.cos(s)), 0, math.pi) == pytest.approx(
            INT_EXP_2_MINUS_COS, abs=1e-12)

    def test_additive_over_splits(self):
        rng = random.Random(7)
        e = ce.parse("exp(-t^2) * (1 + sin(t)^2)")
        tol = 1e-10
        for _ in range(10):
            a = rng.uniform(-2, 0)
            b = rng.uniform(0.5, 3)
            m = rng.uniform(a, b)
            whole = ce.definite_integral(e, a, b, tol)
            parts = ce.definite_integral(e, a, m, tol) + ce.definite_integral(e, m, b, tol)
            assert abs(whole - parts) < 2 * tol

    def test_reversed_interval_flips_sign(self):
        e = ce.parse("t^2")
        assert ce.definite_integral(e, 1.0, 0.0) == pytest.approx(-1 / 3, abs=1e-12)


class TestCoefficientSet:
    def test_from_strings_and_callables(self):
        cs = ce.CoefficientSet.from_strings(a="1 + cos(t)", h="-2 - 2*cos(t)")
        fns = cs.callables()
        assert fns["a"](0.0) == pytest.approx(2.0)
        assert fns["h"](0.0) == pytest.approx(-4.0)
        assert fns["b"](1.2345) == 0.0

    def test_all_six_must_evaluate_at_zero(self):
        with pytest.raises(ValueError):
            ce.CoefficientSet.from_strings(a="1/t")

    def test_sources_roundtrip(self):
        cs = ce.CoefficientSet.from_strings(a="exp(cos(t))", d="-0.01*exp(2 - cos(t))")
        again = ce.CoefficientSet.from_strings(**cs.sources())
        assert again == cs
