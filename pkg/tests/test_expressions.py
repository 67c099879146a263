import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_kit.errors import ExpressionError
from dirac_kit.expressions import (Binary, Call, Name, Number, Power, Unary, compile_expression,
                                   evaluate_constant, names_in, parse_expression, to_text)
from dirac_kit.jet_calculus import Chart

CHART = Chart.build("xy", ["x", "y"])

leaves = st.one_of(
    st.builds(Number, st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False)),
    st.builds(Name, st.sampled_from(["x", "y", "mu"])),
)


def _extend(children):
    return st.one_of(
        st.builds(Unary, st.sampled_from(["-", "+"]), children),
        st.builds(Binary, st.sampled_from(["+", "-", "*", "/"]), children, children),
        st.builds(Power, children, st.integers(min_value=-3, max_value=4)),
        st.builds(Call, st.sampled_from(["sin", "cos", "sqrt"]), children),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@given(trees)
@settings(max_examples=300, deadline=None)
def test_printing_is_canonical(tree):
    text = to_text(tree)
    assert to_text(parse_expression(text)) == text


@given(trees)
@settings(max_examples=100, deadline=None)
def test_printed_tree_keeps_its_names(tree):
    assert names_in(parse_expression(to_text(tree))) == names_in(tree)


class TestParsing:
    def test_precedence(self):
        f = compile_expression("1+2*x^2", CHART)
        assert f([3.0, 0.0]) == 19.0

    def test_left_associative(self):
        assert evaluate_constant("8-4-2") == 2.0
        assert evaluate_constant("8/4/2") == 1.0

    def test_unary_binds_below_power(self):
        assert evaluate_constant("-2^2") == -4.0
        assert evaluate_constant("(-2)^2") == 4.0

    def test_negative_exponent(self):
        assert evaluate_constant("2^-2") == 0.25

    def test_parameters(self):
        f = compile_expression("(1+y^2)*p/mu", Chart.build("yp", ["y", "p"]), {"mu": 2.0})
        assert f([1.0, 3.0]) == 3.0

    def test_derivatives(self):
        f = compile_expression("sin(x)*y", CHART)
        jet = f.jet([0.5, 2.0])
        np.testing.assert_allclose(jet.grad, [2.0 * math.cos(0.5), math.sin(0.5)])
        np.testing.assert_allclose(jet.hess, [[-2.0 * math.sin(0.5), math.cos(0.5)],
                                              [math.cos(0.5), 0.0]])

    def test_sqrt_of_expression(self):
        assert evaluate_constant("sqrt(mu)", {"mu": 4.0}) == 2.0


class TestErrors:
    @pytest.mark.parametrize("src, offset", [
        ("1+", 2),
        ("x*(y", 4),
        ("x^1.5", 2),
        ("x $ y", 2),
        ("", 0),
        ("foo(x)", 0),
        ("sin", 0),
        ("x y", 2),
    ])
    def test_offsets(self, src, offset):
        with pytest.raises(ExpressionError) as info:
            parse_expression(src)
        assert info.value.offset == offset

    def test_unknown_identifier(self):
        with pytest.raises(ExpressionError) as info:
            compile_expression("x+w", CHART)
        assert info.value.offset == 2
        assert "w" in str(info.value)

    def test_constant_with_coordinate(self):
        with pytest.raises(ExpressionError) as info:
            evaluate_constant("2*mu+x", {"mu": 1.0})
        assert info.value.offset == 5

    def test_not_text(self):
        with pytest.raises(ExpressionError):
            parse_expression(3.0)
