import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirac_kit.errors import ChartMismatchError, DimensionError, InputError, JetOrderError
from dirac_kit.expressions import compile_expression
from dirac_kit.jet_calculus import (Bivector, Chart, ChartMap, Jet2, OneForm, ScalarField, TwoForm,
                                    VectorField, compose, d_two_form_components, d_two_form_contract,
                                    default_interval, exterior_derivative_one_form, jsqrt, kernel_frame,
                                    lie_bracket, lie_derivative_one_form, pullback, stencil_jets)

finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)


@pytest.fixture
def xyz():
    return Chart.build("xyz", ["x", "y", "z"])


def field(chart, *components):
    return VectorField.from_components(chart, [compile_expression(c, chart) for c in components])


class TestJets:
    def test_product_rule(self):
        x = Jet2.variable(0, 2.0, 2)
        y = Jet2.variable(1, 3.0, 2)
        j = x * y
        assert j.value == 6.0
        np.testing.assert_allclose(j.grad, [3.0, 2.0])
        np.testing.assert_allclose(j.hess, [[0.0, 1.0], [1.0, 0.0]])

    def test_derivative_drops_an_order(self):
        x = Jet2.variable(0, 1.5, 1)
        cube = x ** 3
        assert cube.order == 2
        d = cube.derivative(0)
        assert d.order == 1
        assert d.value == pytest.approx(3 * 1.5 ** 2)
        assert d.derivative(0).value == pytest.approx(6 * 1.5)
        with pytest.raises(JetOrderError):
            d.derivative(0).derivative(0)

    def test_arithmetic_errors(self):
        zero = Jet2.constant(0.0, 1)
        with pytest.raises(ZeroDivisionError):
            zero.reciprocal()
        with pytest.raises(ValueError):
            Jet2.variable(0, 2.0, 1) ** 0.5
        with pytest.raises(ValueError):
            jsqrt(Jet2.variable(0, -1.0, 1))

    @given(finite, finite)
    @settings(max_examples=50, deadline=None)
    def test_compose_matches_direct_evaluation(self, a, b):
        # f(u, v) = u^2 v at (u, v) = (sin x, x + y)
        x, y = Jet2.variable(0, a, 2), Jet2.variable(1, b, 2)
        u = Jet2(np.sin(a), np.array([np.cos(a), 0.0]), np.array([[-np.sin(a), 0.0], [0.0, 0.0]]))
        v = x + y
        outer = Jet2.variable(0, u.value, 2) ** 2 * Jet2.variable(1, v.value, 2)
        direct = u * u * v
        composed = compose(outer, [u, v])
        assert composed.value == pytest.approx(direct.value)
        np.testing.assert_allclose(composed.grad, direct.grad, atol=1e-12)
        np.testing.assert_allclose(composed.hess, direct.hess, atol=1e-12)

    def test_stencil_matches_analytic_gradient(self):
        point = np.array([0.3, -0.7])
        jets = stencil_jets(lambda p: np.array([np.sin(p[0]) * p[1], p[0] ** 2]), point, np.array([1e-3, 1e-3]))
        np.testing.assert_allclose(jets[0].grad, [np.cos(0.3) * -0.7, np.sin(0.3)], atol=1e-10)
        np.testing.assert_allclose(jets[1].grad, [0.6, 0.0], atol=1e-10)
        assert jets[0].order == 1


class TestCharts:
    def test_default_intervals(self):
        assert default_interval("x") == (-2.0, 2.0)
        lo, hi = default_interval("theta")
        assert lo == 0.0 and hi == pytest.approx(2 * np.pi)

    def test_unknown_coordinate(self, xyz):
        with pytest.raises(InputError):
            xyz.index("w")

    def test_malformed_charts(self):
        with pytest.raises(InputError):
            Chart.build("dup", ["x", "x"])
        with pytest.raises(InputError):
            Chart.build("empty", ["x"], {"x": [1.0, 1.0]})


class TestFields:
    def test_component_count(self, xyz):
        with pytest.raises(DimensionError):
            VectorField.from_components(xyz, [1.0, 2.0])

    def test_chart_mismatch(self, xyz):
        other = Chart.build("uvw", ["u", "v", "w"])
        with pytest.raises(ChartMismatchError):
            ScalarField.coordinate(xyz, "x") + ScalarField.coordinate(other, "u")

    def test_contraction_convention(self, plane):
        omega = TwoForm.from_upper(plane, {("q", "p"): 1.0})
        p = np.array([0.1, 0.2])
        np.testing.assert_allclose(omega.contract(VectorField.basis(plane, "q")).at(p), [0.0, 1.0])
        np.testing.assert_allclose(omega.contract(VectorField.basis(plane, "p")).at(p), [-1.0, 0.0])

    def test_sharp_convention(self, plane):
        pi = Bivector.from_upper(plane, {("q", "p"): 1.0})
        p = np.array([0.1, 0.2])
        np.testing.assert_allclose(pi.sharp(OneForm.basis(plane, "q")).at(p), [0.0, 1.0])

    def test_wedge_and_evaluate(self, xyz):
        dx, dy = OneForm.basis(xyz, "x"), OneForm.basis(xyz, "y")
        omega = TwoForm.wedge(dx, dy)
        X, Y = VectorField.basis(xyz, "x"), VectorField.basis(xyz, "y")
        p = np.zeros(3)
        assert omega.evaluate(X, Y)(p) == 1.0
        assert omega.evaluate(Y, X)(p) == -1.0

    def test_differential(self, xyz):
        f = compile_expression("x*y+z^2", xyz)
        np.testing.assert_allclose(f.differential().at([1.0, 2.0, 3.0]), [2.0, 1.0, 6.0])


class TestCalculus:
    def test_lie_bracket_of_coordinate_fields(self, xyz):
        bracket = lie_bracket(VectorField.basis(xyz, "x"), field(xyz, "0", "x", "0"))
        np.testing.assert_allclose(bracket.at([0.4, 0.5, 0.6]), [0.0, 1.0, 0.0])

    def test_jacobi_identity(self, xyz):
        X = field(xyz, "y*z", "sin(x)", "x^2")
        Y = field(xyz, "1+y^2", "x*z", "cos(z)")
        Z = field(xyz, "z", "x*y^2", "sqrt(1+x^2)")
        p = np.array([0.3, -1.1, 0.8])
        total = (lie_bracket(X, lie_bracket(Y, Z)).at(p) + lie_bracket(Y, lie_bracket(Z, X)).at(p)
                 + lie_bracket(Z, lie_bracket(X, Y)).at(p))
        np.testing.assert_allclose(total, 0.0, atol=1e-10)

    def test_exterior_derivative(self, xyz):
        alpha = OneForm.from_components(xyz, [0.0, ScalarField.coordinate(xyz, "x"), 0.0])
        d_alpha = exterior_derivative_one_form(alpha)
        np.testing.assert_allclose(d_alpha.at(np.zeros(3))[0, 1], 1.0)
        np.testing.assert_allclose(d_alpha.at(np.zeros(3))[1, 0], -1.0)

    def test_d_squared_vanishes(self, xyz):
        alpha = OneForm.from_components(xyz, [compile_expression(c, xyz)
                                              for c in ("x*y*z", "sin(x)*z^2", "cos(y)+x^3")])
        d_alpha = exterior_derivative_one_form(alpha)
        np.testing.assert_allclose(d_two_form_components(d_alpha, [0.2, 0.4, -0.6]), 0.0, atol=1e-12)

    def test_coordinate_and_invariant_d_agree(self, xyz):
        omega = TwoForm.from_upper(xyz, {("x", "y"): compile_expression("z*x", xyz),
                                         ("y", "z"): compile_expression("y^2", xyz)})
        X, Y, Z = (VectorField.basis(xyz, c) for c in ("x", "y", "z"))
        p = np.array([0.5, 0.7, -0.3])
        assert d_two_form_contract(omega, X, Y, Z, p) == pytest.approx(d_two_form_components(omega, p)[0, 1, 2])

    def test_cartan_formula_on_exact_form(self, xyz):
        f = compile_expression("x^2*y", xyz)
        X = field(xyz, "z", "1", "x")
        # £_X df = d(X[f])
        lhs = lie_derivative_one_form(X, f.differential()).at([0.1, 0.2, 0.3])
        rhs = X.apply(f).differential().at([0.1, 0.2, 0.3])
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_pullback_of_one_form(self, plane):
        line = Chart.build("line", ["t"])
        curve = ChartMap.from_components(line, plane, [compile_expression("t^2", line),
                                                        compile_expression("t", line)])
        pulled = pullback(curve, OneForm.basis(plane, "q"))
        np.testing.assert_allclose(pulled.at([1.5]), [3.0])

    def test_kernel_frame(self, xyz):
        phi = OneForm.from_components(xyz, [compile_expression("-y", xyz), 0.0, 1.0])
        frame = kernel_frame(xyz, [phi])
        p = np.array([0.3, 0.9, -0.2])
        assert len(frame) == 2
        for X in frame:
            assert phi.pair(X)(p) == pytest.approx(0.0, abs=1e-12)
