import numpy as np
import pytest

from dirac_kit.dirac_core import dirac_poisson_bracket, graph_of_two_form
from dirac_kit.errors import ChartMismatchError, DimensionError, RankError
from dirac_kit.jet_calculus import Chart, ChartMap, ScalarField, TwoForm, VectorField
from dirac_kit.sampling import draw_points
from dirac_kit.symmetry_reduction import (QuotientChart, SymmetryAction, check_anti_homomorphism,
                                          check_closedness_preserved, check_dirac_invariance, check_freeness,
                                          check_quotient, check_right_inverse_independence, d_cap_k_perp,
                                          is_descending_field, reduce_dirac, reduced_fiber, verify_method_b,
                                          vertical_space)


@pytest.fixture(scope="module")
def cotangent_plane():
    """T*R^2 with canonical D, translations in q1 and the quotient (q2, p1, p2)"""
    chart = Chart.build("T*R2", ["q1", "q2", "p1", "p2"])
    D = graph_of_two_form(chart, [], TwoForm.from_upper(chart, {("q1", "p1"): 1.0, ("q2", "p2"): 1.0}), "D")
    action = SymmetryAction("R", chart, [VectorField.basis(chart, "q1")])
    reduced = Chart.build("T*R2/R", ["q2", "p1", "p2"])
    coord = ScalarField.coordinate
    projection = ChartMap.from_components(chart, reduced, [coord(chart, c) for c in ("q2", "p1", "p2")])
    slice_map = ChartMap.from_components(reduced, chart, [ScalarField.constant(reduced, 0.0)]
                                         + [coord(reduced, c) for c in ("q2", "p1", "p2")])
    quotient = QuotientChart(reduced, projection, slice_map, ["q2", "p1", "p2"])
    return chart, D, action, quotient


@pytest.fixture(scope="module")
def samples(cotangent_plane):
    chart, _, _, quotient = cotangent_plane
    return draw_points(chart, 3, 0), draw_points(quotient.reduced_chart, 3, 1)


def test_action_checks(cotangent_plane, samples):
    chart, D, action, quotient = cotangent_plane
    points, reduced_points = samples
    assert check_freeness(action, points)
    assert check_anti_homomorphism(action, points)
    assert check_quotient(action, quotient, points, reduced_points)
    assert check_dirac_invariance(D, action, points)
    assert vertical_space(action, points[0]).dim == 1


def test_reduced_structure(cotangent_plane, samples):
    chart, D, action, quotient = cotangent_plane
    points, reduced_points = samples
    pairs, report = d_cap_k_perp(D, action, points)
    assert report.rank == 3
    D_red = reduce_dirac(D, action, quotient)
    assert reduced_fiber(D, action, quotient, reduced_points[0]).dim == 3
    assert verify_method_b(D, action, quotient, D_red, reduced_points)
    assert check_closedness_preserved(D, D_red, points, reduced_points)
    assert check_right_inverse_independence(D, action, quotient, reduced_points, np.random.default_rng(5))


def test_reduced_brackets(cotangent_plane, samples):
    _, D, action, quotient = cotangent_plane
    _, reduced_points = samples
    D_red = reduce_dirac(D, action, quotient)
    reduced = quotient.reduced_chart
    q2, p1, p2 = (ScalarField.coordinate(reduced, c) for c in ("q2", "p1", "p2"))
    point = reduced_points[0]
    assert dirac_poisson_bracket(D_red, q2, p2, point) == pytest.approx(1.0, abs=1e-8)
    # the momentum of the quotiented translation is a Casimir
    assert dirac_poisson_bracket(D_red, p1, q2, point) == pytest.approx(0.0, abs=1e-8)
    assert dirac_poisson_bracket(D_red, p1, p2, point) == pytest.approx(0.0, abs=1e-8)


def test_rotation_does_not_descend_translations(cotangent_plane, samples):
    chart, _, action, _ = cotangent_plane
    points, _ = samples
    assert is_descending_field(VectorField.basis(chart, "q2"), action, points)
    rotation = VectorField.from_components(chart, [-ScalarField.coordinate(chart, "q2"),
                                                   ScalarField.coordinate(chart, "q1"), 0.0, 0.0])
    assert not is_descending_field(rotation, action, points)


def test_action_that_is_not_free(cotangent_plane):
    chart = cotangent_plane[0]
    q1 = ScalarField.coordinate(chart, "q1")
    action = SymmetryAction("scaling", chart, [VectorField.from_components(chart, [q1, 0.0, 0.0, 0.0])])
    with pytest.raises(RankError):
        vertical_space(action, np.zeros(4))
    assert not check_freeness(action, [np.zeros(4)])


def test_wrong_structure_constants(cotangent_plane, samples):
    chart = cotangent_plane[0]
    constants = np.zeros((2, 2, 2))
    constants[0, 1, 0], constants[1, 0, 0] = 1.0, -1.0
    action = SymmetryAction("R2", chart, [VectorField.basis(chart, "q1"), VectorField.basis(chart, "q2")],
                            constants)
    assert not check_anti_homomorphism(action, samples[0])
    with pytest.raises(DimensionError):
        SymmetryAction("bad", chart, [VectorField.basis(chart, "q1")], np.zeros((2, 2, 2)))


def test_quotient_charts_must_line_up(cotangent_plane):
    chart, _, _, quotient = cotangent_plane
    with pytest.raises(ChartMismatchError):
        QuotientChart(chart, quotient.projection, quotient.slice)
    identity = QuotientChart.identity(chart)
    assert identity.reduced_chart.same_as(chart)
