import numpy as np
import pytest

from dirac_kit.dirac_core import (PontryaginSection, SampledPairs, characteristic_spaces,
                                  check_characteristic_identities, check_lagrangian, check_restriction_rank,
                                  compare_bundles, courant_axiom_residuals, courant_bracket, dirac_poisson_bracket,
                                  flat_round_trip, graph_of_bivector, graph_of_two_form, hamiltonian_vector,
                                  induced_bivector, induced_two_form, is_closed, pontryagin_pairing,
                                  restricted_fiber, solve_implicit_hamiltonian)
from dirac_kit.errors import ChartMismatchError, DimensionError, InadmissibleError, RankError
from dirac_kit.expressions import compile_expression
from dirac_kit.jet_calculus import Bivector, Chart, ChartMap, OneForm, ScalarField, TwoForm, VectorField
from dirac_kit.sampling import draw_points
from dirac_kit.subspace_lab import annihilator, equals, span

POINT = np.array([0.4, -0.3])


@pytest.fixture
def xyz():
    return Chart.build("xyz", ["x", "y", "z"])


def test_pairing_is_symmetric():
    a, b = np.array([1.0, 2.0, 3.0, 4.0]), np.array([-1.0, 0.5, 2.0, 1.0])
    assert pontryagin_pairing(a, b) == pontryagin_pairing(b, a) == pytest.approx(3.0)
    with pytest.raises(DimensionError):
        pontryagin_pairing([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])


def test_sections_share_a_chart(plane, xyz):
    with pytest.raises(ChartMismatchError):
        PontryaginSection(VectorField.zero(plane), OneForm.zero(xyz))


class TestCanonicalStructure:
    def test_lagrangian(self, canonical, plane):
        points = draw_points(plane, 5, 0)
        assert check_lagrangian(canonical, points)
        assert check_characteristic_identities(canonical, points)
        assert flat_round_trip(canonical, POINT)

    def test_characteristics(self, canonical):
        spaces = characteristic_spaces(canonical, POINT)
        assert (spaces.G0.dim, spaces.G1.dim, spaces.P0.dim, spaces.P1.dim) == (0, 2, 0, 2)

    def test_induced_forms(self, canonical):
        omega = induced_two_form(canonical, POINT)
        np.testing.assert_allclose(omega, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-12)
        np.testing.assert_allclose(induced_bivector(canonical, POINT) @ omega, np.eye(2), atol=1e-12)

    def test_bracket_sign(self, canonical, plane):
        q, p = ScalarField.coordinate(plane, "q"), ScalarField.coordinate(plane, "p")
        assert dirac_poisson_bracket(canonical, q, p, POINT) == pytest.approx(1.0)
        assert dirac_poisson_bracket(canonical, p, q, POINT) == pytest.approx(-1.0)

    def test_hamiltonian_flow(self, canonical, plane):
        H = compile_expression("(q^2+p^2)/2", plane)
        solution = solve_implicit_hamiltonian(canonical, H, POINT)
        np.testing.assert_allclose(solution.vector, [POINT[1], -POINT[0]], atol=1e-12)
        assert solution.g0_dim == 0
        assert solution.energy_residual == pytest.approx(0.0, abs=1e-12)

    def test_closed(self, canonical, plane):
        assert is_closed(canonical, draw_points(plane, 3, 1))

    def test_sampled_copy_is_closed(self, canonical, plane):
        sampled = SampledPairs(plane, canonical.fiber, "sampled")
        assert len(sampled.local_sections(POINT)) == 2
        assert is_closed(sampled, draw_points(plane, 3, 2))
        assert compare_bundles(sampled, canonical, draw_points(plane, 3, 3))


def test_graph_of_non_closed_form_is_not_integrable(xyz):
    omega = TwoForm.from_upper(xyz, {("y", "z"): ScalarField.coordinate(xyz, "x")})
    D = graph_of_two_form(xyz, [], omega)
    points = draw_points(xyz, 4, 0)
    assert check_lagrangian(D, points)
    outcome = is_closed(D, points)
    assert not outcome
    assert outcome.witness is not None


def test_constrained_graph(xyz):
    phi = OneForm.from_components(xyz, [compile_expression("-y", xyz), 0.0, 1.0])
    D = graph_of_two_form(xyz, [phi], TwoForm.from_upper(xyz, {("x", "y"): 1.0}))
    p = np.array([0.2, 0.7, -0.1])
    spaces = characteristic_spaces(D, p)
    assert equals(spaces.P0, span([phi.at(p)], 3))
    assert equals(spaces.G1, annihilator(spaces.P0))
    with pytest.raises(RankError):
        induced_two_form(D, p)


def test_inadmissible_differential(plane):
    D = graph_of_bivector(plane, [VectorField.basis(plane, "q")], Bivector.zero(plane))
    with pytest.raises(InadmissibleError):
        hamiltonian_vector(D, np.array([1.0, 0.0]), POINT)
    v, g0 = hamiltonian_vector(D, np.array([0.0, 1.0]), POINT)
    assert g0.dim == 1
    np.testing.assert_allclose(v, 0.0, atol=1e-12)


def test_skew_bracket_drops_half_the_pairing(plane):
    a = PontryaginSection.from_vector(VectorField.basis(plane, "q"))
    b = PontryaginSection.from_form(OneForm.from_components(plane, [ScalarField.coordinate(plane, "q"), 0.0]))
    np.testing.assert_allclose(courant_bracket(a, b).at(POINT), [0.0, 0.0, 1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(courant_bracket(a, b, skew=True).at(POINT), [0.0, 0.0, 0.5, 0.0], atol=1e-12)


def test_courant_axioms(xyz):
    def section(vec, form):
        return PontryaginSection(
            VectorField.from_components(xyz, [compile_expression(c, xyz) for c in vec]),
            OneForm.from_components(xyz, [compile_expression(c, xyz) for c in form]))

    e1 = section(("y", "x*z", "1"), ("z^2", "0", "x"))
    e2 = section(("sin(z)", "0", "x*y"), ("y", "x^2", "0"))
    e3 = section(("1", "z", "0"), ("0", "cos(x)", "y*z"))
    f = compile_expression("x*y+z", xyz)
    residuals = courant_axiom_residuals(e1, e2, e3, f, [0.3, -0.5, 0.9])
    assert set(residuals) == {"jacobi", "anchor", "leibniz", "metric", "self_bracket"}
    assert max(residuals.values()) < 1e-9


def test_restriction_to_a_line(canonical, plane):
    line = Chart.build("line", ["t"])
    level = ChartMap.from_components(line, plane, [ScalarField.coordinate(line, "t"),
                                                   ScalarField.constant(line, 0.5)])
    fiber = restricted_fiber(canonical, level, np.array([0.3]))
    assert equals(fiber, span([[1.0, 0.0]], 2))
    outcome = check_restriction_rank(canonical, level, draw_points(line, 4, 0))
    assert outcome.notes["dim"] == 1
