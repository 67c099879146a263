"""Nonholonomic data on the particle with dz = y dx"""

import numpy as np
import pytest

from dirac_kit import systems_catalog
from dirac_kit.dirac_core import check_characteristic_identities, check_lagrangian, characteristic_spaces
from dirac_kit.errors import DimensionError, InadmissibleError
from dirac_kit.expressions import compile_expression
from dirac_kit.nonholonomic import (check_conserved_annihilate_DG, check_conserved_on_leaf,
                                    check_constraint_independence, check_dg_characterization, check_metric,
                                    check_momentum_identity, check_omega_h_nondegenerate, check_reaction_lemma,
                                    check_rplusv, check_u_pairs, conserved_criterion, hamiltonian_on_M,
                                    horizontal_H, is_involutive_DG, leaf_reduce, legendre, legendre_inverse,
                                    lift_action, momentum_components, momentum_function, optimal_distribution_DG,
                                    reaction_codistribution_R)
from dirac_kit.nonholonomic.leaves import _induced_on_g1
from dirac_kit.nonholonomic.mechanics import _null_rows
from dirac_kit.sampling import draw_points
from dirac_kit.subspace_lab import Subspace, equals, span

POINT = np.array([0.3, -0.8, 1.1, 0.6, -0.4])      # x, y, z, p_x, p_y


@pytest.fixture(scope="module")
def action(particle):
    return particle.actions["R2"].action


@pytest.fixture(scope="module")
def points(particle):
    return draw_points(particle.phase.m_chart, 3, 0)


def test_chart_of_the_constraint_manifold(particle):
    phase = particle.phase
    assert phase.m_chart.coords == ("x", "y", "z", "p_x", "p_y")
    assert phase.eliminated == ("p_z",)
    p_z = phase.eliminated_expressions()["p_z"]
    assert p_z(POINT) == pytest.approx(POINT[1] * POINT[3])


def test_mechanical_checks(particle):
    q_points = draw_points(particle.system.q_chart, 3, 0)
    assert check_metric(particle.system, q_points)
    assert check_constraint_independence(particle.system, q_points)
    q, v = np.array([0.1, 0.2, 0.3]), np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(legendre_inverse(particle.system, q, legendre(particle.system, q, v)), v)


def test_horizontal_space_uses_the_given_tolerance(particle):
    matrix = np.array([[1.0, 0.0, 0.0], [0.0, 1e-7, 0.0]])
    assert len(_null_rows(matrix, 1e-6)) == 2
    assert len(_null_rows(matrix, 1e-12)) == 1
    assert horizontal_H(particle.phase, POINT, 1e-6).dim == 4


def test_dirac_structure_on_M(particle, points):
    D = particle.D
    assert check_lagrangian(D, points)
    assert check_characteristic_identities(D, points)
    assert check_omega_h_nondegenerate(particle.phase, points)
    spaces = characteristic_spaces(D, POINT)
    assert spaces.G1.dim == 4
    assert equals(spaces.G1, horizontal_H(particle.phase, POINT))


def test_hamiltonian(particle):
    x, y, z, px, py = POINT
    expected = ((1 + y ** 2) * px ** 2 + py ** 2) / 2
    assert hamiltonian_on_M(particle.phase)(POINT) == pytest.approx(expected)
    assert particle.hamiltonian(POINT) == pytest.approx(expected)


class TestMomentum:
    def test_components(self, particle, action):
        J = momentum_components(particle.phase, action)
        assert J[0](POINT) == pytest.approx(POINT[3])
        assert J[1](POINT) == pytest.approx(POINT[1] * POINT[3])

    def test_linear_in_the_algebra(self, particle, action):
        J = momentum_function(particle.phase, action, [2.0, -1.0])
        assert J(POINT) == pytest.approx(2 * POINT[3] - POINT[1] * POINT[3])
        with pytest.raises(DimensionError):
            momentum_function(particle.phase, action, [1.0])

    def test_identity(self, particle, action, points):
        assert check_momentum_identity(particle.phase, action, points)

    def test_no_component_is_conserved(self, particle, action, points):
        assert not conserved_criterion(particle.phase, action, [1.0, 0.0], points)
        assert not conserved_criterion(particle.phase, action, [0.0, 1.0], points)


class TestSkateMomentum:
    @pytest.fixture(scope="class")
    def skate(self):
        return systems_catalog.load("chaplygin_skate")

    def test_positional_action_has_no_momentum_map(self, skate):
        action = skate.actions["SE2"].action
        assert not action.lifted
        with pytest.raises(InadmissibleError):
            momentum_function(skate.phase, action, [1.0, 0.0, 0.0])

    def test_lifted_rotation(self, skate):
        q_chart = skate.system.q_chart
        rotation = [compile_expression(c, q_chart) for c in ("1", "-y", "x")]
        action = lift_action(skate.phase, "SO2", [rotation])
        outcome = check_momentum_identity(skate.phase, action, draw_points(skate.phase.m_chart, 4, 0), 1e-9)
        assert outcome
        assert outcome.max_residual < 1e-9


class TestReaction:
    def test_reaction_is_the_constraint(self, particle, action):
        R = reaction_codistribution_R(particle.phase, action, POINT)
        y = POINT[1]
        assert equals(R, span([[-y, 0.0, 1.0, 0.0, 0.0]], 5))

    def test_decompositions(self, particle, action, points):
        assert check_rplusv(particle.phase, action, points)
        assert check_reaction_lemma(particle.phase, action, points)
        assert check_u_pairs(particle.D, particle.phase, action, points)


class TestOptimalDistribution:
    def test_rank(self, particle, action):
        assert optimal_distribution_DG(particle.phase, action, POINT).dim == 4

    def test_characterization_and_involutivity(self, particle, action, points):
        assert check_dg_characterization(particle.D, particle.phase, action, points)
        assert is_involutive_DG(particle.phase, action, points)

    def test_conserved_function_annihilates(self, particle, action, points):
        f = compile_expression("sqrt(1+y^2)*p_x", particle.phase.m_chart)
        assert check_conserved_annihilate_DG(particle.phase, action, [f], points)
        g = compile_expression("p_x", particle.phase.m_chart)
        assert not check_conserved_annihilate_DG(particle.phase, action, [g], points)


def test_leaf(particle):
    leaf = particle.actions["R2"].leaf
    leaf_points = draw_points(leaf.chart, 3, 0)
    assert check_conserved_on_leaf(leaf, leaf_points)
    restricted, D_rho = leaf_reduce(particle.D, leaf)
    assert D_rho is not None
    assert restricted.fiber(leaf_points[0]).dim == leaf.chart.dim
    assert D_rho.fiber(np.array([0.5, -0.2])).dim == 2


def test_induced_form_on_a_zero_space(particle):
    assert _induced_on_g1(particle.D, POINT, Subspace(5, [])).shape == (0, 0)
