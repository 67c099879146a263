"""Nonholonomic systems as Dirac structures on the constraint phase space"""

from .leaves import (LeafData, ReducedHorizontalForm, check_conserved_on_leaf,
                     check_graph_of_nondegenerate_form, check_leaf_two_form, check_omega_hbar,
                     leaf_reduce, reduced_h_bar_omega)
from .mechanics import (ConstraintPhase, MechanicalSystem, build_constraint_phase, check_constraint_independence,
                        check_constraint_membership, check_full_p1_trivial_g0, check_metric,
                        check_omega_h_nondegenerate, choose_eliminated, constraint_forms_on_M,
                        hamiltonian_on_M, horizontal_frame, horizontal_H, legendre, legendre_inverse,
                        momentum_name, nonholonomic_dirac, omega_M)
from .momentum import (check_hv_constant_rank, check_lift_tangency, check_momentum_identity,
                       check_noether_pair_in_D, check_noether_residuals, check_section_in_g_H,
                       g_H_fiber, lift_action, momentum_component, momentum_components,
                       momentum_function, noether_expanded_form, noether_one_form, noether_residual,
                       section_field)
from .reaction import (check_completion_uniqueness, check_conserved_annihilate_DG,
                       check_dg_characterization, check_reaction_lemma, check_rplusv, check_u_pairs,
                       conserved_criterion, dg_form_characterization, horizontal_annihilator_U,
                       is_involutive_DG, optimal_distribution_DG, reaction_codistribution_R)

__all__ = [
    "MechanicalSystem", "ConstraintPhase", "legendre", "legendre_inverse", "momentum_name",
    "choose_eliminated", "build_constraint_phase", "omega_M", "constraint_forms_on_M",
    "horizontal_frame", "horizontal_H", "nonholonomic_dirac", "hamiltonian_on_M",
    "check_metric", "check_constraint_independence", "check_constraint_membership",
    "check_omega_h_nondegenerate", "check_full_p1_trivial_g0",
    "lift_action", "check_lift_tangency", "momentum_function", "momentum_component",
    "momentum_components", "check_momentum_identity", "check_hv_constant_rank", "g_H_fiber",
    "section_field", "noether_one_form", "noether_expanded_form", "check_section_in_g_H",
    "check_noether_pair_in_D", "noether_residual", "check_noether_residuals",
    "horizontal_annihilator_U", "reaction_codistribution_R", "check_u_pairs", "check_rplusv",
    "check_reaction_lemma", "conserved_criterion", "check_completion_uniqueness",
    "optimal_distribution_DG", "dg_form_characterization", "check_dg_characterization",
    "is_involutive_DG", "check_conserved_annihilate_DG",
    "ReducedHorizontalForm", "reduced_h_bar_omega", "check_omega_hbar", "LeafData", "leaf_reduce",
    "check_conserved_on_leaf", "check_graph_of_nondegenerate_form", "check_leaf_two_form",
]
