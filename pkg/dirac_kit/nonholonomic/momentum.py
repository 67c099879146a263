"""
Actions on M from generators on Q, momentum maps and the nonholonomic Noether forms.

A generator ξ_Q = Σ ξ^a ∂_{q_a} is carried to M either as its cotangent lift

    ξ_M = Σ ξ^a ∂_{q_a} − Σ_{a free} (Σ_b P_b ∂_a ξ^b) ∂_{p_a}

or positionally (momentum components zero). Only the lift has J^ξ = ⟨P, ξ_Q⟩ as a
momentum map; the positional form is kept for systems written that way.
"""

from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from ..dirac_core import PairBundle, hamiltonian_vector
from ..errors import DimensionError, InadmissibleError, RankError
from ..jet_calculus import Jet2, OneForm, ScalarField, VectorField, compose
from ..outcomes import CheckOutcome, ResidualTracker
from ..subspace_lab import DEFAULT_TOL, Subspace, intersect, preimage, subspace_sum
from ..symmetry_reduction import SymmetryAction, vertical_space
from .mechanics import ConstraintPhase, _phase_jets, horizontal_H, omega_M


def lift_action(phase: ConstraintPhase, name: str, q_generators: Sequence[Sequence[ScalarField]],
                structure_constants: Optional[np.ndarray] = None, lift: bool = True) -> SymmetryAction:
    """The action on M generated by vector fields on Q"""
    system = phase.system
    d, n = phase.d, phase.n
    for xi in q_generators:
        if len(xi) != d:
            raise DimensionError(f"{name}: generator with {len(xi)} components on a {d}-dim Q")
    free_index = [system.momenta.index(p) for p in phase.free]

    def generator(xi):
        def fn(p):
            q_inner = phase.q_jets(p)
            q = p[:d]
            position = [compose(c.jet(q), q_inner) for c in xi]
            if not lift:
                return position + [Jet2.constant(0.0, n) for _ in free_index]
            P = _phase_jets(phase, p)["P"]
            momentum = []
            for a in free_index:
                acc = Jet2.constant(0.0, n)
                for b in range(d):
                    acc = acc - P[b] * position[b].derivative(a)
                momentum.append(acc)
            return position + momentum

        return VectorField(phase.m_chart, fn)

    generators = [generator(list(xi)) for xi in q_generators]
    return SymmetryAction(name, phase.m_chart, generators, structure_constants,
                          [list(xi) for xi in q_generators], lift)


def check_lift_tangency(phase: ConstraintPhase, action: SymmetryAction, points: Sequence[np.ndarray],
                        tol: float = DEFAULT_TOL) -> CheckOutcome:
    """The cotangent lift on T*Q is tangent to M and pushes forward from ξ_M"""
    _require_q_generators(action)
    d = phase.d
    tracker = ResidualTracker(tol)
    for m in points:
        image = phase.embedding(m)
        q, p = image[:d], image[d:]
        jac = phase.embedding.jacobian(m)
        for a, (xi_q, xi_m) in enumerate(zip(action.q_generators, action.generators)):
            jets = [c.jet(q) for c in xi_q]
            position = np.array([j.value for j in jets])
            momentum = -np.array([sum(p[b] * jets[b].grad[c] for b in range(d)) for c in range(d)])
            full = np.concatenate([position, momentum])
            pushed = jac @ xi_m.at(m)
            tracker.record(np.linalg.norm(pushed - full) / max(1.0, np.linalg.norm(full)), m, f"ξ{a}")
    return tracker.outcome()


def _require_q_generators(action: SymmetryAction):
    if action.q_generators is None:
        raise InadmissibleError(f"action {action.name!r} has no generators on Q, so no momentum map")


def _require_lift(action: SymmetryAction):
    _require_q_generators(action)
    if not action.lifted:
        raise InadmissibleError(f"action {action.name!r} is positional, not a cotangent lift; "
                                f"J^ξ is only a momentum map for the lift")


# ---------------------------------------------------------------------------
# momentum map
# ---------------------------------------------------------------------------

def momentum_function(phase: ConstraintPhase, action: SymmetryAction,
                      coefficients: Sequence[float]) -> ScalarField:
    """J^ξ = ⟨P, ξ_Q⟩ on M for ξ = Σ c_i e_i"""
    _require_lift(action)
    if len(coefficients) != action.k:
        raise DimensionError(f"{len(coefficients)} coefficients for {action.k} generators")
    d, n = phase.d, phase.n
    coefficients = [float(c) for c in coefficients]

    def fn(p):
        q_inner = phase.q_jets(p)
        q = p[:d]
        P = _phase_jets(phase, p)["P"]
        acc = Jet2.constant(0.0, n)
        for c, xi in zip(coefficients, action.q_generators):
            if c == 0.0:
                continue
            for b in range(d):
                acc = acc + P[b] * compose(xi[b].jet(q), q_inner).scaled(c)
        return acc

    return ScalarField(phase.m_chart, fn, f"J{coefficients}")


def momentum_component(phase: ConstraintPhase, action: SymmetryAction, coefficients: Sequence[float],
                       point) -> float:
    return momentum_function(phase, action, coefficients)(point)


def momentum_components(phase: ConstraintPhase, action: SymmetryAction) -> List[ScalarField]:
    """J^{e_i} for the basis of the algebra"""
    return [momentum_function(phase, action, row) for row in np.eye(action.k)]


def check_momentum_identity(phase: ConstraintPhase, action: SymmetryAction, points: Sequence[np.ndarray],
                            tol: float = 1e-8) -> CheckOutcome:
    """i_{ξ_M} ω_M = dJ^ξ for every generator"""
    omega = omega_M(phase)
    J = momentum_components(phase, action)
    tracker = ResidualTracker(tol)
    for m in points:
        w = omega.at(m)
        for a, xi in enumerate(action.generators):
            contracted = w.T @ xi.at(m)
            dJ = J[a].jet(m).grad
            tracker.record(np.linalg.norm(contracted - dJ) / max(1.0, np.linalg.norm(dJ)), m,
                           f"i_ξ{a} ω − dJ")
    return tracker.outcome()


# ---------------------------------------------------------------------------
# 𝔤^ℋ and Noether forms
# ---------------------------------------------------------------------------

def hv_spaces(phase: ConstraintPhase, action: SymmetryAction, point, tol: float = DEFAULT_TOL):
    """(ℋ, 𝒱) at point"""
    return horizontal_H(phase, point, tol), vertical_space(action, point)


def check_hv_constant_rank(phase: ConstraintPhase, action: SymmetryAction,
                           points: Sequence[np.ndarray]) -> CheckOutcome:
    """rank(ℋ + 𝒱) is the same at every sample; raises RankError otherwise"""
    first = None
    for p in points:
        H, V = hv_spaces(phase, action, p)
        dim = subspace_sum(H, V).dim
        if first is None:
            first = (p, dim)
        elif dim != first[1]:
            raise RankError(f"rank(ℋ + 𝒱) is {first[1]} at one point and {dim} at another",
                            stage="g_H_fiber", points=[first[0], p])
    outcome = CheckOutcome.passed()
    outcome.notes["rank"] = first[1] if first else None
    return outcome


def g_H_fiber(phase: ConstraintPhase, action: SymmetryAction, point) -> Subspace:
    """𝔤^m = {ξ : ξ_M(m) ∈ 𝒱 ∩ ℋ}"""
    H, V = hv_spaces(phase, action, point)
    return preimage(action.generator_matrix(point), intersect(V, H))


def section_field(action: SymmetryAction, coefficients: Sequence[ScalarField]) -> VectorField:
    """𝝃 = Σ f_i ξⁱ_M"""
    if len(coefficients) != action.k:
        raise DimensionError(f"{len(coefficients)} section coefficients for {action.k} generators")
    total = VectorField.zero(action.chart)
    for f, xi in zip(coefficients, action.generators):
        total = total + xi * f
    return total


def noether_one_form(phase: ConstraintPhase, action: SymmetryAction,
                     coefficients: Sequence[ScalarField]) -> OneForm:
    """i_𝝃 ω_M"""
    return omega_M(phase).contract(section_field(action, coefficients))


def noether_expanded_form(phase: ConstraintPhase, action: SymmetryAction,
                          coefficients: Sequence[ScalarField]) -> OneForm:
    """Σ f_i dJ^{ξⁱ}; equal to i_𝝃 ω_M for a lifted action"""
    J = momentum_components(phase, action)
    total = OneForm.zero(phase.m_chart)
    for f, j in zip(coefficients, J):
        total = total + j.differential() * f
    return total


def check_section_in_g_H(phase: ConstraintPhase, action: SymmetryAction,
                         coefficients: Sequence[ScalarField], points: Sequence[np.ndarray],
                         tol: float = DEFAULT_TOL) -> CheckOutcome:
    """f(m) ∈ 𝔤^m at every sample"""
    tracker = ResidualTracker(tol)
    for m in points:
        fiber = g_H_fiber(phase, action, m)
        tracker.record(fiber.residual([f(m) for f in coefficients]), m, "f ∈ 𝔤^m")
    return tracker.outcome()


def check_noether_pair_in_D(D: PairBundle, phase: ConstraintPhase, action: SymmetryAction,
                            coefficients: Sequence[ScalarField], points: Sequence[np.ndarray],
                            tol: float = DEFAULT_TOL) -> CheckOutcome:
    """(𝝃, Σ f_i dJ^i) ∈ D"""
    field = section_field(action, coefficients)
    form = noether_expanded_form(phase, action, coefficients)
    tracker = ResidualTracker(tol)
    for m in points:
        tracker.record(D.fiber(m).residual(np.concatenate([field.at(m), form.at(m)])), m, "(𝝃, α) ∈ D")
    return tracker.outcome()


def check_hamiltonian_invariance(action: SymmetryAction, H: ScalarField, point,
                                 tol: float = DEFAULT_TOL) -> float:
    """max |dH(ξ^a_M)|; raises InadmissibleError above tol"""
    dh = H.jet(point).grad
    worst = max((abs(float(dh @ xi.at(point))) for xi in action.generators), default=0.0)
    if worst > tol * max(1.0, np.linalg.norm(dh)):
        raise InadmissibleError(f"H is not invariant under {action.name!r} (|dH(ξ)| = {worst:.3e}) "
                                f"at {np.round(point, 6)}")
    return worst


def noether_residual(phase: ConstraintPhase, D: PairBundle, action: SymmetryAction, H: ScalarField,
                     coefficients: Sequence[ScalarField], point, tol: float = DEFAULT_TOL) -> float:
    """dJ^{ξ^ℋ}(X_H) − J^{X_H[ξ^ℋ]} at point, for an invariant H"""
    check_hamiltonian_invariance(action, H, point, tol * 10)
    J = momentum_components(phase, action)
    x_h, _ = hamiltonian_vector(D, H.jet(point).grad, point)
    total = sum((f * j for f, j in zip(coefficients, J)), ScalarField.constant(phase.m_chart, 0.0))
    along = float(total.jet(point).grad @ x_h)
    correction = sum(float(f.jet(point).grad @ x_h) * j(point) for f, j in zip(coefficients, J))
    return along - correction


def check_noether_residuals(phase: ConstraintPhase, D: PairBundle, action: SymmetryAction,
                            H: ScalarField, sections: Sequence[Sequence[ScalarField]],
                            points: Sequence[np.ndarray], tol: float = 1e-8) -> CheckOutcome:
    tracker = ResidualTracker(tol)
    for m in points:
        for s, coefficients in enumerate(sections):
            try:
                residual = noether_residual(phase, D, action, H, coefficients, m)
            except InadmissibleError as exc:
                logger.debug(str(exc))
                tracker.fail(m, f"section {s}: {exc}")
                continue
            tracker.record(abs(residual), m, f"section {s}")
    return tracker.outcome()
