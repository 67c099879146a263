"""
Horizontal annihilator 𝒰, reaction codistribution ℛ and the optimal distribution 𝒟_G.

All pointwise. With Ω = ω_M(m), Ξ the n × k generator matrix, Φ the rows of π*φ and
U a basis of 𝒰, the pairs of D ∩ K⊥ are (Uc, ΩᵀUc + Φᵀb) over the null space of

    [ΞᵀΩᵀU | ΞᵀΦᵀ] [c; b] = 0

and ℛ collects the corrections Φᵀb.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import scipy.linalg

from ..dirac_core import PairBundle, split_fiber
from ..jet_calculus import ScalarField, VectorField, frame_steps, lie_bracket, normalized_frame
from ..outcomes import CheckOutcome, ResidualTracker
from ..subspace_lab import (DEFAULT_TOL, ZERO_FLOOR, Subspace, annihilator, equals, intersect,
                            orthogonal_wrt_form, subspace_gap, subspace_sum)
from ..symmetry_reduction import SymmetryAction, d_cap_k_perp_fiber, vertical_space
from .mechanics import ConstraintPhase, horizontal_annihilator_basis, horizontal_H, omega_M


@dataclass
class PointData:
    """ω_M, ℋ, ℋ° rows, 𝒱 and the generator matrix at one point"""

    point: np.ndarray
    omega: np.ndarray
    H: Subspace
    phi: np.ndarray
    V: Subspace
    xi: np.ndarray


def point_data(phase: ConstraintPhase, action: SymmetryAction, point,
               tol: float = DEFAULT_TOL) -> PointData:
    point = np.asarray(point, dtype=float)
    return PointData(point, omega_M(phase).at(point), horizontal_H(phase, point, tol),
                     horizontal_annihilator_basis(phase, point), vertical_space(action, point),
                     action.generator_matrix(point))


def _u_space(data: PointData) -> Subspace:
    return orthogonal_wrt_form(intersect(data.V, data.H), data.omega, data.H)


def horizontal_annihilator_U(phase: ConstraintPhase, action: SymmetryAction, point,
                             tol: float = DEFAULT_TOL) -> Subspace:
    """𝒰 = (𝒱 ∩ ℋ)^ω ∩ ℋ"""
    return _u_space(point_data(phase, action, point, tol))


def _completions(data: PointData, U: Subspace) -> np.ndarray:
    """Orthonormal null space of [ΞᵀΩᵀU | ΞᵀΦᵀ], rows [c; b]"""
    u_dim, k = U.dim, data.phi.shape[0]
    if data.xi.shape[1] == 0:
        return np.eye(u_dim + k)
    system = np.hstack([data.xi.T @ data.omega.T @ U.basis.T, data.xi.T @ data.phi.T])
    if system.shape[1] == 0:
        return np.zeros((0, 0))
    scale = max(np.linalg.norm(system, 2), ZERO_FLOOR)
    null = scipy.linalg.null_space(system, rcond=data.H.tol * max(1.0, scale) / scale)
    return null.T


def reaction_codistribution_R(phase: ConstraintPhase, action: SymmetryAction, point,
                              tol: float = DEFAULT_TOL) -> Subspace:
    """ℛ(m): the ℋ°-corrections that make some X ∈ 𝒰 into a 𝒱°-valued pair"""
    data = point_data(phase, action, point, tol)
    return _reaction(data, _u_space(data))


def _reaction(data: PointData, U: Subspace) -> Subspace:
    n = data.omega.shape[0]
    null = _completions(data, U)
    if null.size == 0:
        return Subspace.zero(n, data.H.tol)
    corrections = null[:, U.dim:] @ data.phi
    return Subspace(n, list(corrections), data.H.tol)


def u_pairs(phase: ConstraintPhase, action: SymmetryAction, point, tol: float = DEFAULT_TOL) -> Subspace:
    """(Uc, ΩᵀUc + Φᵀb): D ∩ K⊥ built from 𝒰"""
    data = point_data(phase, action, point, tol)
    U = _u_space(data)
    n = data.omega.shape[0]
    null = _completions(data, U)
    pairs = []
    for row in null:
        X = U.basis.T @ row[:U.dim]
        pairs.append(np.concatenate([X, data.omega.T @ X + data.phi.T @ row[U.dim:]]))
    return Subspace(2 * n, pairs, tol)


def check_u_pairs(D: PairBundle, phase: ConstraintPhase, action: SymmetryAction,
                  points: Sequence[np.ndarray]) -> CheckOutcome:
    """D ∩ K⊥ = the 𝒰-built pairs, so π₁(D ∩ K⊥) = 𝒰"""
    tracker = ResidualTracker(D.tol)
    for m in points:
        built = u_pairs(phase, action, m, D.tol)
        direct = d_cap_k_perp_fiber(D, action, m)
        if not equals(built, direct):
            tracker.fail(m, f"dims {built.dim} vs {direct.dim}", subspace_gap(built, direct))
        else:
            tracker.record(subspace_gap(built, direct), m)
    return tracker.outcome()


def check_rplusv(phase: ConstraintPhase, action: SymmetryAction, points: Sequence[np.ndarray],
                 tol: float = DEFAULT_TOL) -> CheckOutcome:
    """♭(𝒰) ⊕ ℛ = 𝒱° + ℛ with the left sum direct"""
    tracker = ResidualTracker(tol)
    for m in points:
        data = point_data(phase, action, m, tol)
        U = _u_space(data)
        R = _reaction(data, U)
        n = data.omega.shape[0]
        flat = Subspace(n, [data.omega.T @ X for X in U.basis], tol)
        left = subspace_sum(flat, R)
        right = subspace_sum(annihilator(data.V), R)
        if left.dim != flat.dim + R.dim:
            tracker.fail(m, f"♭(𝒰) ∩ ℛ ≠ 0: dims {flat.dim} + {R.dim} -> {left.dim}")
        elif not equals(left, right):
            tracker.fail(m, f"dims {left.dim} vs {right.dim}", subspace_gap(left, right))
        else:
            tracker.record(subspace_gap(left, right), m)
    return tracker.outcome()


def check_reaction_lemma(phase: ConstraintPhase, action: SymmetryAction, points: Sequence[np.ndarray],
                         tol: float = DEFAULT_TOL) -> CheckOutcome:
    """𝒰^ω ∩ ℛ° = 𝒱 ∩ ℛ°, the ω-orthogonal taken in all of TM"""
    tracker = ResidualTracker(tol)
    for m in points:
        data = point_data(phase, action, m, tol)
        U = _u_space(data)
        R_ann = annihilator(_reaction(data, U))
        n = data.omega.shape[0]
        left = intersect(orthogonal_wrt_form(U, data.omega, Subspace.full(n, tol)), R_ann)
        right = intersect(data.V, R_ann)
        if not equals(left, right):
            tracker.fail(m, f"dims {left.dim} vs {right.dim}", subspace_gap(left, right))
        else:
            tracker.record(subspace_gap(left, right), m)
    return tracker.outcome()


def conserved_criterion(phase: ConstraintPhase, action: SymmetryAction, coefficients: Sequence[float],
                        points: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> CheckOutcome:
    """ξ_M ∈ 𝒱 ∩ ℛ° at every sample: J^ξ is conserved by every invariant H"""
    tracker = ResidualTracker(tol)
    coefficients = np.asarray(coefficients, dtype=float)
    for m in points:
        data = point_data(phase, action, m, tol)
        target = intersect(data.V, annihilator(_reaction(data, _u_space(data))))
        tracker.record(target.residual(data.xi @ coefficients), m, "ξ_M ∈ 𝒱 ∩ ℛ°")
    return tracker.outcome()


def check_completion_uniqueness(phase: ConstraintPhase, action: SymmetryAction,
                                points: Sequence[np.ndarray], rng: np.random.Generator,
                                tol: float = DEFAULT_TOL) -> CheckOutcome:
    """
    Where ℋ + 𝒱 = TM, the 𝒱°-completion α of each X ∈ 𝒰 does not depend on the
    solution chosen for its ℋ°-part.
    """
    tracker = ResidualTracker(tol)
    skipped = 0
    for m in points:
        data = point_data(phase, action, m, tol)
        n = data.omega.shape[0]
        if subspace_sum(data.H, data.V).dim != n:
            skipped += 1
            continue
        U = _u_space(data)
        A = data.xi.T @ data.phi.T
        spread = np.eye(A.shape[1]) - np.linalg.pinv(A) @ A
        for X in U.basis:
            rhs = -data.xi.T @ data.omega.T @ X
            b1, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            tracker.record(np.linalg.norm(A @ b1 - rhs) / max(1.0, np.linalg.norm(rhs)), m, "solvable")
            b2 = b1 + spread @ rng.normal(size=A.shape[1])
            alpha1 = data.omega.T @ X + data.phi.T @ b1
            alpha2 = data.omega.T @ X + data.phi.T @ b2
            tracker.record(np.linalg.norm(alpha1 - alpha2) / max(1.0, np.linalg.norm(alpha1)), m, "unique")
    outcome = tracker.outcome()
    outcome.notes["skipped_points"] = skipped
    return outcome


# ---------------------------------------------------------------------------
# optimal distribution
# ---------------------------------------------------------------------------

def optimal_distribution_DG(phase: ConstraintPhase, action: SymmetryAction, point,
                            tol: float = DEFAULT_TOL) -> Subspace:
    """𝒟_G = 𝒰 + 𝒱"""
    data = point_data(phase, action, point, tol)
    return subspace_sum(_u_space(data), data.V)


def dg_form_characterization(D: PairBundle, action: SymmetryAction, point) -> Subspace:
    """(π₂(D ∩ (𝒱 ⊕ 𝒱°)))°"""
    n = D.chart.dim
    V = vertical_space(action, point)
    vectors = [np.concatenate([v, np.zeros(n)]) for v in V.basis]
    vectors += [np.concatenate([np.zeros(n), a]) for a in annihilator(V).basis]
    pairs = intersect(D.fiber(point), Subspace(2 * n, vectors, D.tol))
    _, forms = split_fiber(pairs.basis)
    return annihilator(Subspace(n, list(forms), D.tol))


def check_dg_characterization(D: PairBundle, phase: ConstraintPhase, action: SymmetryAction,
                              points: Sequence[np.ndarray]) -> CheckOutcome:
    tracker = ResidualTracker(D.tol)
    for m in points:
        left = optimal_distribution_DG(phase, action, m, D.tol)
        right = dg_form_characterization(D, action, m)
        if not equals(left, right):
            tracker.fail(m, f"dims {left.dim} vs {right.dim}", subspace_gap(left, right))
        else:
            tracker.record(subspace_gap(left, right), m)
    return tracker.outcome()


def dg_frame(phase: ConstraintPhase, action: SymmetryAction, point,
             fd_step: float = 1e-4) -> List[VectorField]:
    """Normalized smooth frame of 𝒟_G near point, differentiated by stencil"""
    chart = phase.m_chart
    jets = normalized_frame(lambda p: optimal_distribution_DG(phase, action, p), point,
                            frame_steps(chart, fd_step))
    return [VectorField(chart, lambda p, j=j: list(j)) for j in jets]


def is_involutive_DG(phase: ConstraintPhase, action: SymmetryAction, points: Sequence[np.ndarray],
                     fd_step: float = 1e-4, fd_tol: float = 1e-7) -> CheckOutcome:
    """Brackets of the frame of 𝒟_G stay in 𝒟_G; the first failure is the witness"""
    tracker = ResidualTracker(fd_tol)
    for m in points:
        space = optimal_distribution_DG(phase, action, m)
        frame = dg_frame(phase, action, m, fd_step)
        for i in range(len(frame)):
            for j in range(i + 1, len(frame)):
                tracker.record(space.residual(lie_bracket(frame[i], frame[j]).at(m)), m, f"[X{i}, X{j}]")
    return tracker.outcome()


def check_conserved_annihilate_DG(phase: ConstraintPhase, action: SymmetryAction,
                                  functions: Sequence[ScalarField], points: Sequence[np.ndarray],
                                  tol: float = 1e-8) -> CheckOutcome:
    """df vanishes on 𝒟_G for each proposed conserved function f"""
    tracker = ResidualTracker(tol)
    for m in points:
        basis = optimal_distribution_DG(phase, action, m).basis
        for index, f in enumerate(functions):
            df = f.jet(m).grad
            tracker.record(np.abs(basis @ df).max(initial=0.0) / max(1.0, np.linalg.norm(df)), m,
                           f"df{index}|𝒟_G")
    return tracker.outcome()

