"""
Reduced 2-forms of the nonholonomic reduction.

ω_H̄ lives on ℋ̄ = Tπ(𝒰): a vector of ℋ̄ lifts into 𝒰 up to 𝒰 ∩ 𝒱, which is
ω_M-orthogonal to 𝒰, so ω_H̄(ū, v̄) = ω_M(u, v) for any lifts. Leaf reduction
restricts D to a level set of conserved functions and reduces by the leaf's group.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..dirac_core import (PairBundle, SampledPairs, characteristic_spaces, induced_two_form,
                          restrict_to_level_set, split_fiber)
from ..errors import RankError
from ..jet_calculus import Chart, ChartMap, ScalarField
from ..outcomes import CheckOutcome, ResidualTracker
from ..subspace_lab import DEFAULT_TOL, Subspace, equals, image, intersect, subspace_gap
from ..symmetry_reduction import QuotientChart, SymmetryAction, reduce_dirac
from .mechanics import ConstraintPhase, omega_M
from .reaction import horizontal_annihilator_U


@dataclass
class ReducedHorizontalForm:
    """ω_H̄ at one reduced point, on an orthonormal basis of ℋ̄"""

    h_bar: Subspace
    matrix: np.ndarray
    lifts: np.ndarray

    def coordinates(self, vector: Sequence[float]) -> np.ndarray:
        v = np.asarray(vector, dtype=float)
        residual = self.h_bar.residual(v)
        if residual > self.h_bar.tol * 10:
            raise RankError(f"vector not in ℋ̄ (residual {residual:.3e})", stage="omega_hbar")
        return self.h_bar.basis @ v

    def value(self, u: Sequence[float], v: Sequence[float]) -> float:
        """ω_H̄(u, v) for u, v in ℋ̄"""
        return float(self.coordinates(u) @ self.matrix @ self.coordinates(v))


def reduced_h_bar_omega(phase: ConstraintPhase, action: SymmetryAction, quotient: QuotientChart,
                        reduced_point, tol: float = DEFAULT_TOL) -> ReducedHorizontalForm:
    m = quotient.slice(reduced_point)
    U = horizontal_annihilator_U(phase, action, m, tol)
    jac_pi = quotient.projection.jacobian(m)
    h_bar = image(jac_pi, U)
    pushed = jac_pi @ U.basis.T                        # n̄ × dim 𝒰
    lifts = []
    for b in h_bar.basis:
        c, *_ = np.linalg.lstsq(pushed, b, rcond=None)
        lifts.append(U.basis.T @ c)
    lifts = np.array(lifts).reshape(h_bar.dim, phase.n)
    omega = omega_M(phase).at(m)
    return ReducedHorizontalForm(h_bar, lifts @ omega @ lifts.T, lifts)


def check_omega_hbar(phase: ConstraintPhase, action: SymmetryAction, quotient: QuotientChart,
                     D_red: PairBundle, reduced_points: Sequence[np.ndarray],
                     tol: float = DEFAULT_TOL) -> CheckOutcome:
    """G1_red = ℋ̄, ω_H̄ nondegenerate there and equal to the form D_red induces on G1_red"""
    tracker = ResidualTracker(tol)
    dims = None
    for q in reduced_points:
        form = reduced_h_bar_omega(phase, action, quotient, q, tol)
        if dims is None:
            dims = (q, form.h_bar.dim)
        elif form.h_bar.dim != dims[1]:
            raise RankError(f"dim ℋ̄ is {dims[1]} at one point and {form.h_bar.dim} at another",
                            stage="reduced_h_bar_omega", points=[dims[0], q])
        G1 = characteristic_spaces(D_red, q).G1
        if not equals(G1, form.h_bar):
            tracker.fail(q, f"G1_red dim {G1.dim} vs ℋ̄ dim {form.h_bar.dim}", subspace_gap(G1, form.h_bar))
            continue
        if form.h_bar.dim:
            s = np.linalg.svd(form.matrix, compute_uv=False)
            if s.min() <= tol * max(1.0, s.max()):
                tracker.fail(q, f"ω_H̄ degenerate (singular value {s.min():.3e})")
                continue
        induced = _induced_on_g1(D_red, q, form.h_bar)
        tracker.record(np.abs(induced - form.matrix).max(initial=0.0) / max(1.0, np.abs(form.matrix).max(initial=0.0)),
                       q, "ω_H̄ = ω_red|G1")
    return tracker.outcome()


def _induced_on_g1(D: PairBundle, point, basis_space: Subspace) -> np.ndarray:
    """[α_i(b_j)] where (b_i, α_i) ∈ D(m) for a basis b of G1"""
    V, A = split_fiber(D.fiber(point).basis)
    basis = basis_space.basis
    if not len(basis):
        return np.zeros((0, 0))
    alphas = []
    for b in basis:
        c, *_ = np.linalg.lstsq(V.T, b, rcond=None)
        alphas.append(A.T @ c)
    return np.array(alphas).reshape(len(basis), -1) @ basis.T


# ---------------------------------------------------------------------------
# leaves
# ---------------------------------------------------------------------------

@dataclass
class LeafData:
    """A level set of conserved functions with the group acting on it"""

    chart: Chart
    embedding: ChartMap                          # leaf → M
    conserved: List[ScalarField]                 # on M
    values: List[float]
    action: Optional[SymmetryAction] = None      # on the leaf chart
    quotient: Optional[QuotientChart] = None
    labels: List[str] = field(default_factory=list)

    @property
    def reducible(self) -> bool:
        return self.action is not None and self.quotient is not None


def leaf_reduce(D: PairBundle, leaf: LeafData, fd_step: float = 1e-4) -> Tuple[SampledPairs, Optional[SampledPairs]]:
    """(D on the leaf, its reduction D_ρ); D_ρ is None for a leaf with no group data"""
    restricted = restrict_to_level_set(D, leaf.embedding, f"{D.label}|leaf", fd_step)
    if not leaf.reducible:
        return restricted, None
    logger.debug(f"reducing the leaf by {leaf.action.name} onto {leaf.quotient.reduced_chart.coords}")
    return restricted, reduce_dirac(restricted, leaf.action, leaf.quotient, f"{D.label}_ρ", fd_step)


def check_conserved_on_leaf(leaf: LeafData, points: Sequence[np.ndarray],
                            tol: float = DEFAULT_TOL) -> CheckOutcome:
    """f∘ι equals the leaf value"""
    tracker = ResidualTracker(tol)
    for n_point in points:
        m = leaf.embedding(n_point)
        for index, (f, value) in enumerate(zip(leaf.conserved, leaf.values)):
            tracker.record(abs(f(m) - value) / max(1.0, abs(value)), n_point, f"f{index}")
    return tracker.outcome()


def check_graph_of_nondegenerate_form(D: PairBundle, points: Sequence[np.ndarray],
                                      tol: float = DEFAULT_TOL) -> CheckOutcome:
    """G1 is full and the induced 2-form is invertible"""
    tracker = ResidualTracker(tol)
    for q in points:
        try:
            omega = induced_two_form(D, q)
        except RankError as exc:
            tracker.fail(q, str(exc))
            continue
        s = np.linalg.svd(omega, compute_uv=False)
        if s.min() <= tol * max(1.0, s.max()):
            tracker.fail(q, f"induced 2-form degenerate (singular value {s.min():.3e})")
        else:
            tracker.record(0.0, q)
    return tracker.outcome()


def check_leaf_two_form(phase: ConstraintPhase, action: SymmetryAction, leaf: LeafData,
                        D_rho: PairBundle, reduced_points: Sequence[np.ndarray],
                        tol: float = DEFAULT_TOL) -> CheckOutcome:
    """
    ω_ρ(X̄, Ȳ) = ω_M(X̃, Ỹ) for lifts X̃, Ỹ in 𝒰 ∩ T(leaf), against the 2-form whose
    graph is the leaf-reduced structure.
    """
    tracker = ResidualTracker(tol)
    omega = omega_M(phase)
    for q in reduced_points:
        n_point = leaf.quotient.slice(q)
        m = leaf.embedding(n_point)
        jac_iota = leaf.embedding.jacobian(n_point)
        tangent = Subspace(phase.n, list(jac_iota.T), tol)
        lifts = intersect(horizontal_annihilator_U(phase, action, m, tol), tangent).basis
        leaf_vectors = np.array([np.linalg.lstsq(jac_iota, l, rcond=None)[0] for l in lifts])
        pushed = leaf_vectors @ leaf.quotient.projection.jacobian(n_point).T
        if Subspace(leaf.quotient.reduced_chart.dim, list(pushed), tol).dim != leaf.quotient.reduced_chart.dim:
            tracker.fail(q, "lifts in 𝒰 ∩ T(leaf) do not cover the reduced tangent space")
            continue
        upstairs = lifts @ omega.at(m) @ lifts.T
        downstairs = pushed @ induced_two_form(D_rho, q) @ pushed.T
        tracker.record(np.abs(upstairs - downstairs).max(initial=0.0) / max(1.0, np.abs(upstairs).max(initial=0.0)),
                       q, "ω_ρ")
    return tracker.outcome()
