"""
Reduction of Dirac structures by free symmetry actions given through their generators.

The orbit space is handled through a QuotientChart: invariant coordinate functions
π: M → M̄ and a slice σ: M̄ → M with π∘σ = id. Reduction is pointwise at σ(m̄):

    D_red(m̄) = { (Tπ v, σ*α) : (v, α) ∈ D(σ m̄), α ∈ 𝒱° }

which is well defined because any right inverse of Tπ gives the same covector on 𝒱°.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from .dirac_core import (PairBundle, SampledPairs, characteristic_spaces, courant_bracket,
                         hamiltonian_vector, is_closed, split_fiber)
from .errors import ChartMismatchError, DimensionError, InadmissibleError, RankError
from .jet_calculus import (Chart, ChartMap, ScalarField, VectorField, lie_bracket,
                           lie_derivative_one_form)
from .outcomes import CheckOutcome, ResidualTracker
from .subspace_lab import (DEFAULT_TOL, Subspace, annihilator, equals, image, intersect,
                           is_contained, subspace_gap)


@dataclass
class SymmetryAction:
    """Infinitesimal action of a k-dim Lie algebra by generators ξ¹_M … ξᵏ_M"""

    name: str
    chart: Chart
    generators: List[VectorField]
    structure_constants: Optional[np.ndarray] = None     # c[i, j, l] = c^l_ij
    q_generators: Optional[List[List[ScalarField]]] = None
    lifted: bool = True

    def __post_init__(self):
        for g in self.generators:
            if not g.chart.same_as(self.chart):
                raise ChartMismatchError(f"generator on {g.chart.name!r} for an action on {self.chart.name!r}")
        k = len(self.generators)
        if self.structure_constants is None:
            self.structure_constants = np.zeros((k, k, k))
        self.structure_constants = np.asarray(self.structure_constants, dtype=float)
        if self.structure_constants.shape != (k, k, k):
            raise DimensionError(f"structure constants of shape {self.structure_constants.shape} "
                                 f"for {k} generators")

    @property
    def k(self) -> int:
        return len(self.generators)

    def generator_matrix(self, point) -> np.ndarray:
        """n × k, column a = ξ^a_M(m)"""
        n = self.chart.dim
        if not self.generators:
            return np.zeros((n, 0))
        return np.array([g.at(point) for g in self.generators]).T

    def infinitesimal(self, coefficients: Sequence[float]) -> VectorField:
        """ξ_M for ξ = Σ c_a e_a"""
        total = VectorField.zero(self.chart)
        for c, g in zip(coefficients, self.generators):
            if c != 0.0:
                total = total + g * float(c)
        return total

    @classmethod
    def trivial(cls, chart: Chart) -> "SymmetryAction":
        return cls("trivial", chart, [])


@dataclass
class QuotientChart:
    """Invariant coordinates π: M → M̄ with a slice σ: M̄ → M"""

    reduced_chart: Chart
    projection: ChartMap
    slice: ChartMap
    labels: List[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.projection.target.same_as(self.reduced_chart):
            raise ChartMismatchError("projection must land in the reduced chart")
        if not self.slice.source.same_as(self.reduced_chart):
            raise ChartMismatchError("slice must start from the reduced chart")
        if not self.slice.target.same_as(self.projection.source):
            raise ChartMismatchError("slice must land where the projection starts")

    @classmethod
    def identity(cls, chart: Chart) -> "QuotientChart":
        ident = ChartMap.identity(chart)
        return cls(chart, ident, ident)


# ---------------------------------------------------------------------------
# the action
# ---------------------------------------------------------------------------

def vertical_space(action: SymmetryAction, point) -> Subspace:
    """𝒱(m) = span of the generator values; must have dim k"""
    n = action.chart.dim
    space = Subspace(n, [g.at(point) for g in action.generators])
    if space.dim != action.k:
        raise RankError(f"generators span {space.dim} dims, expected {action.k} (action not free)",
                        stage="vertical_space", points=[point])
    return space


def check_freeness(action: SymmetryAction, points: Sequence[np.ndarray]) -> CheckOutcome:
    tracker = ResidualTracker(0.0)
    n = action.chart.dim
    for p in points:
        dim = Subspace(n, [g.at(p) for g in action.generators]).dim
        if dim != action.k:
            tracker.fail(p, f"generators span {dim} of {action.k} dims")
        else:
            tracker.record(0.0, p)
    return tracker.outcome()


def check_anti_homomorphism(action: SymmetryAction, points: Sequence[np.ndarray],
                            tol: float = DEFAULT_TOL) -> CheckOutcome:
    """[ξⁱ_M, ξʲ_M] = −Σ_l c^l_ij ξˡ_M"""
    tracker = ResidualTracker(tol)
    c = action.structure_constants
    gens = action.generators
    for p in points:
        values = action.generator_matrix(p)
        for i in range(action.k):
            for j in range(i + 1, action.k):
                bracket = lie_bracket(gens[i], gens[j]).at(p)
                expected = -values @ c[i, j]
                tracker.record(np.linalg.norm(bracket - expected) / max(1.0, np.linalg.norm(expected)),
                               p, f"[ξ{i}, ξ{j}]")
    return tracker.outcome()


def check_quotient(action: SymmetryAction, quotient: QuotientChart, points: Sequence[np.ndarray],
                   reduced_points: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> CheckOutcome:
    """dπ(ξ) = 0 on M, π∘σ = id and rank Tπ = n − k at slice points"""
    tracker = ResidualTracker(tol)
    expected_rank = action.chart.dim - action.k
    if quotient.reduced_chart.dim != expected_rank:
        tracker.fail([], f"reduced chart has dim {quotient.reduced_chart.dim}, expected {expected_rank}")
        return tracker.outcome()
    for p in points:
        jac = quotient.projection.jacobian(p)
        tracker.record(np.abs(jac @ action.generator_matrix(p)).max(initial=0.0), p, "dπ(ξ)")
    for q in reduced_points:
        m = quotient.slice(q)
        tracker.record(np.abs(quotient.projection(m) - q).max(), q, "π∘σ")
        rank = np.linalg.matrix_rank(quotient.projection.jacobian(m))
        if rank != expected_rank:
            tracker.fail(q, f"rank Tπ = {rank}")
    return tracker.outcome()


def check_dirac_invariance(D: PairBundle, action: SymmetryAction, points: Sequence[np.ndarray],
                           tol: float = DEFAULT_TOL, fd_tol: float = 1e-7) -> CheckOutcome:
    """(£_ξ X, £_ξ α) ∈ D for every generator and spanning section"""
    tracker = ResidualTracker(D.bracket_threshold(tol, fd_tol))
    for p in points:
        fiber = D.fiber(p)
        for a, xi in enumerate(action.generators):
            for s, section in enumerate(D.local_sections(p)):
                vec = lie_bracket(xi, section.vector_part).at(p)
                form = lie_derivative_one_form(xi, section.form_part).at(p)
                tracker.record(fiber.residual(np.concatenate([vec, form])), p, f"£_ξ{a} s{s}")
    return tracker.outcome()


def is_descending_field(X: VectorField, action: SymmetryAction, points: Sequence[np.ndarray],
                        tol: float = DEFAULT_TOL) -> CheckOutcome:
    """[X, ξ^a](m) ∈ 𝒱(m) for all generators"""
    tracker = ResidualTracker(tol)
    for p in points:
        vertical = Subspace(action.chart.dim, [g.at(p) for g in action.generators], tol)
        for a, xi in enumerate(action.generators):
            tracker.record(vertical.residual(lie_bracket(X, xi).at(p)), p, f"[X, ξ{a}]")
    return tracker.outcome()


# ---------------------------------------------------------------------------
# D ∩ K⊥ and D_red
# ---------------------------------------------------------------------------

def k_perp(action: SymmetryAction, point, tol: float = DEFAULT_TOL) -> Subspace:
    """K⊥ = TM ⊕ 𝒱° at point"""
    n = action.chart.dim
    vertical = Subspace(n, [g.at(point) for g in action.generators], tol)
    vectors = [np.concatenate([e, np.zeros(n)]) for e in np.eye(n)]
    vectors += [np.concatenate([np.zeros(n), b]) for b in annihilator(vertical).basis]
    return Subspace(2 * n, vectors, tol)


def d_cap_k_perp_fiber(D: PairBundle, action: SymmetryAction, point) -> Subspace:
    return intersect(D.fiber(point), k_perp(action, point, D.tol))


@dataclass
class RankReport:
    rank: int
    points: int


def d_cap_k_perp(D: PairBundle, action: SymmetryAction, points: Sequence[np.ndarray],
                 fd_step: float = 1e-4) -> Tuple[SampledPairs, RankReport]:
    """
    D ∩ K⊥ as a bundle of pairs, with its rank asserted constant over points.

    Raises RankError naming two points of different rank.
    """
    first = None
    for p in points:
        rank = d_cap_k_perp_fiber(D, action, p).dim
        if first is None:
            first = (p, rank)
        elif rank != first[1]:
            raise RankError(f"rank {first[1]} at one point and {rank} at another",
                            stage="d_cap_k_perp", points=[first[0], p])
    rank = first[1] if first else 0
    logger.debug(f"D ∩ K⊥ for {action.name}: rank {rank} at {len(points)} points")
    bundle = SampledPairs(D.chart, lambda p: d_cap_k_perp_fiber(D, action, p),
                          f"{D.label}∩K⊥", D.tol, fd_step)
    return bundle, RankReport(rank, len(points))


def _push_pairs(pairs: Subspace, jac_pi: np.ndarray, jac_sigma: np.ndarray) -> List[np.ndarray]:
    V, A = split_fiber(pairs.basis)
    return [np.concatenate([jac_pi @ v, jac_sigma.T @ a]) for v, a in zip(V, A)]


def reduced_fiber(D: PairBundle, action: SymmetryAction, quotient: QuotientChart, reduced_point) -> Subspace:
    """D_red(m̄) from D ∩ K⊥ at σ(m̄)"""
    m = quotient.slice(reduced_point)
    pairs = d_cap_k_perp_fiber(D, action, m)
    jac_pi = quotient.projection.jacobian(m)
    jac_sigma = quotient.slice.jacobian(reduced_point)
    dim = quotient.reduced_chart.dim
    out = Subspace(2 * dim, _push_pairs(pairs, jac_pi, jac_sigma), D.tol)
    if out.dim != dim:
        raise RankError(f"reduced fiber has rank {out.dim}, expected {dim}",
                        stage="reduce_dirac", points=[reduced_point])
    return out


def reduce_dirac(D: PairBundle, action: SymmetryAction, quotient: QuotientChart,
                 label: Optional[str] = None, fd_step: float = 1e-4) -> SampledPairs:
    """The reduced Dirac structure on the reduced chart"""
    if not quotient.projection.source.same_as(D.chart):
        raise ChartMismatchError(f"quotient starts on {quotient.projection.source.name!r}, "
                                 f"D lives on {D.chart.name!r}")
    return SampledPairs(quotient.reduced_chart,
                        lambda q: reduced_fiber(D, action, quotient, q),
                        label or f"{D.label}_red", D.tol, fd_step)


def check_right_inverse_independence(D: PairBundle, action: SymmetryAction, quotient: QuotientChart,
                                     reduced_points: Sequence[np.ndarray], rng: np.random.Generator,
                                     tol: float = DEFAULT_TOL) -> CheckOutcome:
    """Reduced covectors computed through Tσ and through Tσ + Ξ R agree"""
    tracker = ResidualTracker(tol)
    for q in reduced_points:
        m = quotient.slice(q)
        pairs = d_cap_k_perp_fiber(D, action, m)
        _, A = split_fiber(pairs.basis)
        jac_sigma = quotient.slice.jacobian(q)
        shift = action.generator_matrix(m) @ rng.normal(size=(action.k, jac_sigma.shape[1]))
        for a in A:
            first = jac_sigma.T @ a
            second = (jac_sigma + shift).T @ a
            tracker.record(np.linalg.norm(first - second) / max(1.0, np.linalg.norm(first)), q)
    return tracker.outcome()


def method_b_fiber(D: PairBundle, action: SymmetryAction, quotient: QuotientChart, reduced_point) -> Subspace:
    """D̄(m̄) = {(Tπ v, ᾱ) : (v, π*ᾱ) ∈ D(σ m̄)}"""
    m = quotient.slice(reduced_point)
    fiber = D.fiber(m)
    V, A = split_fiber(fiber.basis)
    jac_pi = quotient.projection.jacobian(m)        # n̄ × n
    rows = fiber.dim
    system = np.hstack([A.T, -jac_pi.T])             # A c = Jπᵀ ᾱ
    _, s, vt = np.linalg.svd(system)
    rank = int(np.sum(s > fiber.tol * max(1.0, s.max() if s.size else 1.0)))
    null = vt[rank:]
    dim = quotient.reduced_chart.dim
    pairs = [np.concatenate([jac_pi @ (V.T @ row[:rows]), row[rows:]]) for row in null]
    return Subspace(2 * dim, pairs, fiber.tol)


def verify_method_b(D: PairBundle, action: SymmetryAction, quotient: QuotientChart, D_red: PairBundle,
                    reduced_points: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> CheckOutcome:
    """
    D̄ = D_red at every point, and every D_red basis pair (X̄, ᾱ) lifts: some X with
    Tπ X = X̄ has (X, π*ᾱ) ∈ D.
    """
    tracker = ResidualTracker(tol)
    for q in reduced_points:
        bar = method_b_fiber(D, action, quotient, q)
        red = D_red.fiber(q)
        if bar.dim != red.dim:
            tracker.fail(q, f"method B rank {bar.dim} vs {red.dim}")
            continue
        tracker.record(subspace_gap(bar, red), q, "D̄ = D_red")

        m = quotient.slice(q)
        fiber = D.fiber(m)
        V, A = split_fiber(fiber.basis)
        xi = action.generator_matrix(m)
        jac_pi = quotient.projection.jacobian(m)
        jac_sigma = quotient.slice.jacobian(q)
        n = D.chart.dim
        top = np.hstack([V.T, -xi])
        bottom = np.hstack([A.T, np.zeros((n, action.k))])
        system = np.vstack([top, bottom])
        bar_v, bar_a = split_fiber(red.basis)
        for v_bar, a_bar in zip(bar_v, bar_a):
            rhs = np.concatenate([jac_sigma @ v_bar, jac_pi.T @ a_bar])
            sol, *_ = np.linalg.lstsq(system, rhs, rcond=None)
            tracker.record(np.linalg.norm(system @ sol - rhs) / max(1.0, np.linalg.norm(rhs)), q, "lift")
    return tracker.outcome()


# ---------------------------------------------------------------------------
# consequences of reduction
# ---------------------------------------------------------------------------

def check_g0_pushdown(D: PairBundle, quotient: QuotientChart, D_red: PairBundle,
                      reduced_points: Sequence[np.ndarray]) -> CheckOutcome:
    """Tπ(G0(σ m̄)) ⊆ G0_red(m̄)"""
    tracker = ResidualTracker(D.tol)
    for q in reduced_points:
        m = quotient.slice(q)
        pushed = image(quotient.projection.jacobian(m), characteristic_spaces(D, m).G0)
        target = characteristic_spaces(D_red, q).G0
        if not is_contained(pushed, target):
            tracker.fail(q, f"pushed G0 (dim {pushed.dim}) not in G0_red (dim {target.dim})",
                         target.max_residual_of(pushed))
        else:
            tracker.record(target.max_residual_of(pushed), q)
    return tracker.outcome()


def check_reduced_dynamics(D: PairBundle, quotient: QuotientChart, D_red: PairBundle, H: ScalarField,
                           reduced_points: Sequence[np.ndarray], tol: float = DEFAULT_TOL) -> CheckOutcome:
    """Tπ X_H(σ m̄) − X_{H∘σ}(m̄) ∈ G0_red(m̄) for an invariant H"""
    tracker = ResidualTracker(tol)
    h_bar = quotient.slice.pull_scalar(H)
    for q in reduced_points:
        m = quotient.slice(q)
        x_h, _ = hamiltonian_vector(D, H.jet(m).grad, m)
        x_bar, g0 = hamiltonian_vector(D_red, h_bar.jet(q).grad, q)
        diff = quotient.projection.jacobian(m) @ x_h - x_bar
        tracker.record(g0.residual(diff), q, "Tπ X_H − X_H̄")
    return tracker.outcome()


def check_reduced_bracket_identity(D: PairBundle, quotient: QuotientChart, D_red: PairBundle,
                                   h: ScalarField, reduced_points: Sequence[np.ndarray],
                                   tol: float = DEFAULT_TOL) -> CheckOutcome:
    """
    {h, k̄∘π}(σ m̄) = {h∘σ, k̄}_red(m̄) for an invariant h and each reduced coordinate k̄.

    Pairs where k̄ is not admissible for D_red are skipped.
    """
    tracker = ResidualTracker(tol)
    h_bar = quotient.slice.pull_scalar(h)
    reduced = quotient.reduced_chart
    for q in reduced_points:
        m = quotient.slice(q)
        dh = h.jet(m).grad
        dh_bar = h_bar.jet(q).grad
        jac_pi = quotient.projection.jacobian(m)
        for index, name in enumerate(reduced.coords):
            dk = jac_pi[index]
            dk_bar = np.eye(reduced.dim)[index]
            try:
                x_k, _ = hamiltonian_vector(D, dk, m)
                x_k_bar, _ = hamiltonian_vector(D_red, dk_bar, q)
            except InadmissibleError:
                continue
            upstairs = float(dh @ x_k)
            downstairs = float(dh_bar @ x_k_bar)
            tracker.record(abs(upstairs - downstairs) / max(1.0, abs(upstairs)), q, f"{{h, {name}}}")
    return tracker.outcome()


def check_k_perp_brackets(pairs: SampledPairs, action: SymmetryAction, points: Sequence[np.ndarray],
                          fd_tol: float = 1e-7) -> CheckOutcome:
    """Brackets of D ∩ K⊥ sections stay 𝒱°-valued"""
    tracker = ResidualTracker(fd_tol)
    for p in points:
        sections = pairs.local_sections(p)
        xi = action.generator_matrix(p)
        for i in range(len(sections)):
            for j in range(i + 1, len(sections)):
                form = courant_bracket(sections[i], sections[j]).form_part.at(p)
                tracker.record(np.abs(form @ xi).max(initial=0.0), p, f"[s{i}, s{j}](ξ)")
    return tracker.outcome()


def check_closedness_preserved(D: PairBundle, D_red: PairBundle, points: Sequence[np.ndarray],
                               reduced_points: Sequence[np.ndarray], tol: float = DEFAULT_TOL,
                               fd_tol: float = 1e-7) -> CheckOutcome:
    """If D is closed, D_red is closed"""
    upstairs = is_closed(D, points, tol, fd_tol)
    if not upstairs.ok:
        outcome = CheckOutcome.passed()
        outcome.notes["vacuous"] = True
        return outcome
    return is_closed(D_red, reduced_points, tol, fd_tol)


def reduced_equals(D_red: PairBundle, expected: PairBundle, reduced_points: Sequence[np.ndarray],
                   tol: Optional[float] = None) -> CheckOutcome:
    tracker = ResidualTracker(D_red.tol if tol is None else tol)
    for q in reduced_points:
        a, b = D_red.fiber(q), expected.fiber(q)
        if not equals(a, b):
            tracker.fail(q, f"dims {a.dim}/{b.dim}", subspace_gap(a, b))
        else:
            tracker.record(subspace_gap(a, b), q)
    return tracker.outcome()
