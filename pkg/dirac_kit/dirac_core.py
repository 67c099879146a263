"""
Dirac structures on a chart.

A structure is a bundle of pairs (v, α) in TM ⊕ T*M. Fibers are Subspaces of the
2n-dim Pontryagin fiber, stacked as [v; α]. Two realizations:

    SectionPairs  smooth spanning sections with exact jets
    SampledPairs  a pointwise fiber rule; local sections are normalized frames
                  differentiated by stencil, so bracket tests use fd_tol
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from .errors import ChartMismatchError, DimensionError, InadmissibleError, RankError
from .jet_calculus import (Bivector, Chart, ChartMap, OneForm, ScalarField, TwoForm,
                           VectorField, annihilator_frame, exterior_derivative_one_form,
                           frame_steps, kernel_frame, lie_bracket, lie_derivative_one_form,
                           normalized_frame, require_same_chart)
from .outcomes import CheckOutcome, ResidualTracker
from .subspace_lab import (DEFAULT_TOL, Subspace, annihilator, equals, intersect,
                           subspace_gap)

DEFAULT_FD_STEP = 1e-4


class PontryaginSection:
    """A section (X, α) of TM ⊕ T*M"""

    def __init__(self, vector_part: VectorField, form_part: OneForm, label: Optional[str] = None):
        require_same_chart(vector_part, form_part)
        self.vector_part = vector_part
        self.form_part = form_part
        self.label = label

    @property
    def chart(self) -> Chart:
        return self.vector_part.chart

    @classmethod
    def from_vector(cls, X: VectorField, label: Optional[str] = None) -> "PontryaginSection":
        return cls(X, OneForm.zero(X.chart), label)

    @classmethod
    def from_form(cls, alpha: OneForm, label: Optional[str] = None) -> "PontryaginSection":
        return cls(VectorField.zero(alpha.chart), alpha, label)

    def at(self, point) -> np.ndarray:
        return np.concatenate([self.vector_part.at(point), self.form_part.at(point)])

    def __add__(self, other: "PontryaginSection") -> "PontryaginSection":
        return PontryaginSection(self.vector_part + other.vector_part, self.form_part + other.form_part)

    def __sub__(self, other: "PontryaginSection") -> "PontryaginSection":
        return PontryaginSection(self.vector_part - other.vector_part, self.form_part - other.form_part)

    def __mul__(self, factor) -> "PontryaginSection":
        return PontryaginSection(self.vector_part * factor, self.form_part * factor)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"PontryaginSection({self.label or '?'} on {self.chart.name})"


def pontryagin_pairing(a: Sequence[float], b: Sequence[float]) -> float:
    """⟨(u,α),(v,β)⟩ = β(u) + α(v) for stacked fiber vectors"""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size != b.size or a.size % 2:
        raise DimensionError(f"pairing of fiber vectors of lengths {a.size} and {b.size}")
    n = a.size // 2
    return float(b[n:] @ a[:n] + a[n:] @ b[:n])


def pairing_matrix(n: int) -> np.ndarray:
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [eye, zero]])


def section_pairing(a: PontryaginSection, b: PontryaginSection) -> ScalarField:
    return b.form_part.pair(a.vector_part) + a.form_part.pair(b.vector_part)


def courant_bracket(a: PontryaginSection, b: PontryaginSection, skew: bool = False) -> PontryaginSection:
    """
    ([X,Y], £_X β − i_Y dα); with skew=True the form part loses ½ d⟨a,b⟩.

    The truncated version (skew=False) is the one closedness is tested with.
    """
    require_same_chart(a.vector_part, b.vector_part)
    X, alpha = a.vector_part, a.form_part
    Y, beta = b.vector_part, b.form_part
    form = lie_derivative_one_form(X, beta) - exterior_derivative_one_form(alpha).contract(Y)
    if skew:
        form = form - section_pairing(a, b).differential() * 0.5
    return PontryaginSection(lie_bracket(X, Y), form)


def split_fiber(vectors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Rows [v | α] -> (V, A), one row per element"""
    vectors = np.atleast_2d(vectors)
    n = vectors.shape[1] // 2
    return vectors[:, :n], vectors[:, n:]


class PairBundle(ABC):
    """A family of subspaces of TM ⊕ T*M over a chart"""

    exact = True

    def __init__(self, chart: Chart, label: Optional[str] = None, tol: float = DEFAULT_TOL):
        self.chart = chart
        self.label = label or "D"
        self.tol = tol

    @property
    def fiber_dim(self) -> int:
        return 2 * self.chart.dim

    @abstractmethod
    def fiber(self, point) -> Subspace:
        """The fiber at point as a subspace of the 2n-dim Pontryagin fiber"""

    @abstractmethod
    def local_sections(self, point) -> List[PontryaginSection]:
        """Sections spanning the bundle near point, with jets at least at point"""

    def rank_at(self, point) -> int:
        return self.fiber(point).dim

    def bracket_threshold(self, tol: float, fd_tol: float) -> float:
        return tol if self.exact else fd_tol

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label} on {self.chart.name})"


class SectionPairs(PairBundle):
    """Bundle spanned by given smooth sections"""

    def __init__(self, chart: Chart, sections: Sequence[PontryaginSection],
                 label: Optional[str] = None, tol: float = DEFAULT_TOL):
        super().__init__(chart, label, tol)
        for s in sections:
            if not s.chart.same_as(chart):
                raise ChartMismatchError(f"section on {s.chart.name!r} in a bundle on {chart.name!r}")
        self.sections = list(sections)

    def fiber(self, point) -> Subspace:
        return Subspace(self.fiber_dim, [s.at(point) for s in self.sections], self.tol)

    def local_sections(self, point) -> List[PontryaginSection]:
        return list(self.sections)


class SampledPairs(PairBundle):
    """Bundle known through a pointwise rule; sections come from normalized frames"""

    exact = False

    def __init__(self, chart: Chart, fiber_fn: Callable[[np.ndarray], Subspace],
                 label: Optional[str] = None, tol: float = DEFAULT_TOL,
                 fd_step: float = DEFAULT_FD_STEP):
        super().__init__(chart, label, tol)
        self._fiber_fn = fiber_fn
        self.fd_step = fd_step

    def fiber(self, point) -> Subspace:
        return self._fiber_fn(np.asarray(point, dtype=float))

    def local_sections(self, point) -> List[PontryaginSection]:
        n = self.chart.dim
        frame = normalized_frame(self.fiber, point, frame_steps(self.chart, self.fd_step))
        sections = []
        for k, jets in enumerate(frame):
            vec = VectorField(self.chart, _frozen(jets[:n]))
            form = OneForm(self.chart, _frozen(jets[n:]))
            sections.append(PontryaginSection(vec, form, f"{self.label}[{k}]"))
        return sections


def _frozen(jets):
    """Jets of a frame element at the point its frame was built for"""
    return lambda p: list(jets)


# ---------------------------------------------------------------------------
# pointwise structure
# ---------------------------------------------------------------------------

def check_lagrangian(D: PairBundle, points: Sequence[np.ndarray], tol: Optional[float] = None) -> CheckOutcome:
    """dim D(m) = n and all pairings of a basis vanish"""
    tol = D.tol if tol is None else tol
    n = D.chart.dim
    pairing = pairing_matrix(n)
    tracker = ResidualTracker(tol)
    for p in points:
        fiber = D.fiber(p)
        if fiber.dim != n:
            tracker.fail(p, f"rank {fiber.dim}, expected {n}")
            continue
        tracker.record(float(np.max(np.abs(fiber.basis @ pairing @ fiber.basis.T))), p, "isotropy")
    return tracker.outcome()


@dataclass
class CharacteristicSpaces:
    G0: Subspace
    G1: Subspace
    P0: Subspace
    P1: Subspace


def characteristic_spaces(D: PairBundle, point) -> CharacteristicSpaces:
    """G1, P1 are the projections of D(m); G0, P0 the pure-vector and pure-form parts"""
    n = D.chart.dim
    fiber = D.fiber(point)
    if fiber.near_threshold:
        logger.warning(f"{D.label}: singular values within three decades of tol at {np.round(point, 6)}")
    V, A = split_fiber(fiber.basis)
    tol = fiber.tol
    G1 = Subspace(n, list(V), tol)
    P1 = Subspace(n, list(A), tol)
    vectors_only = Subspace(2 * n, list(np.eye(2 * n)[:n]), tol)
    forms_only = Subspace(2 * n, list(np.eye(2 * n)[n:]), tol)
    G0 = Subspace(n, [v[:n] for v in intersect(fiber, vectors_only).basis], tol)
    P0 = Subspace(n, [v[n:] for v in intersect(fiber, forms_only).basis], tol)
    return CharacteristicSpaces(G0, G1, P0, P1)


def check_characteristic_identities(D: PairBundle, points: Sequence[np.ndarray]) -> CheckOutcome:
    """G0 = P1° and P0 = G1° at every point"""
    tracker = ResidualTracker(D.tol)
    for p in points:
        spaces = characteristic_spaces(D, p)
        for name, left, right in (("G0 = P1°", spaces.G0, annihilator(spaces.P1)),
                                  ("P0 = G1°", spaces.P0, annihilator(spaces.G1))):
            if left.dim != right.dim:
                tracker.fail(p, f"{name}: dims {left.dim} vs {right.dim}")
            else:
                tracker.record(subspace_gap(left, right), p, name)
    return tracker.outcome()


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def graph_of_two_form(chart: Chart, codistribution: Sequence[OneForm], two_form: TwoForm,
                      label: Optional[str] = None, tol: float = DEFAULT_TOL) -> SectionPairs:
    """
    {(X, α) : X ∈ P°, α − i_X ω ∈ P}, spanned by (X_i, i_{X_i} ω) for a frame of P°
    and (0, β_j) for the spanning forms of P.
    """
    frame = kernel_frame(chart, codistribution)
    sections = [PontryaginSection(X, two_form.contract(X), f"({i})") for i, X in enumerate(frame)]
    sections += [PontryaginSection.from_form(beta, f"(0,β{j})") for j, beta in enumerate(codistribution)]
    return SectionPairs(chart, sections, label, tol)


def graph_of_bivector(chart: Chart, distribution: Sequence[VectorField], bivector: Bivector,
                      label: Optional[str] = None, tol: float = DEFAULT_TOL) -> SectionPairs:
    """{(v, α) : α ∈ G°, v − π♯α ∈ G}, the dual construction"""
    coframe = annihilator_frame(chart, distribution)
    sections = [PontryaginSection(bivector.sharp(a), a, f"({i})") for i, a in enumerate(coframe)]
    sections += [PontryaginSection.from_vector(X, f"(X{j},0)") for j, X in enumerate(distribution)]
    return SectionPairs(chart, sections, label, tol)


def induced_two_form(D: PairBundle, point) -> np.ndarray:
    """Ω with D(m) = graph of Ω; needs G1(m) = T_mM"""
    n = D.chart.dim
    fiber = D.fiber(point)
    V, A = split_fiber(fiber.basis)
    if fiber.dim != n or np.linalg.matrix_rank(V, tol=fiber.tol * max(1.0, np.abs(V).max())) < n:
        raise RankError("G1 is not the whole tangent space", stage="induced_two_form", points=[point])
    # α_k = Ωᵀ v_k row by row, so A = V Ω
    return np.linalg.solve(V, A)


def induced_bivector(D: PairBundle, point) -> np.ndarray:
    """Π with D(m) = graph of Π; needs P1(m) = T*_mM"""
    n = D.chart.dim
    fiber = D.fiber(point)
    V, A = split_fiber(fiber.basis)
    if fiber.dim != n or np.linalg.matrix_rank(A, tol=fiber.tol * max(1.0, np.abs(A).max())) < n:
        raise RankError("P1 is not the whole cotangent space", stage="induced_bivector", points=[point])
    # v_k = Πᵀ α_k, so V = A Π
    return np.linalg.solve(A, V)


def flat_round_trip(D: PairBundle, point) -> CheckOutcome:
    """
    Rebuild D(m) from G1 and the flat map v ↦ α|G1, and compare the flat map's
    kernel with G0.
    """
    n = D.chart.dim
    fiber = D.fiber(point)
    spaces = characteristic_spaces(D, point)
    G1 = spaces.G1
    V, A = split_fiber(fiber.basis)
    tracker = ResidualTracker(fiber.tol)
    pairs = []
    flats = []
    for g in G1.basis:
        coeffs, *_ = np.linalg.lstsq(V.T, g, rcond=None)
        alpha = A.T @ coeffs
        pairs.append(np.concatenate([g, alpha]))
        flats.append(G1.basis @ alpha)        # α restricted to G1, in G1's basis
    pairs += [np.concatenate([np.zeros(n), b]) for b in annihilator(G1).basis]
    rebuilt = Subspace(2 * n, pairs, fiber.tol)
    if not equals(rebuilt, fiber):
        tracker.fail(point, f"rebuilt dim {rebuilt.dim} vs {fiber.dim}", subspace_gap(rebuilt, fiber))
    else:
        tracker.record(subspace_gap(rebuilt, fiber), point, "rebuild")
    if G1.dim:
        flat = np.array(flats)                # row k: flat(g_k) on g_l
        _, s, vt = np.linalg.svd(flat.T)
        rank = int(np.sum(s > fiber.tol * max(1.0, s.max() if s.size else 1.0)))
        kernel = Subspace(n, list(vt[rank:] @ G1.basis), fiber.tol)
    else:
        kernel = Subspace.zero(n, fiber.tol)
    if kernel.dim != spaces.G0.dim:
        tracker.fail(point, f"ker flat dim {kernel.dim} vs G0 dim {spaces.G0.dim}")
    else:
        tracker.record(subspace_gap(kernel, spaces.G0), point, "ker flat = G0")
    return tracker.outcome()


# ---------------------------------------------------------------------------
# integrability
# ---------------------------------------------------------------------------

def bracket_membership(D: PairBundle, point, pairs: Optional[Sequence[Tuple[int, int]]] = None,
                       sections: Optional[List[PontryaginSection]] = None) -> List[Tuple[int, int, float]]:
    """Residuals of [s_i, s_j](m) against D(m) for the local sections at m"""
    sections = D.local_sections(point) if sections is None else sections
    fiber = D.fiber(point)
    if pairs is None:
        pairs = [(i, j) for i in range(len(sections)) for j in range(i + 1, len(sections))]
    out = []
    for i, j in pairs:
        value = courant_bracket(sections[i], sections[j]).at(point)
        out.append((i, j, fiber.residual(value)))
    return out


def is_closed(D: PairBundle, points: Sequence[np.ndarray], tol: float = DEFAULT_TOL,
              fd_tol: float = 1e-7) -> CheckOutcome:
    """
    Truncated Courant brackets of spanning sections stay in D. On a Lagrangian D the
    truncated bracket of two sections is skew, so unordered pairs suffice.
    """
    tracker = ResidualTracker(D.bracket_threshold(tol, fd_tol))
    for p in points:
        for i, j, residual in bracket_membership(D, p):
            tracker.record(residual, p, f"[s{i}, s{j}]")
    return tracker.outcome()


def courant_axiom_residuals(e1: PontryaginSection, e2: PontryaginSection, e3: PontryaginSection,
                            f: ScalarField, point) -> dict:
    """Residuals of the Courant algebroid axioms for the truncated bracket at one point"""
    p = np.asarray(point, dtype=float)
    br = courant_bracket
    jacobi = (br(e1, br(e2, e3)).at(p) - br(br(e1, e2), e3).at(p) - br(e2, br(e1, e3)).at(p))
    anchor = br(e1, e2).vector_part.at(p) - lie_bracket(e1.vector_part, e2.vector_part).at(p)
    leibniz = (br(e1, e2 * f).at(p) - f(p) * br(e1, e2).at(p)
               - e1.vector_part.apply(f)(p) * e2.at(p))
    metric = (e1.vector_part.apply(section_pairing(e2, e3))(p)
              - pontryagin_pairing(br(e1, e2).at(p), e3.at(p))
              - pontryagin_pairing(e2.at(p), br(e1, e3).at(p)))
    # ⟨[e1,e1], e⟩ = ½ ρ(e)⟨e1,e1⟩, tested against e2
    self_bracket = (pontryagin_pairing(br(e1, e1).at(p), e2.at(p))
                    - 0.5 * e2.vector_part.apply(section_pairing(e1, e1))(p))
    return {
        "jacobi": float(np.linalg.norm(jacobi)),
        "anchor": float(np.linalg.norm(anchor)),
        "leibniz": float(np.linalg.norm(leibniz)),
        "metric": abs(float(metric)),
        "self_bracket": abs(float(self_bracket)),
    }


# ---------------------------------------------------------------------------
# admissible functions and implicit Hamiltonian systems
# ---------------------------------------------------------------------------

@dataclass
class HamiltonianSolution:
    vector: np.ndarray
    g0_dim: int
    energy_residual: float
    admissibility_residual: float


def hamiltonian_vector(D: PairBundle, covector: np.ndarray, point) -> Tuple[np.ndarray, Subspace]:
    """
    Minimum-norm v with (v, dh) ∈ D(m), and G0(m).

    Raises InadmissibleError when dh is not in P1(m).
    """
    covector = np.asarray(covector, dtype=float)
    fiber = D.fiber(point)
    V, A = split_fiber(fiber.basis)
    coeffs, *_ = np.linalg.lstsq(A.T, covector, rcond=None)
    residual = float(np.linalg.norm(A.T @ coeffs - covector) / max(1.0, np.linalg.norm(covector)))
    if residual > fiber.tol * 10:
        raise InadmissibleError(f"differential not in P1 (residual {residual:.3e}) at {np.round(point, 6)}")
    v = V.T @ coeffs
    g0 = characteristic_spaces(D, point).G0
    if g0.dim:
        v = v - g0.projector() @ v
    return v, g0


def solve_implicit_hamiltonian(D: PairBundle, H: ScalarField, point) -> HamiltonianSolution:
    """(X(m), dH(m)) ∈ D(m); unique when G0(m) = {0}"""
    dh = H.jet(point).grad
    fiber = D.fiber(point)
    _, A = split_fiber(fiber.basis)
    v, g0 = hamiltonian_vector(D, dh, point)
    if g0.dim:
        logger.debug(f"{D.label}: Hamiltonian vector defined up to a {g0.dim}-dim G0 at {np.round(point, 6)}")
    coeffs, *_ = np.linalg.lstsq(A.T, dh, rcond=None)
    admissibility = float(np.linalg.norm(A.T @ coeffs - dh))
    return HamiltonianSolution(v, g0.dim, float(dh @ v), admissibility)


BRACKET_CONVENTION = "{f, g} = X_g[f] with (X_g, dg) in D; the other convention flips every sign"


def dirac_poisson_bracket(D: PairBundle, f: ScalarField, g: ScalarField, point) -> float:
    """{f, g}(m) = X_g[f](m) with (X_g, dg) ∈ D"""
    df = f.jet(point).grad
    dg = g.jet(point).grad
    x_g, _ = hamiltonian_vector(D, dg, point)
    return float(df @ x_g)


def bracket_well_definedness(D: PairBundle, f: ScalarField, g: ScalarField, point,
                             rng: Optional[np.random.Generator] = None) -> float:
    """|X_g[f] + X_f[g]| with each X shifted by a random element of G0"""
    rng = rng or np.random.default_rng(0)
    df = f.jet(point).grad
    dg = g.jet(point).grad
    x_f, g0 = hamiltonian_vector(D, df, point)
    x_g, _ = hamiltonian_vector(D, dg, point)
    if g0.dim:
        x_f = x_f + g0.basis.T @ rng.normal(size=g0.dim)
        x_g = x_g + g0.basis.T @ rng.normal(size=g0.dim)
    return abs(float(df @ x_g + dg @ x_f))


# ---------------------------------------------------------------------------
# restriction
# ---------------------------------------------------------------------------

def restricted_fiber(D: PairBundle, embedding: ChartMap, point) -> Subspace:
    """{(v, ι*α) : (Tι v, α) ∈ D(ι(n))} at a point n of the submanifold chart"""
    m = embedding(point)
    jac = embedding.jacobian(point)                 # N × n
    fiber = D.fiber(m)
    V, A = split_fiber(fiber.basis)                  # rows
    N, n = jac.shape
    system = np.hstack([V.T, -jac])                  # V c = J v
    _, s, vt = np.linalg.svd(system)
    scale = max(1.0, s.max() if s.size else 1.0)
    rank = int(np.sum(s > fiber.tol * scale))
    null = vt[rank:]
    pairs = [np.concatenate([row[fiber.dim:], jac.T @ (A.T @ row[:fiber.dim])]) for row in null]
    return Subspace(2 * n, pairs, fiber.tol)


def restrict_to_level_set(D: PairBundle, embedding: ChartMap, label: Optional[str] = None,
                          fd_step: float = DEFAULT_FD_STEP) -> SampledPairs:
    """D_N(n) = D(ι n) ∩ (TN × T*M), pulled back to T*N"""
    if not embedding.target.same_as(D.chart):
        raise ChartMismatchError(f"embedding targets {embedding.target.name!r}, D lives on {D.chart.name!r}")
    n = embedding.source.dim

    def fiber_fn(point):
        out = restricted_fiber(D, embedding, point)
        if out.dim != n:
            raise RankError(f"restricted fiber has rank {out.dim}, expected {n}",
                            stage="restrict_to_level_set", points=[point])
        return out

    return SampledPairs(embedding.source, fiber_fn, label or f"{D.label}|N", D.tol, fd_step)


def check_restriction_rank(D: PairBundle, embedding: ChartMap, points: Sequence[np.ndarray]) -> CheckOutcome:
    """dim(G1 ∩ TN) is the same at every sample of N"""
    dims = []
    tracker = ResidualTracker(0.0)
    for p in points:
        m = embedding(p)
        G1 = characteristic_spaces(D, m).G1
        tangent = Subspace(D.chart.dim, list(embedding.jacobian(p).T), D.tol)
        dim = intersect(G1, tangent).dim
        if dims and dim != dims[0][1]:
            raise RankError(f"dim(G1 ∩ TN) is {dims[0][1]} at one point and {dim} at another",
                            stage="restrict_to_level_set", points=[dims[0][0], p])
        dims.append((p, dim))
        tracker.record(0.0, p)
    outcome = tracker.outcome()
    outcome.notes["dim"] = dims[0][1] if dims else None
    return outcome


def fiber_of_sections(chart: Chart, sections: Sequence[PontryaginSection], point,
                      tol: float = DEFAULT_TOL) -> Subspace:
    return Subspace(2 * chart.dim, [s.at(point) for s in sections], tol)


def compare_bundles(left: Union[PairBundle, Callable], right: PairBundle,
                    points: Sequence[np.ndarray], tol: Optional[float] = None) -> CheckOutcome:
    """Subspace equality of two bundles at every point"""
    tol = right.tol if tol is None else tol
    tracker = ResidualTracker(tol)
    left_fiber = left.fiber if isinstance(left, PairBundle) else left
    for p in points:
        a, b = left_fiber(p), right.fiber(p)
        if a.dim != b.dim:
            tracker.fail(p, f"dims {a.dim} vs {b.dim}")
            continue
        tracker.record(subspace_gap(a, b), p)
    return tracker.outcome()
