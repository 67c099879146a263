"""
Kinetic systems with linear velocity constraints and their constraint phase space.

Q has coordinates q_1..q_d, T*Q uses q followed by p_<q>. The constraint phase
space M = 𝔽L(𝒟) is charted by q and the free momenta; the k eliminated momenta are
functions on that chart:

    u   = ((g E)_free)⁻¹ p_free          (E: frame of 𝒟 = ker φ)
    p_e = (g E)_e u

so g is never inverted and a metric that is only positive on 𝒟 is fine.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from ..dirac_core import PairBundle, SectionPairs, characteristic_spaces, graph_of_two_form
from ..errors import DimensionError, InadmissibleError, InputError
from ..jet_calculus import (Chart, ChartMap, Jet2, OneForm, ScalarField, TwoForm, VectorField,
                            compose, jet_solve, kernel_frame, sample_points)
from ..outcomes import CheckOutcome, ResidualTracker
from ..subspace_lab import DEFAULT_TOL, Subspace

MOMENTUM_PREFIX = "p_"

# smallest acceptable relative singular value of the elimination block
ELIMINATION_FLOOR = 1e-8
ELIMINATION_PROBES = 16


def momentum_name(coord: str) -> str:
    return MOMENTUM_PREFIX + coord


@dataclass
class MechanicalSystem:
    """Q, a kinetic metric, a potential and k pointwise independent constraint forms"""

    name: str
    q_chart: Chart
    metric: List[List[ScalarField]]
    constraints: List[OneForm] = field(default_factory=list)
    potential: Optional[ScalarField] = None

    def __post_init__(self):
        d = self.q_chart.dim
        if len(self.metric) != d or any(len(row) != d for row in self.metric):
            raise DimensionError(f"{self.name}: metric must be {d}x{d}")
        for row in self.metric:
            for entry in row:
                if not entry.chart.same_as(self.q_chart):
                    raise InputError(f"{self.name}: metric entry on {entry.chart.name!r}")
        for phi in self.constraints:
            if not phi.chart.same_as(self.q_chart):
                raise InputError(f"{self.name}: constraint form on {phi.chart.name!r}")
        if len(self.constraints) >= d:
            raise InputError(f"{self.name}: {len(self.constraints)} constraints leave no motion on a "
                             f"{d}-dim configuration space")
        if self.potential is not None and not self.potential.chart.same_as(self.q_chart):
            raise InputError(f"{self.name}: potential on {self.potential.chart.name!r}")

    @property
    def d(self) -> int:
        return self.q_chart.dim

    @property
    def k(self) -> int:
        return len(self.constraints)

    @property
    def momenta(self) -> List[str]:
        return [momentum_name(c) for c in self.q_chart.coords]

    def metric_at(self, q) -> np.ndarray:
        return np.array([[entry(q) for entry in row] for row in self.metric])

    def constraint_matrix(self, q) -> np.ndarray:
        """k × d, row j = φʲ(q)"""
        if not self.constraints:
            return np.zeros((0, self.d))
        return np.array([phi.at(q) for phi in self.constraints])

    def distribution_frame(self) -> List[VectorField]:
        """Frame of 𝒟 = ker φ on Q"""
        return kernel_frame(self.q_chart, self.constraints)


def legendre(system: MechanicalSystem, q, v) -> np.ndarray:
    """𝔽L(q, v) = g(q) v"""
    return system.metric_at(q) @ np.asarray(v, dtype=float)


def legendre_inverse(system: MechanicalSystem, q, p) -> np.ndarray:
    """g(q)⁻¹ p; needs a metric that is positive definite on all of TQ"""
    g = system.metric_at(q)
    s = np.linalg.svd(g, compute_uv=False)
    if s.min() <= DEFAULT_TOL * max(1.0, s.max()):
        raise InadmissibleError(f"{system.name}: metric is degenerate at {np.round(q, 6)}")
    return np.linalg.solve(g, np.asarray(p, dtype=float))


def check_metric(system: MechanicalSystem, points: Sequence[np.ndarray],
                 tol: float = DEFAULT_TOL) -> CheckOutcome:
    """g symmetric and positive definite on 𝒟 at every sample of Q"""
    tracker = ResidualTracker(tol)
    frame = system.distribution_frame()
    for q in points:
        g = system.metric_at(q)
        tracker.record(np.abs(g - g.T).max() / max(1.0, np.abs(g).max()), q, "symmetry")
        E = np.array([X.at(q) for X in frame]).T
        restricted = E.T @ g @ E
        lowest = np.linalg.eigvalsh(0.5 * (restricted + restricted.T)).min()
        if lowest <= tol * max(1.0, np.abs(restricted).max()):
            tracker.fail(q, f"metric not positive on the constraint distribution (eigenvalue {lowest:.3e})")
    return tracker.outcome()


def check_constraint_independence(system: MechanicalSystem, points: Sequence[np.ndarray]) -> CheckOutcome:
    """φ¹∧…∧φᵏ ≠ 0 at every sample"""
    tracker = ResidualTracker(0.0)
    for q in points:
        rank = np.linalg.matrix_rank(system.constraint_matrix(q)) if system.k else 0
        if rank != system.k:
            tracker.fail(q, f"constraint forms have rank {rank} of {system.k}")
        else:
            tracker.record(0.0, q)
    return tracker.outcome()


# ---------------------------------------------------------------------------
# constraint phase space
# ---------------------------------------------------------------------------

def _elimination_block(system: MechanicalSystem, frame: List[VectorField], q,
                       eliminated: Sequence[int]) -> np.ndarray:
    g = system.metric_at(q)
    E = np.array([X.at(q) for X in frame]).T if frame else np.zeros((system.d, 0))
    free = [a for a in range(system.d) if a not in eliminated]
    return (g @ E)[free]


def _block_score(block: np.ndarray) -> float:
    if block.size == 0:
        return 1.0
    s = np.linalg.svd(block, compute_uv=False)
    return float(s.min() / max(1.0, s.max()))


def _rank_eliminations(system: MechanicalSystem, probes: Sequence[np.ndarray]) -> List[Tuple[float, Tuple[int, ...]]]:
    frame = system.distribution_frame()
    ranked = []
    for combo in itertools.combinations(range(system.d), system.k):
        score = min(_block_score(_elimination_block(system, frame, q, combo)) for q in probes)
        ranked.append((score, combo))
    ranked.sort(key=lambda item: (-item[0], item[1]))
    return ranked


def choose_eliminated(system: MechanicalSystem, eliminate: Optional[Sequence[str]] = None,
                      probes: Optional[Sequence[np.ndarray]] = None) -> Tuple[str, ...]:
    """
    Validate the requested dependent momenta, or pick the best conditioned block.

    Raises InputError naming usable alternatives when the block is singular.
    """
    names = system.momenta
    if probes is None:
        probes = sample_points(system.q_chart, ELIMINATION_PROBES, np.random.default_rng(0))
    ranked = _rank_eliminations(system, probes)
    good = [tuple(names[a] for a in combo) for score, combo in ranked if score > ELIMINATION_FLOOR]

    if eliminate is None:
        if not good:
            raise InputError(f"{system.name}: no choice of {system.k} dependent momenta gives an "
                             f"invertible elimination block")
        logger.debug(f"{system.name}: eliminating {good[0]} (best conditioned block)")
        return good[0]

    eliminate = tuple(eliminate)
    if len(eliminate) != system.k:
        raise InputError(f"{system.name}: {len(eliminate)} momenta to eliminate for {system.k} constraints")
    unknown = [p for p in eliminate if p not in names]
    if unknown:
        raise InputError(f"{system.name}: unknown momenta {unknown}; momenta are {names}")
    combo = tuple(sorted(names.index(p) for p in eliminate))
    score = dict((c, s) for s, c in ranked)[combo]
    if score <= ELIMINATION_FLOOR:
        raise InputError(f"{system.name}: elimination block for {list(eliminate)} is singular; "
                         f"try one of {[list(g) for g in good[:3]]}")
    return tuple(names[a] for a in combo)


@dataclass
class ConstraintPhase:
    """M = 𝔽L(𝒟) charted by q and the free momenta"""

    system: MechanicalSystem
    m_chart: Chart
    tq_chart: Chart
    eliminated: Tuple[str, ...]
    free: Tuple[str, ...]
    embedding: Optional[ChartMap] = None       # M → T*Q
    projection: Optional[ChartMap] = None      # M → Q

    @property
    def d(self) -> int:
        return self.system.d

    @property
    def n(self) -> int:
        return self.m_chart.dim

    def q_jets(self, point) -> List[Jet2]:
        """q coordinates as jets on M (q comes first in the M chart)"""
        n = self.n
        return [Jet2.variable(i, point[i], n) for i in range(self.d)]

    def lift_q(self, f: ScalarField) -> ScalarField:
        """f∘π for f on Q"""
        return self.projection.pull_scalar(f)

    def momentum(self, coord: str) -> ScalarField:
        """P_a on M, free or eliminated"""
        index = self.system.q_chart.index(coord)
        return self.embedding.component(self.d + index)

    def momenta(self) -> List[ScalarField]:
        return [self.momentum(c) for c in self.system.q_chart.coords]

    def phase_jets(self, point) -> Dict[str, List[Jet2]]:
        return _phase_jets(self, np.asarray(point, dtype=float))

    def eliminated_expressions(self) -> Dict[str, ScalarField]:
        names = self.system.momenta
        return {p: self.embedding.component(self.d + names.index(p)) for p in self.eliminated}


def _phase_jets(phase: ConstraintPhase, point: np.ndarray) -> Dict[str, List[Jet2]]:
    """Jets on M of the momenta P, the constrained velocity u and the frame E of 𝒟"""
    system = phase.system
    d, n = system.d, phase.n
    q_inner = phase.q_jets(point)
    q = point[:d]

    def on_m(field: ScalarField) -> Jet2:
        return compose(field.jet(q), q_inner)

    g = [[on_m(entry) for entry in row] for row in system.metric]
    frame = system.distribution_frame()
    E = [[compose(j, q_inner) for j in X.jets(q)] for X in frame]      # r × d
    r = len(E)
    gE = [[sum((g[a][b] * E[j][b] for b in range(d)), Jet2.constant(0.0, n)) for j in range(r)]
          for a in range(d)]
    names = system.momenta
    free_rows = [names.index(p) for p in phase.free]
    free_values = [Jet2.variable(d + i, point[d + i], n) for i in range(len(free_rows))]
    try:
        u = [row[0] for row in jet_solve([gE[a] for a in free_rows], [[p] for p in free_values])]
    except ZeroDivisionError:
        raise InadmissibleError(f"elimination block singular at {np.round(point, 6)}") from None
    P = []
    for a in range(d):
        if a in free_rows:
            P.append(free_values[free_rows.index(a)])
        else:
            P.append(sum((gE[a][j] * u[j] for j in range(r)), Jet2.constant(0.0, n)))
    velocity = [sum((E[j][a] * u[j] for j in range(r)), Jet2.constant(0.0, n)) for a in range(d)]
    return {"q": q_inner, "P": P, "u": u, "velocity": velocity}


def build_constraint_phase(system: MechanicalSystem, eliminate: Optional[Sequence[str]] = None,
                           momentum_box: Sequence[float] = (-2.0, 2.0),
                           probes: Optional[Sequence[np.ndarray]] = None,
                           box: Optional[Dict[str, Sequence[float]]] = None) -> ConstraintPhase:
    """The chart of M with the eliminated momenta solved from the constraints"""
    eliminated = choose_eliminated(system, eliminate, probes)
    names = system.momenta
    free = tuple(p for p in names if p not in eliminated)
    chart_box = system.q_chart.box_dict()
    chart_box.update({p: list(momentum_box) for p in names})
    chart_box.update(box or {})
    coords = list(system.q_chart.coords)
    m_chart = Chart.build(f"M({system.name})", coords + list(free), chart_box)
    tq_chart = Chart.build(f"T*{system.name}", coords + names, chart_box)
    phase = ConstraintPhase(system, m_chart, tq_chart, eliminated, free)

    def embed(p):
        jets = _phase_jets(phase, p)
        return jets["q"] + jets["P"]

    phase.embedding = ChartMap(m_chart, tq_chart, embed, "ι")
    phase.projection = ChartMap(m_chart, system.q_chart, phase.q_jets, "π_Q")
    logger.debug(f"{system.name}: M chart {m_chart.coords}, eliminated {eliminated}")
    return phase


def omega_M(phase: ConstraintPhase) -> TwoForm:
    """ι*ω_can = Σ_a dq_a ∧ dP_a"""
    d, n = phase.d, phase.n

    def fn(p):
        P = _phase_jets(phase, p)["P"]
        w = [[Jet2.constant(0.0, n) for _ in range(n)] for _ in range(n)]
        for a in range(d):
            dP = [P[a].derivative(j) for j in range(n)]
            for j in range(n):
                if j == a:
                    continue
                w[a][j] = w[a][j] + dP[j]
                w[j][a] = w[j][a] - dP[j]
        return w

    return TwoForm(phase.m_chart, fn, "ω_M")


def hamiltonian_on_M(phase: ConstraintPhase) -> ScalarField:
    """½ uᵀ(EᵀgE)u + V, i.e. ½ ⟨P, E u⟩ + V"""
    potential = phase.system.potential
    lifted = None if potential is None else phase.lift_q(potential)
    n = phase.n

    def fn(p):
        jets = _phase_jets(phase, p)
        kinetic = sum((a * b for a, b in zip(jets["P"], jets["velocity"])), Jet2.constant(0.0, n)).scaled(0.5)
        return kinetic if lifted is None else kinetic + lifted.jet(p)

    return ScalarField(phase.m_chart, fn, "H")


def constraint_forms_on_M(phase: ConstraintPhase) -> List[OneForm]:
    """π*φʲ, spanning ℋ°"""
    d, n = phase.d, phase.n
    forms = []
    for j, phi in enumerate(phase.system.constraints):
        def fn(p, phi=phi):
            q_inner = phase.q_jets(p)
            comps = [compose(c, q_inner) for c in phi.jets(p[:d])]
            return comps + [Jet2.constant(0.0, n) for _ in range(n - d)]

        forms.append(OneForm(phase.m_chart, fn, f"π*φ{j}"))
    return forms


def horizontal_frame(phase: ConstraintPhase) -> List[VectorField]:
    """Smooth frame of ℋ = ker π*φ"""
    return kernel_frame(phase.m_chart, constraint_forms_on_M(phase))


def horizontal_H(phase: ConstraintPhase, point, tol: float = DEFAULT_TOL) -> Subspace:
    n = phase.n
    if not phase.system.constraints:
        return Subspace.full(n, tol)
    rows = [phi.at(point) for phi in constraint_forms_on_M(phase)]
    return Subspace(n, list(_null_rows(np.array(rows), tol)), tol)


def horizontal_annihilator_basis(phase: ConstraintPhase, point) -> np.ndarray:
    """k × n, rows = π*φʲ(m)"""
    if not phase.system.constraints:
        return np.zeros((0, phase.n))
    return np.array([phi.at(point) for phi in constraint_forms_on_M(phase)])


def _null_rows(matrix: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    _, s, vt = np.linalg.svd(matrix)
    rank = int(np.sum(s > tol * max(1.0, s.max() if s.size else 1.0)))
    return vt[rank:]


def nonholonomic_dirac(phase: ConstraintPhase, label: str = "D", tol: float = DEFAULT_TOL) -> SectionPairs:
    """D(m) = {(v, α) : v ∈ ℋ, α − i_v ω_M ∈ ℋ°}"""
    return graph_of_two_form(phase.m_chart, constraint_forms_on_M(phase), omega_M(phase), label, tol)


def check_omega_h_nondegenerate(phase: ConstraintPhase, points: Sequence[np.ndarray],
                                tol: float = DEFAULT_TOL) -> CheckOutcome:
    """ω_M restricted to ℋ × ℋ has full rank"""
    omega = omega_M(phase)
    tracker = ResidualTracker(tol)
    for p in points:
        H = horizontal_H(phase, p, tol).basis
        restricted = H @ omega.at(p) @ H.T
        s = np.linalg.svd(restricted, compute_uv=False)
        lowest = float(s.min() / max(1.0, s.max())) if s.size else 1.0
        if lowest <= tol:
            tracker.fail(p, f"ω_M degenerate on ℋ (relative singular value {lowest:.3e})")
        else:
            tracker.record(0.0, p)
    return tracker.outcome()


def check_constraint_membership(phase: ConstraintPhase, points: Sequence[np.ndarray],
                                tol: float = DEFAULT_TOL) -> CheckOutcome:
    """[g; Φ] v = [p; 0] is solvable at every embedded point"""
    system = phase.system
    d = system.d
    tracker = ResidualTracker(tol)
    for m in points:
        image = phase.embedding(m)
        q, p = image[:d], image[d:]
        system_matrix = np.vstack([system.metric_at(q), system.constraint_matrix(q)])
        rhs = np.concatenate([p, np.zeros(system.k)])
        v, *_ = np.linalg.lstsq(system_matrix, rhs, rcond=None)
        residual = np.linalg.norm(system_matrix @ v - rhs) / max(1.0, np.linalg.norm(rhs))
        tracker.record(residual, m, "φ(𝔽L⁻¹ p)")
    return tracker.outcome()


def check_full_p1_trivial_g0(D: PairBundle, points: Sequence[np.ndarray]) -> CheckOutcome:
    """G0 = {0} and P1 = T*M: the nonholonomic D is the graph of a bivector"""
    n = D.chart.dim
    tracker = ResidualTracker(0.0)
    for p in points:
        spaces = characteristic_spaces(D, p)
        if spaces.G0.dim or spaces.P1.dim != n:
            tracker.fail(p, f"dim G0 = {spaces.G0.dim}, dim P1 = {spaces.P1.dim}")
        else:
            tracker.record(0.0, p)
    return tracker.outcome()
