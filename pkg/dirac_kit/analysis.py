"""
Analysis pipeline for one system and one action.

Stages run in a fixed order and each adds named check records; a RankError aborts the
run with its stage named. The report is a plain dict that serializes deterministically.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from .dirac_core import (BRACKET_CONVENTION, SectionPairs, bracket_well_definedness,
                         check_characteristic_identities, check_lagrangian, check_restriction_rank,
                         compare_bundles, dirac_poisson_bracket,
                         flat_round_trip, graph_of_bivector, graph_of_two_form, induced_two_form, is_closed,
                         solve_implicit_hamiltonian)
from .errors import InadmissibleError, RankError
from .jet_calculus import Chart, ScalarField, TwoForm, d_two_form_components, frame_steps, stencil_jets
from .nonholonomic import (check_completion_uniqueness, check_conserved_annihilate_DG, check_conserved_on_leaf,
                           check_constraint_independence, check_constraint_membership,
                           check_dg_characterization, check_full_p1_trivial_g0, check_graph_of_nondegenerate_form,
                           check_hv_constant_rank, check_leaf_two_form, check_lift_tangency, check_metric,
                           check_momentum_identity, check_noether_pair_in_D, check_noether_residuals,
                           check_omega_h_nondegenerate, check_omega_hbar, check_reaction_lemma, check_rplusv,
                           check_section_in_g_H, check_u_pairs, conserved_criterion, horizontal_annihilator_U,
                           horizontal_H, is_involutive_DG, leaf_reduce, momentum_function, noether_one_form,
                           omega_M, optimal_distribution_DG, reaction_codistribution_R, reduced_h_bar_omega)
from .outcomes import CheckOutcome, ResidualTracker, Witness
from .sampling import draw_points, map_points
from .settings import DEFAULT_SETTINGS
from .subspace_lab import Subspace, subspace_gap
from .symmetry_reduction import (SymmetryAction, check_anti_homomorphism, check_closedness_preserved,
                                 check_dirac_invariance, check_freeness, check_g0_pushdown, check_k_perp_brackets,
                                 check_quotient, check_reduced_bracket_identity, check_reduced_dynamics,
                                 check_right_inverse_independence, d_cap_k_perp, reduce_dirac, verify_method_b)
from .system_config import (ActionSetup, SystemSetup, bivector_from_entries, form_from_doc, scalar,
                            sections_from_doc, two_form_from_entries, vector_from_doc)

SCHEMA = "dirac-kit/1"
STATUSES = ("pass", "fail", "skipped", "xfail")

# digits kept for floats in reports
REPORT_DIGITS = 12

LEAF_CHECKS = ["leaf_conserved_values", "leaf_restriction_rank", "leaf_lagrangian", "leaf_conserved_annihilate_dg",
               "d_rho_lagrangian", "d_rho_nondegenerate", "leaf_two_form", "leaf_reduced_bracket_identity"]


def _clean(value: Any) -> Any:
    """Rounded, JSON-safe copy"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
        rounded = round(value, REPORT_DIGITS)
        return 0.0 if rounded == 0 else rounded
    return value


@dataclass
class CheckRecord:
    name: str
    status: str
    max_residual: Optional[float] = None
    witness: Optional[Witness] = None
    detail: str = ""
    notes: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return _clean({
            "name": self.name,
            "status": self.status,
            "max_residual": self.max_residual,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "detail": self.detail,
            "notes": self.notes,
        })


class AnalysisRunner:
    """分析运行器: one system, one action"""

    analysis_steps = [
        "invariance", "dirac_structure", "characteristics", "k_perp", "reduction", "method_b",
        "omega_hbar", "momentum", "noether", "reaction", "optimal_distribution", "leaf", "expected",
    ]

    def __init__(self, setup: SystemSetup, action_name: Optional[str] = None,
                 settings: Optional[Dict[str, Any]] = None):
        self.settings = dict(DEFAULT_SETTINGS)
        self.settings.update(settings or {})
        self.setup = setup
        self.entry: ActionSetup = setup.action(action_name)
        self.phase = setup.phase
        self.D = setup.D
        self.H = setup.hamiltonian
        self.action = self.entry.action
        self.quotient = self.entry.quotient

        self.tol = float(self.settings["tol"])
        self.fd_tol = float(self.settings["fd_tol"])
        self.fd_step = float(self.settings["fd_step"])
        self.seed = int(self.settings["seed"])
        self.samples = int(self.settings["samples"])
        self.n_jobs = int(self.settings["n_jobs"])
        closed = int(self.settings["closedness_samples"])

        self.points = draw_points(self.phase.m_chart, self.samples, self.seed)
        self.reduced_points = draw_points(self.quotient.reduced_chart, self.samples, self.seed + 1)
        self.q_points = draw_points(self.phase.system.q_chart, self.samples, self.seed + 2)
        self.closed_points = self.points[:closed]
        self.reduced_closed = self.reduced_points[:closed]

        self.records: List[CheckRecord] = []
        self.objects: Dict[str, Any] = {}
        self.D_red = None
        self.h_invariant = False
        self.stage = ""

    # ------------------------------------------------------------------
    # records
    # ------------------------------------------------------------------

    def _add(self, record: CheckRecord):
        if any(r.name == record.name for r in self.records):
            raise ValueError(f"check {record.name!r} recorded twice")
        level = "WARNING" if record.status == "fail" else "DEBUG"
        logger.log(level, f"{record.name}: {record.status} (max residual {record.max_residual})")
        self.records.append(record)

    def _status(self, name: str, ok: bool) -> str:
        if ok:
            return "pass"
        return "xfail" if name in self.entry.expected_failures else "fail"

    def record(self, name: str, outcome: CheckOutcome, detail: str = ""):
        self._add(CheckRecord(name, self._status(name, outcome.ok), outcome.max_residual, outcome.witness,
                              detail, dict(outcome.notes)))

    def skip(self, name: str, reason: str):
        self._add(CheckRecord(name, "skipped", detail=reason))

    def check(self, name: str, fn: Callable[[], CheckOutcome]):
        """Run one check; an inadmissible input becomes a failed record"""
        try:
            outcome = fn()
        except InadmissibleError as exc:
            self._add(CheckRecord(name, self._status(name, False), None, None, str(exc)))
            return None
        self.record(name, outcome)
        return outcome

    # ------------------------------------------------------------------
    # comparison helpers
    # ------------------------------------------------------------------

    def _compare_scalars(self, points: Sequence[np.ndarray], computed: Callable[[np.ndarray], float],
                         expected: ScalarField, tol: float, relative: bool = False, detail: str = "") -> CheckOutcome:
        values = map_points(lambda p: (computed(p), expected(p)), points, self.n_jobs)
        tracker = ResidualTracker(tol)
        for p, (got, want) in zip(points, values):
            scale = max(1.0, abs(want)) if relative else 1.0
            tracker.record(abs(got - want) / scale, p, detail)
        return tracker.outcome()

    def _compare_spans(self, points: Sequence[np.ndarray], computed: Callable[[np.ndarray], Subspace],
                       expected_rows: Callable[[np.ndarray], List[np.ndarray]], ambient: int) -> CheckOutcome:
        def both(p):
            return computed(p), Subspace(ambient, expected_rows(p), self.tol)

        pairs = map_points(both, points, self.n_jobs)
        tracker = ResidualTracker(self.tol)
        for p, (got, want) in zip(points, pairs):
            if got.dim != want.dim:
                tracker.fail(p, f"dims {got.dim} vs {want.dim}", subspace_gap(got, want))
            else:
                tracker.record(subspace_gap(got, want), p)
        return tracker.outcome()

    def _expected_bundle(self, chart: Chart, sections, params) -> SectionPairs:
        return SectionPairs(chart, sections_from_doc(chart, sections, params), "expected", self.tol)

    # ------------------------------------------------------------------
    # pipeline
    # ------------------------------------------------------------------

    def run(self) -> Dict[str, Any]:
        """运行全部分析步骤"""
        logger.info(f"Analyzing {self.setup.name} / {self.entry.name} "
                    f"({self.samples} samples, seed {self.seed}, tol {self.tol})")
        for step in self.analysis_steps:
            self.stage = step
            logger.info(f"Running {step}...")
            try:
                getattr(self, f"step_{step}")()
            except RankError as exc:
                if exc.stage:
                    raise
                raise RankError(str(exc), step, exc.points) from exc
        return self.report()

    def step_invariance(self):
        action, points = self.action, self.points
        self.check("freeness", lambda: check_freeness(action, points))
        self.check("anti_homomorphism", lambda: check_anti_homomorphism(action, self.closed_points, self.tol))
        self.check("quotient", lambda: check_quotient(action, self.quotient, points, self.reduced_points, self.tol))
        if action.q_generators and action.lifted:
            self.check("lift_tangency", lambda: check_lift_tangency(self.phase, action, points, self.tol))
        else:
            self.skip("lift_tangency", "no cotangent lift")
        self.check("dirac_invariance",
                   lambda: check_dirac_invariance(self.D, action, self.closed_points, self.tol, self.fd_tol))
        outcome = self._hamiltonian_invariance(self.H, action, self.points)
        self.h_invariant = outcome.ok
        self.record("hamiltonian_invariance", outcome)

    def _hamiltonian_invariance(self, H: ScalarField, action: SymmetryAction, points) -> CheckOutcome:
        tracker = ResidualTracker(self.tol)
        for p in points:
            dh = H.jet(p).grad
            scale = max(1.0, float(np.linalg.norm(dh)))
            for a, xi in enumerate(action.generators):
                tracker.record(abs(float(dh @ xi.at(p))) / scale, p, f"dH(ξ{a})")
        return tracker.outcome()

    def step_dirac_structure(self):
        system, phase, D = self.phase.system, self.phase, self.D
        self.check("metric", lambda: check_metric(system, self.q_points, self.tol))
        self.check("constraint_independence", lambda: check_constraint_independence(system, self.q_points))
        self.check("constraint_membership", lambda: check_constraint_membership(phase, self.points, self.tol))
        self.check("omega_h_nondegenerate", lambda: check_omega_h_nondegenerate(phase, self.points, self.tol))
        self.check("lagrangian", lambda: check_lagrangian(D, self.points))
        verdict = is_closed(D, self.closed_points, self.tol, self.fd_tol)
        self._add(CheckRecord("d_closed_verdict", "pass", verdict.max_residual, verdict.witness,
                              notes={"closed": verdict.ok}))

    def step_characteristics(self):
        D = self.D
        self.check("characteristic_identities", lambda: check_characteristic_identities(D, self.points))

        def round_trip():
            tracker = ResidualTracker(self.tol)
            for p in self.points:
                tracker.merge(flat_round_trip(D, p), p, "flat")
            return tracker.outcome()

        self.check("flat_round_trip", round_trip)
        self.check("p1_full_g0_trivial", lambda: check_full_p1_trivial_g0(D, self.points))

        def energy():
            tracker = ResidualTracker(self.tol)
            for p in self.points:
                solution = solve_implicit_hamiltonian(D, self.H, p)
                scale = max(1.0, float(np.linalg.norm(self.H.jet(p).grad)) ** 2)
                tracker.record(abs(solution.energy_residual) / scale, p, "dH(X_H)")
            return tracker.outcome()

        self.check("energy_conservation", energy)

    def step_k_perp(self):
        pairs, rank = d_cap_k_perp(self.D, self.action, self.points, self.fd_step)
        self._add(CheckRecord("k_perp_rank", "pass", 0.0, notes={"rank": rank.rank, "points": rank.points}))
        self.objects["k_perp_rank"] = rank.rank
        self.check("u_pairs", lambda: check_u_pairs(self.D, self.phase, self.action, self.points))
        self.check("k_perp_brackets",
                   lambda: check_k_perp_brackets(pairs, self.action, self.closed_points, self.fd_tol))

    def step_reduction(self):
        D, quotient = self.D, self.quotient
        D_red = reduce_dirac(D, self.action, quotient, "D_red", self.fd_step)
        self.D_red = D_red
        q_points = self.reduced_points
        self.check("d_red_lagrangian", lambda: check_lagrangian(D_red, q_points))
        self.check("d_red_characteristics", lambda: check_characteristic_identities(D_red, q_points))
        rng = np.random.default_rng(self.seed + 5)
        self.check("right_inverse_independence",
                   lambda: check_right_inverse_independence(D, self.action, quotient, q_points, rng, self.tol))
        self.check("g0_pushdown", lambda: check_g0_pushdown(D, quotient, D_red, q_points))
        if self.h_invariant:
            self.check("reduced_dynamics",
                       lambda: check_reduced_dynamics(D, quotient, D_red, self.H, q_points, self.tol))
            self.check("reduced_bracket_identity",
                       lambda: check_reduced_bracket_identity(D, quotient, D_red, self.H, q_points, self.tol))
        else:
            self.skip("reduced_dynamics", "H is not invariant")
            self.skip("reduced_bracket_identity", "H is not invariant")
        self.check("reduced_bracket_skew", self._reduced_bracket_skew)
        self.check("reduced_bracket_well_defined", self._reduced_bracket_well_defined)

        verdict = is_closed(D_red, self.reduced_closed, self.tol, self.fd_tol)
        want = self.entry.expected.get("d_red_closed")
        ok = True if want is None else verdict.ok == bool(want)
        self._add(CheckRecord("d_red_closed", self._status("d_red_closed", ok), verdict.max_residual,
                              verdict.witness, "" if ok else f"expected closed={want}", {"closed": verdict.ok}))
        self.check("closedness_preserved",
                   lambda: check_closedness_preserved(D, D_red, self.closed_points, self.reduced_closed,
                                                      self.tol, self.fd_tol))
        self.objects["d_red_bases"] = [
            {"point": q, "basis": D_red.fiber(q).basis}
            for q in self.reduced_points[:int(self.settings["report_points"])]
        ]

    def _coordinate_pairs(self, measure: Callable[[ScalarField, ScalarField, np.ndarray], float]) -> CheckOutcome:
        """measure over pairs of reduced coordinates; inadmissible pairs are left out"""
        chart = self.quotient.reduced_chart
        coords = [ScalarField.coordinate(chart, c) for c in chart.coords]
        tracker = ResidualTracker(self.tol)
        admissible = 0
        for q in self.reduced_points[:int(self.settings["closedness_samples"])]:
            for i in range(len(coords)):
                for j in range(i + 1, len(coords)):
                    try:
                        residual = measure(coords[i], coords[j], q)
                    except InadmissibleError:
                        continue
                    admissible += 1
                    tracker.record(residual, q, f"{{{chart.coords[i]}, {chart.coords[j]}}}")
        outcome = tracker.outcome()
        outcome.notes["admissible_pairs"] = admissible
        outcome.notes["convention"] = BRACKET_CONVENTION
        return outcome

    def _reduced_bracket_skew(self) -> CheckOutcome:
        """{f, g} + {g, f} = 0 for reduced coordinate functions"""
        def skew(f, g, q):
            return abs(dirac_poisson_bracket(self.D_red, f, g, q) + dirac_poisson_bracket(self.D_red, g, f, q))

        return self._coordinate_pairs(skew)

    def _reduced_bracket_well_defined(self) -> CheckOutcome:
        rng = np.random.default_rng(self.seed + 7)
        return self._coordinate_pairs(lambda f, g, q: bracket_well_definedness(self.D_red, f, g, q, rng))

    def step_method_b(self):
        self.check("method_b", lambda: verify_method_b(self.D, self.action, self.quotient, self.D_red,
                                                       self.reduced_points, self.tol))

    def step_omega_hbar(self):
        self.check("omega_hbar", lambda: check_omega_hbar(self.phase, self.action, self.quotient, self.D_red,
                                                          self.reduced_points, self.tol))

    def step_momentum(self):
        if not self.action.k:
            self.skip("momentum_identity", "trivial action")
            self.skip("hv_constant_rank", "trivial action")
            return
        self.check("momentum_identity", lambda: check_momentum_identity(self.phase, self.action, self.points))
        self.check("hv_constant_rank", lambda: check_hv_constant_rank(self.phase, self.action, self.points))

    def _noether_sections(self) -> List[List[ScalarField]]:
        chart, params = self.phase.m_chart, self.setup.params
        return [[scalar(c, chart, params) for c in entry["coefficients"]]
                for entry in self.entry.expected.get("noether_sections", [])]

    def step_noether(self):
        phase, action = self.phase, self.action
        rng = np.random.default_rng(self.seed + 6)
        self.check("completion_uniqueness",
                   lambda: check_completion_uniqueness(phase, action, self.points, rng, self.tol))
        sections = self._noether_sections()
        names = ["noether_sections_in_g_H", "noether_pair_in_D", "noether_residuals"]
        if not sections:
            for name in names:
                self.skip(name, "no sections of 𝔤^ℋ listed")
            return

        def in_g_h():
            tracker = ResidualTracker(self.tol)
            for s, coefficients in enumerate(sections):
                tracker.merge(check_section_in_g_H(phase, action, coefficients, self.points, self.tol),
                              detail=f"section {s}")
            return tracker.outcome()

        def pair_in_d():
            tracker = ResidualTracker(self.tol)
            for s, coefficients in enumerate(sections):
                tracker.merge(check_noether_pair_in_D(self.D, phase, action, coefficients, self.points, self.tol),
                              detail=f"section {s}")
            return tracker.outcome()

        self.check(names[0], in_g_h)
        self.check(names[1], pair_in_d)
        if self.h_invariant:
            self.check(names[2], lambda: check_noether_residuals(phase, self.D, action, self.H, sections, self.points))
        else:
            self.skip(names[2], "H is not invariant")

    def step_reaction(self):
        self.check("rplusv", lambda: check_rplusv(self.phase, self.action, self.points, self.tol))
        self.check("reaction_lemma", lambda: check_reaction_lemma(self.phase, self.action, self.points, self.tol))

    def step_optimal_distribution(self):
        phase, action = self.phase, self.action
        self.check("dg_characterization", lambda: check_dg_characterization(self.D, phase, action, self.points))
        self.check("dg_involutive",
                   lambda: is_involutive_DG(phase, action, self.closed_points, self.fd_step, self.fd_tol))
        functions = self.entry.expected.get("conserved_functions")
        if functions:
            fields = [scalar(f, phase.m_chart, self.setup.params) for f in functions]
            self.check("conserved_annihilate_dg",
                       lambda: check_conserved_annihilate_DG(phase, action, fields, self.points))
        else:
            self.skip("conserved_annihilate_dg", "no conserved functions listed")

    def step_leaf(self):
        leaf = self.entry.leaf
        if leaf is None:
            for name in LEAF_CHECKS:
                self.skip(name, "no leaf data")
            return
        leaf_points = draw_points(leaf.chart, self.samples, self.seed + 3)
        self.check("leaf_conserved_values", lambda: check_conserved_on_leaf(leaf, leaf_points, self.tol))
        self.check("leaf_restriction_rank", lambda: check_restriction_rank(self.D, leaf.embedding, leaf_points))
        restricted, D_rho = leaf_reduce(self.D, leaf, self.fd_step)
        self.check("leaf_lagrangian", lambda: check_lagrangian(restricted, leaf_points))
        images = [leaf.embedding(n) for n in leaf_points]
        self.check("leaf_conserved_annihilate_dg",
                   lambda: check_conserved_annihilate_DG(self.phase, self.action, leaf.conserved, images))
        expected = self.entry.leaf_expected
        if "d_leaf" in expected:
            bundle = self._expected_bundle(leaf.chart, expected["d_leaf"], self.entry.leaf_params)
            self.check("expected_d_leaf", lambda: compare_bundles(restricted, bundle, leaf_points, self.tol))
        if D_rho is None:
            for name in LEAF_CHECKS[4:]:
                self.skip(name, "leaf has no group data")
            return
        rho_points = draw_points(leaf.quotient.reduced_chart, self.samples, self.seed + 4)
        self.check("d_rho_lagrangian", lambda: check_lagrangian(D_rho, rho_points))
        self.check("d_rho_nondegenerate", lambda: check_graph_of_nondegenerate_form(D_rho, rho_points, self.tol))
        self.check("leaf_two_form",
                   lambda: check_leaf_two_form(self.phase, self.action, leaf, D_rho, rho_points, self.tol))
        h_leaf = leaf.embedding.pull_scalar(self.H)
        if self._hamiltonian_invariance(h_leaf, leaf.action, leaf_points).ok:
            self.check("leaf_reduced_bracket_identity",
                       lambda: check_reduced_bracket_identity(restricted, leaf.quotient, D_rho, h_leaf,
                                                              rho_points, self.tol))
        else:
            self.skip("leaf_reduced_bracket_identity", "H is not invariant on the leaf")
        if "d_rho" in expected:
            bundle = self._expected_bundle(leaf.quotient.reduced_chart, expected["d_rho"], self.entry.leaf_params)
            self.check("expected_d_rho", lambda: compare_bundles(D_rho, bundle, rho_points, self.tol))

    # ------------------------------------------------------------------
    # expected results
    # ------------------------------------------------------------------

    def step_expected(self):
        for key, value in self.setup.expected.items():
            getattr(self, f"_expect_{key}")(value)
        for key, value in self.entry.expected.items():
            if key == "d_red_closed":
                continue
            getattr(self, f"_expect_{key}")(value)

    def _expect_eliminated(self, value: Dict[str, str]):
        chart, params = self.phase.m_chart, self.setup.params
        computed = self.phase.eliminated_expressions()
        tracker = ResidualTracker(self.tol)
        for name, expr in value.items():
            if name not in computed:
                tracker.fail([], f"{name} is not eliminated (eliminated: {list(computed)})")
                continue
            tracker.merge(self._compare_scalars(self.points, computed[name], scalar(expr, chart, params),
                                                self.tol, True, name))
        self.record("expected_eliminated", tracker.outcome())

    def _expect_omega_M(self, value):
        chart = self.phase.m_chart
        expected = two_form_from_entries(chart, value, self.setup.params)
        omega = omega_M(self.phase)
        tracker = ResidualTracker(self.tol)
        for p in self.points:
            tracker.record(np.abs(omega.at(p) - expected.at(p)).max(), p, "ω_M")
        self.record("expected_omega_M", tracker.outcome())

    def _vector_rows(self, chart: Chart, docs, params) -> Callable[[np.ndarray], List[np.ndarray]]:
        fields = [vector_from_doc(chart, d, params) for d in docs]
        return lambda p: [f.at(p) for f in fields]

    def _form_rows(self, chart: Chart, docs, params) -> Callable[[np.ndarray], List[np.ndarray]]:
        forms = [form_from_doc(chart, d, params) for d in docs]
        return lambda p: [f.at(p) for f in forms]

    def _expect_horizontal(self, value):
        chart = self.phase.m_chart
        self.record("expected_horizontal", self._compare_spans(
            self.points, lambda p: horizontal_H(self.phase, p, self.tol),
            self._vector_rows(chart, value, self.setup.params), chart.dim))

    def _expect_dirac_sections(self, value):
        bundle = self._expected_bundle(self.phase.m_chart, value, self.setup.params)
        self.record("expected_dirac_sections", compare_bundles(self.D, bundle, self.points, self.tol))

    def _expect_hamiltonian(self, value):
        expected = scalar(value, self.phase.m_chart, self.setup.params)
        self.record("expected_hamiltonian",
                    self._compare_scalars(self.points, self.H, expected, self.tol, True, "H"))

    def _expect_d_red(self, value):
        bundle = self._expected_bundle(self.quotient.reduced_chart, value, self.setup.params)
        self.record("expected_d_red", compare_bundles(self.D_red, bundle, self.reduced_points, self.tol))

    def _expect_d_red_two_form(self, value):
        chart = self.quotient.reduced_chart
        omega = two_form_from_entries(chart, value, self.setup.params, "ω_red")
        bundle = graph_of_two_form(chart, [], omega, "expected", self.tol)
        self.record("expected_d_red_two_form", compare_bundles(self.D_red, bundle, self.reduced_points, self.tol))

    def _expect_d_red_bivector(self, value):
        chart = self.quotient.reduced_chart
        pi = bivector_from_entries(chart, value, self.setup.params, "π_red")
        bundle = graph_of_bivector(chart, [], pi, "expected", self.tol)
        self.record("expected_d_red_bivector", compare_bundles(self.D_red, bundle, self.reduced_points, self.tol))

    def _expect_poisson_brackets(self, value):
        chart, params = self.quotient.reduced_chart, self.setup.params

        def compare():
            tracker = ResidualTracker(self.tol)
            for entry in value:
                f, g = scalar(entry["f"], chart, params), scalar(entry["g"], chart, params)
                label = f"{{{entry['f']}, {entry['g']}}}"
                tracker.merge(self._compare_scalars(self.reduced_points,
                                                    lambda q, f=f, g=g: dirac_poisson_bracket(self.D_red, f, g, q),
                                                    scalar(entry["value"], chart, params), self.tol, False, label))
            outcome = tracker.outcome()
            outcome.notes["convention"] = BRACKET_CONVENTION
            return outcome

        self.check("expected_poisson_brackets", compare)

    def _expect_omega_hbar(self, value):
        chart, params = self.quotient.reduced_chart, self.setup.params
        tracker = ResidualTracker(self.tol)
        for entry in value:
            u = vector_from_doc(chart, entry["u"], params)
            v = vector_from_doc(chart, entry["v"], params)

            def computed(q, u=u, v=v):
                form = reduced_h_bar_omega(self.phase, self.action, self.quotient, q, self.tol)
                return form.value(u.at(q), v.at(q))

            tracker.merge(self._compare_scalars(self.reduced_points, computed,
                                                scalar(entry["value"], chart, params), self.tol, False, "ω_H̄"))
        self.record("expected_omega_hbar", tracker.outcome())

    def _expect_two_form_det(self, value):
        expected = scalar(value, self.quotient.reduced_chart, self.setup.params)
        self.record("expected_two_form_det", self._compare_scalars(
            self.reduced_points, lambda q: float(np.linalg.det(induced_two_form(self.D_red, q))),
            expected, 1e-8, True, "det ω_red"))

    def _reduced_form_field(self) -> TwoForm:
        """ω_red as a TwoForm whose first-order jets come from a stencil"""
        chart = self.quotient.reduced_chart
        steps = frame_steps(chart, self.fd_step)
        n = chart.dim

        def fn(q):
            jets = stencil_jets(lambda x: induced_two_form(self.D_red, x), q, steps)
            return [jets[i * n:(i + 1) * n] for i in range(n)]

        return TwoForm(chart, fn, "ω_red")

    def _expect_two_form_differential(self, value):
        chart, params = self.quotient.reduced_chart, self.setup.params
        omega = self._reduced_form_field()
        tracker = ResidualTracker(1e-8)
        for q in self.reduced_points:
            d_omega = d_two_form_components(omega, q)
            for entry in value:
                i, j, k = (chart.index(c) for c in entry["indices"])
                want = scalar(entry["value"], chart, params)(q)
                tracker.record(abs(d_omega[i, j, k] - want) / max(1.0, abs(want)), q,
                               "dω(" + ", ".join(entry["indices"]) + ")")
        self.record("expected_two_form_differential", tracker.outcome())

    def _expect_momentum_components(self, value):
        chart, params = self.phase.m_chart, self.setup.params

        def compare():
            tracker = ResidualTracker(self.tol)
            for entry in value:
                J = momentum_function(self.phase, self.action, entry["coefficients"])
                tracker.merge(self._compare_scalars(self.points, J, scalar(entry["value"], chart, params),
                                                    self.tol, True, str(entry["coefficients"])))
            return tracker.outcome()

        self.check("expected_momentum_components", compare)

    def _expect_noether_sections(self, value):
        chart, params = self.phase.m_chart, self.setup.params
        tracker = ResidualTracker(self.tol)
        for s, (entry, coefficients) in enumerate(zip(value, self._noether_sections())):
            computed = noether_one_form(self.phase, self.action, coefficients)
            expected = form_from_doc(chart, entry["form"], params)
            for p in self.points:
                tracker.record(np.abs(computed.at(p) - expected.at(p)).max(), p, f"section {s}")
        self.record("expected_noether_forms", tracker.outcome())

    def _expect_horizontal_annihilator(self, value):
        chart = self.phase.m_chart
        self.record("expected_horizontal_annihilator", self._compare_spans(
            self.points, lambda p: horizontal_annihilator_U(self.phase, self.action, p, self.tol),
            self._vector_rows(chart, value, self.setup.params), chart.dim))

    def _expect_reaction(self, value):
        chart = self.phase.m_chart
        self.record("expected_reaction", self._compare_spans(
            self.points, lambda p: reaction_codistribution_R(self.phase, self.action, p, self.tol),
            self._form_rows(chart, value, self.setup.params), chart.dim))

    def _expect_optimal_distribution(self, value):
        chart = self.phase.m_chart
        self.record("expected_optimal_distribution", self._compare_spans(
            self.points, lambda p: optimal_distribution_DG(self.phase, self.action, p, self.tol),
            self._vector_rows(chart, value, self.setup.params), chart.dim))

    def _expect_dg_involutive(self, value):
        verdict = next(r for r in self.records if r.name == "dg_involutive")
        involutive = verdict.status == "pass"
        outcome = CheckOutcome(involutive == bool(value), notes={"involutive": involutive})
        self.record("expected_dg_involutive", outcome)

    def _expect_conserved_functions(self, value):
        # checked in step_optimal_distribution
        return None

    def _expect_conserved_criteria(self, value):
        tracker = ResidualTracker(0.0)
        verdicts = []
        for entry in value:
            outcome = conserved_criterion(self.phase, self.action, entry["coefficients"], self.points, self.tol)
            verdicts.append(outcome.ok)
            if outcome.ok != bool(entry["expected"]):
                point = outcome.witness.point if outcome.witness else self.points[0]
                tracker.fail(point, f"criterion for {entry['coefficients']} is {outcome.ok}")
            else:
                tracker.record(0.0, self.points[0])
        result = tracker.outcome()
        result.notes["verdicts"] = verdicts
        self.record("expected_conserved_criteria", result)

    # ------------------------------------------------------------------
    # report
    # ------------------------------------------------------------------

    def summary(self) -> Dict[str, int]:
        counts = {status: sum(1 for r in self.records if r.status == status) for status in STATUSES}
        counts["total"] = len(self.records)
        return counts

    def report(self) -> Dict[str, Any]:
        objects = dict(self.objects)
        objects.update({
            "m_chart": list(self.phase.m_chart.coords),
            "eliminated": list(self.phase.eliminated),
            "reduced_chart": list(self.quotient.reduced_chart.coords),
            "generators": self.action.k,
            "lifted": bool(self.action.lifted),
        })
        return _clean({
            "schema": SCHEMA,
            "system": self.setup.name,
            "action": self.entry.name,
            "params": self.setup.params,
            "seed": self.seed,
            "samples": self.samples,
            "tol": self.tol,
            "fd_tol": self.fd_tol,
            "expected_failures": list(self.entry.expected_failures),
            "checks": [r.to_dict() for r in self.records],
            "summary": self.summary(),
            "objects": objects,
        })


def run_analysis(setup: SystemSetup, action_name: Optional[str] = None,
                 settings: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return AnalysisRunner(setup, action_name, settings).run()


def report_failed(report: Dict[str, Any]) -> bool:
    return report["summary"]["fail"] > 0


def dump_report(report: Dict[str, Any]) -> str:
    """Canonical text of a report; equal reports give equal bytes"""
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


__all__ = ["SCHEMA", "CheckRecord", "AnalysisRunner", "run_analysis", "report_failed", "dump_report"]
