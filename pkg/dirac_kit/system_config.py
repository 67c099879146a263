"""
System documents.

A system is one JSON document; every function in it is an expression string
(see expressions.py). Layout:

    {
      "name": "...", "description": "...",
      "chart": ["x", "y", ...],                    configuration coordinates
      "box": {"x": [-2, 2]},                       optional sampling intervals
      "params": {"m": 1.0},                        physical parameters, all > 0
      "metric": [["1", "0"], ["0", "1"]],
      "potential": "0",
      "constraints": [["-y", "0", "1"]],           components of each constraint 1-form
      "eliminate": ["p_z"],                        optional dependent momenta
      "momentum_box": [-2, 2],
      "hamiltonian": "...",                        optional, on the M chart
      "expected": {...},
      "actions": [{
          "name": "R2",
          "generators": [["1", "0", "0"]],         vector fields on Q
          "structure_constants": [[1, 2, 3, 1.0]], c^l_ij, 1-based (i, j, l, value)
          "lift": true,                            cotangent lift, or positional
          "quotient": {"coords": [...], "projection": [...], "slice": [...]},
          "leaf": {...}, "expected": {...}, "expected_failures": [...]
      }],
      "leaf": {...}                                for a single-action document
    }

An empty action list means the trivial action with the identity quotient.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
from loguru import logger

from .dirac_core import PontryaginSection, SectionPairs
from .errors import InputError
from .expressions import compile_expression, evaluate_constant
from .jet_calculus import Bivector, Chart, ChartMap, OneForm, ScalarField, TwoForm, VectorField
from .nonholonomic import (ConstraintPhase, LeafData, MechanicalSystem, build_constraint_phase,
                           hamiltonian_on_M, lift_action, nonholonomic_dirac)
from .settings import DEFAULT_SETTINGS
from .symmetry_reduction import QuotientChart, SymmetryAction

SYSTEM_KEYS = {"name", "description", "chart", "box", "params", "metric", "potential", "constraints",
               "eliminate", "momentum_box", "hamiltonian", "expected", "actions", "leaf"}
ACTION_KEYS = {"name", "description", "generators", "structure_constants", "lift", "quotient", "leaf",
               "expected", "expected_failures"}
QUOTIENT_KEYS = {"coords", "box", "projection", "slice"}
LEAF_KEYS = {"chart", "box", "params", "embedding", "conserved", "values", "generators",
             "structure_constants", "quotient", "expected"}

SYSTEM_EXPECTED_KEYS = {"eliminated", "omega_M", "horizontal", "dirac_sections", "hamiltonian"}
ACTION_EXPECTED_KEYS = {"d_red", "d_red_two_form", "d_red_bivector", "d_red_closed", "poisson_brackets",
                        "omega_hbar", "two_form_det", "two_form_differential", "momentum_components",
                        "noether_sections", "horizontal_annihilator", "reaction", "optimal_distribution",
                        "dg_involutive", "conserved_functions", "conserved_criteria"}
LEAF_EXPECTED_KEYS = {"d_leaf", "d_rho"}

TRIVIAL_ACTION = "trivial"


@dataclass
class ActionSetup:
    """One action of a system with its quotient, leaf and expectations"""

    name: str
    action: SymmetryAction
    quotient: QuotientChart
    leaf: Optional[LeafData] = None
    leaf_params: Dict[str, float] = field(default_factory=dict)
    leaf_expected: Dict[str, Any] = field(default_factory=dict)
    expected: Dict[str, Any] = field(default_factory=dict)
    expected_failures: List[str] = field(default_factory=list)
    description: str = ""


@dataclass
class SystemSetup:
    name: str
    description: str
    document: Dict[str, Any]
    params: Dict[str, float]
    system: MechanicalSystem
    phase: ConstraintPhase
    hamiltonian: ScalarField
    D: SectionPairs
    actions: Dict[str, ActionSetup]
    expected: Dict[str, Any] = field(default_factory=dict)

    def action(self, name: Optional[str] = None) -> ActionSetup:
        if name is None:
            if len(self.actions) != 1:
                raise InputError(f"{self.name}: choose an action from {list(self.actions)}")
            return next(iter(self.actions.values()))
        if name not in self.actions:
            raise InputError(f"{self.name}: unknown action {name!r} (available: {list(self.actions)})")
        return self.actions[name]


def load_document(path: Union[str, Path]) -> Dict[str, Any]:
    """读取系统描述文件"""
    path = Path(path)
    if not path.exists():
        raise InputError(f"System file not found: {path}")
    try:
        with open(path, "r") as f:
            document = json.load(f)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(document, dict):
        raise InputError(f"{path}: the document must be a JSON object")
    return document


# ---------------------------------------------------------------------------
# expression helpers
# ---------------------------------------------------------------------------

def scalar(src: Any, chart: Chart, params: Mapping[str, float]) -> ScalarField:
    if isinstance(src, (int, float)) and not isinstance(src, bool):
        src = repr(float(src))
    return compile_expression(src, chart, params)


def vector_from_doc(chart: Chart, components: Mapping[str, Any], params: Mapping[str, float],
                    label: Optional[str] = None) -> VectorField:
    """{coord: expr} on the coordinate frame; missing coordinates are zero"""
    return VectorField.from_components(chart, _frame_components(chart, components, params), label)


def form_from_doc(chart: Chart, components: Mapping[str, Any], params: Mapping[str, float],
                  label: Optional[str] = None) -> OneForm:
    return OneForm.from_components(chart, _frame_components(chart, components, params), label)


def _frame_components(chart: Chart, components: Mapping[str, Any], params) -> List[ScalarField]:
    if not isinstance(components, Mapping):
        raise InputError(f"expected a {{coordinate: expression}} mapping, got {components!r}")
    for coord in components:
        chart.index(coord)
    return [scalar(components[c], chart, params) if c in components else ScalarField.constant(chart, 0.0)
            for c in chart.coords]


def sections_from_doc(chart: Chart, sections: Sequence[Mapping[str, Any]],
                      params: Mapping[str, float]) -> List[PontryaginSection]:
    """[{"vector": {...}, "form": {...}}, ...]"""
    out = []
    for i, entry in enumerate(sections):
        unknown = set(entry) - {"vector", "form"}
        if unknown:
            raise InputError(f"section {i}: unknown keys {sorted(unknown)}")
        out.append(PontryaginSection(vector_from_doc(chart, entry.get("vector", {}), params),
                                     form_from_doc(chart, entry.get("form", {}), params), f"s{i}"))
    return out


def _upper_entries(chart: Chart, entries: Sequence[Sequence[Any]], params) -> Dict:
    upper = {}
    for entry in entries:
        if len(entry) != 3:
            raise InputError(f"tensor entry {entry!r} must be [coord, coord, expression]")
        a, b, value = entry
        if a == b:
            raise InputError(f"tensor entry on the diagonal: {entry!r}")
        upper[(a, b)] = scalar(value, chart, params)
    return upper


def two_form_from_entries(chart: Chart, entries: Sequence[Sequence[Any]], params: Mapping[str, float],
                          label: Optional[str] = None) -> TwoForm:
    """[[a, b, f], ...] means f da∧db"""
    return TwoForm.from_upper(chart, _upper_entries(chart, entries, params), label)


def bivector_from_entries(chart: Chart, entries: Sequence[Sequence[Any]], params: Mapping[str, float],
                          label: Optional[str] = None) -> Bivector:
    return Bivector.from_upper(chart, _upper_entries(chart, entries, params), label)


def structure_constants_from_doc(entries: Sequence[Sequence[Any]], k: int) -> np.ndarray:
    """c[i, j, l] = c^l_ij from 1-based [i, j, l, value] rows, skew in i, j"""
    c = np.zeros((k, k, k))
    for entry in entries or []:
        if len(entry) != 4:
            raise InputError(f"structure constant {entry!r} must be [i, j, l, value]")
        i, j, l = (int(x) - 1 for x in entry[:3])
        if not all(0 <= x < k for x in (i, j, l)) or i == j:
            raise InputError(f"structure constant {entry!r} out of range for {k} generators")
        c[i, j, l] = float(entry[3])
        c[j, i, l] = -float(entry[3])
    return c


def _check_keys(where: str, mapping: Mapping[str, Any], allowed: set):
    if not isinstance(mapping, Mapping):
        raise InputError(f"{where}: expected an object")
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise InputError(f"{where}: unknown keys {unknown}")


def _box(box: Optional[Mapping[str, Sequence[float]]], where: str) -> Dict[str, List[float]]:
    out = {}
    for coord, interval in (box or {}).items():
        if len(interval) != 2:
            raise InputError(f"{where}: box for {coord!r} must be [lo, hi]")
        out[coord] = [float(interval[0]), float(interval[1])]
    return out


def resolve_params(document: Mapping[str, Any], overrides: Optional[Mapping[str, float]] = None) -> Dict[str, float]:
    """Document defaults with overrides applied; every value must be positive"""
    params = {k: float(v) for k, v in (document.get("params") or {}).items()}
    for key, value in (overrides or {}).items():
        if key not in params:
            raise InputError(f"{document.get('name', 'system')}: unknown parameter {key!r} "
                             f"(known: {sorted(params)})")
        params[key] = float(value)
    for key, value in params.items():
        if not math.isfinite(value) or value <= 0:
            raise InputError(f"parameter {key} must be positive, got {value}")
    return params


# ---------------------------------------------------------------------------
# building
# ---------------------------------------------------------------------------

def build_system(document: Mapping[str, Any], params: Optional[Mapping[str, float]] = None,
                 momentum_box: Optional[Sequence[float]] = None, tol: float = 1e-9) -> SystemSetup:
    """Everything an analysis needs from one document"""
    _check_keys("system", document, SYSTEM_KEYS)
    for key in ("chart", "metric"):
        if key not in document:
            raise InputError(f"system document lacks {key!r}")
    name = str(document.get("name", "custom"))
    values = resolve_params(document, params)
    box = _box(document.get("box"), name)

    coords = list(document["chart"])
    q_box = {c: box[c] for c in coords if c in box}
    q_chart = Chart.build(name, coords, q_box)
    metric = [[scalar(e, q_chart, values) for e in row] for row in document["metric"]]
    for j, row in enumerate(document.get("constraints") or []):
        if len(row) != len(coords):
            raise InputError(f"{name}: constraint {j} has {len(row)} components for {len(coords)} coordinates")
    constraints = [OneForm.from_components(q_chart, [scalar(e, q_chart, values) for e in row], f"φ{j}")
                   for j, row in enumerate(document.get("constraints") or [])]
    potential = document.get("potential")
    system = MechanicalSystem(name, q_chart, metric, constraints,
                              None if potential is None else scalar(potential, q_chart, values))

    momentum_box = document.get("momentum_box") or momentum_box or DEFAULT_SETTINGS["momentum_box"]
    momentum_names = set(system.momenta)
    extra_box = {c: v for c, v in box.items() if c in momentum_names}
    stray = sorted(set(box) - set(coords) - momentum_names)
    if stray:
        raise InputError(f"{name}: box names unknown coordinates {stray}")
    phase = build_constraint_phase(system, document.get("eliminate"), momentum_box, box=extra_box)

    hamiltonian = hamiltonian_on_M(phase)
    if document.get("hamiltonian") is not None:
        hamiltonian = scalar(document["hamiltonian"], phase.m_chart, values)
    D = nonholonomic_dirac(phase, "D", tol)

    expected = dict(document.get("expected") or {})
    action_docs = list(document.get("actions") or [])
    top_leaf = document.get("leaf")
    if top_leaf is not None and len(action_docs) > 1:
        raise InputError(f"{name}: a top-level leaf needs a single-action document; "
                         f"put it under actions[i].leaf")

    actions: Dict[str, ActionSetup] = {}
    if not action_docs:
        trivial_expected = {k: v for k, v in expected.items() if k in ACTION_EXPECTED_KEYS}
        expected = {k: v for k, v in expected.items() if k not in ACTION_EXPECTED_KEYS}
        setup = ActionSetup(TRIVIAL_ACTION, SymmetryAction.trivial(phase.m_chart),
                            QuotientChart.identity(phase.m_chart), expected=trivial_expected)
        if top_leaf is not None:
            _attach_leaf(setup, top_leaf, phase, values, name)
        actions[TRIVIAL_ACTION] = setup
    for index, action_doc in enumerate(action_docs):
        setup = _build_action(action_doc, index, phase, values, name)
        leaf_doc = action_doc.get("leaf", top_leaf)
        if leaf_doc is not None:
            _attach_leaf(setup, leaf_doc, phase, values, name)
        if setup.name in actions:
            raise InputError(f"{name}: duplicate action name {setup.name!r}")
        actions[setup.name] = setup

    _check_keys(f"{name}.expected", expected, SYSTEM_EXPECTED_KEYS)
    logger.debug(f"built {name}: M chart {phase.m_chart.coords}, actions {list(actions)}")
    return SystemSetup(name, str(document.get("description", "")), dict(document), values, system,
                       phase, hamiltonian, D, actions, expected)


def _build_action(doc: Mapping[str, Any], index: int, phase: ConstraintPhase,
                  params: Mapping[str, float], system_name: str) -> ActionSetup:
    _check_keys(f"{system_name}.actions[{index}]", doc, ACTION_KEYS)
    name = str(doc.get("name", f"action{index}"))
    where = f"{system_name}.{name}"
    if "generators" not in doc or "quotient" not in doc:
        raise InputError(f"{where}: an action needs generators and a quotient")
    q_chart = phase.system.q_chart
    q_generators = []
    for row in doc["generators"]:
        if len(row) != q_chart.dim:
            raise InputError(f"{where}: generator with {len(row)} components on a {q_chart.dim}-dim Q")
        q_generators.append([scalar(e, q_chart, params) for e in row])
    constants = structure_constants_from_doc(doc.get("structure_constants"), len(q_generators))
    action = lift_action(phase, name, q_generators, constants, bool(doc.get("lift", True)))
    quotient = quotient_from_doc(phase.m_chart, doc["quotient"], params, f"{phase.m_chart.name}/{name}", where)

    expected = dict(doc.get("expected") or {})
    _check_keys(f"{where}.expected", expected, ACTION_EXPECTED_KEYS)
    failures = [str(f) for f in doc.get("expected_failures") or []]
    return ActionSetup(name, action, quotient, expected=expected, expected_failures=failures,
                       description=str(doc.get("description", "")))


def quotient_from_doc(chart: Chart, doc: Mapping[str, Any], params: Mapping[str, float],
                      reduced_name: str, where: str = "quotient") -> QuotientChart:
    """Invariant coordinates (expressions on chart) and a slice (expressions on the reduced chart)"""
    _check_keys(f"{where}.quotient", doc, QUOTIENT_KEYS)
    if "coords" not in doc or "slice" not in doc:
        raise InputError(f"{where}: a quotient needs coords and a slice")
    coords = list(doc["coords"])
    box = chart.box_dict()
    box.update(_box(doc.get("box"), where))
    reduced = Chart.build(reduced_name, coords, {c: box[c] for c in coords if c in box})
    projection_src = doc.get("projection") or coords
    if len(projection_src) != len(coords):
        raise InputError(f"{where}: projection has {len(projection_src)} components for {len(coords)} coordinates")
    if len(doc["slice"]) != chart.dim:
        raise InputError(f"{where}: slice has {len(doc['slice'])} components, {chart.name!r} needs {chart.dim}")
    projection = ChartMap.from_components(chart, reduced, [scalar(e, chart, params) for e in projection_src], "π")
    slice_map = ChartMap.from_components(reduced, chart, [scalar(e, reduced, params) for e in doc["slice"]], "σ")
    return QuotientChart(reduced, projection, slice_map, coords)


def _attach_leaf(setup: ActionSetup, doc: Mapping[str, Any], phase: ConstraintPhase,
                 params: Mapping[str, float], system_name: str):
    where = f"{system_name}.{setup.name}.leaf"
    _check_keys(where, doc, LEAF_KEYS)
    for key in ("chart", "embedding", "conserved", "values"):
        if key not in doc:
            raise InputError(f"{where}: missing {key!r}")
    leaf_params = {k: float(v) for k, v in (doc.get("params") or {}).items()}
    clash = sorted(set(leaf_params) & set(params))
    if clash:
        raise InputError(f"{where}: leaf parameters {clash} shadow system parameters")
    merged = dict(params)
    merged.update(leaf_params)

    m_chart = phase.m_chart
    coords = list(doc["chart"])
    box = m_chart.box_dict()
    box.update(_box(doc.get("box"), where))
    chart = Chart.build(f"leaf({system_name}/{setup.name})", coords, {c: box[c] for c in coords if c in box})
    if len(doc["embedding"]) != m_chart.dim:
        raise InputError(f"{where}: embedding has {len(doc['embedding'])} components, M needs {m_chart.dim}")
    embedding = ChartMap.from_components(chart, m_chart, [scalar(e, chart, merged) for e in doc["embedding"]], "ι_N")
    conserved = [scalar(e, m_chart, merged) for e in doc["conserved"]]
    if len(doc["values"]) != len(conserved):
        raise InputError(f"{where}: {len(conserved)} conserved functions but {len(doc['values'])} values")
    values = [evaluate_constant(str(v), merged) if isinstance(v, str) else float(v) for v in doc["values"]]

    action = quotient = None
    if doc.get("generators"):
        generators = []
        for row in doc["generators"]:
            if len(row) != chart.dim:
                raise InputError(f"{where}: generator with {len(row)} components on a {chart.dim}-dim leaf")
            generators.append(VectorField.from_components(chart, [scalar(e, chart, merged) for e in row]))
        constants = structure_constants_from_doc(doc.get("structure_constants"), len(generators))
        action = SymmetryAction(f"{setup.name}|leaf", chart, generators, constants, None, False)
        if "quotient" not in doc:
            raise InputError(f"{where}: leaf generators need a quotient")
        quotient = quotient_from_doc(chart, doc["quotient"], merged, f"{chart.name}/ρ", where)

    expected = dict(doc.get("expected") or {})
    _check_keys(f"{where}.expected", expected, LEAF_EXPECTED_KEYS)
    setup.leaf = LeafData(chart, embedding, conserved, values, action, quotient, coords)
    setup.leaf_params = merged
    setup.leaf_expected = expected


def build_from_file(path: Union[str, Path], params: Optional[Mapping[str, float]] = None,
                    momentum_box: Optional[Sequence[float]] = None, tol: float = 1e-9) -> SystemSetup:
    return build_system(load_document(path), params, momentum_box, tol)


def dump_document(document: Mapping[str, Any], path: Union[str, Path]) -> Path:
    """Write a document in the format build_from_file reads"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(document, f, indent=2)
    return path


__all__ = [
    "ActionSetup", "SystemSetup", "TRIVIAL_ACTION", "load_document", "build_system", "build_from_file",
    "dump_document", "resolve_params", "quotient_from_doc", "scalar", "vector_from_doc", "form_from_doc",
    "sections_from_doc", "two_form_from_entries", "bivector_from_entries", "structure_constants_from_doc",
]
