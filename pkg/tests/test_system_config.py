import json

import numpy as np
import pytest

from dirac_kit import systems_catalog
from dirac_kit.dirac_core import check_lagrangian, dirac_poisson_bracket
from dirac_kit.errors import ExpressionError, InputError
from dirac_kit.jet_calculus import ScalarField
from dirac_kit.system_config import (TRIVIAL_ACTION, build_from_file, build_system, dump_document, load_document,
                                     resolve_params, structure_constants_from_doc)

FREE_PARTICLE = {
    "name": "free_line",
    "chart": ["x"],
    "metric": [["m"]],
    "params": {"m": 2.0},
}


def test_resolve_params():
    doc = {"name": "s", "params": {"mu": 1.0, "R": 2.0}}
    assert resolve_params(doc, {"mu": 3.0}) == {"mu": 3.0, "R": 2.0}
    with pytest.raises(InputError):
        resolve_params(doc, {"nu": 1.0})
    with pytest.raises(InputError):
        resolve_params(doc, {"R": 0.0})
    with pytest.raises(InputError):
        resolve_params(doc, {"R": float("nan")})


def test_structure_constants_are_one_based_and_skew():
    c = structure_constants_from_doc([[1, 2, 3, 1.0]], 3)
    assert c[0, 1, 2] == 1.0
    assert c[1, 0, 2] == -1.0
    assert np.count_nonzero(c) == 2
    with pytest.raises(InputError):
        structure_constants_from_doc([[0, 1, 1, 1.0]], 2)
    with pytest.raises(InputError):
        structure_constants_from_doc([[1, 1, 2, 1.0]], 2)


def test_unconstrained_document_gives_canonical_brackets():
    setup = build_system(FREE_PARTICLE)
    assert list(setup.actions) == [TRIVIAL_ACTION]
    chart = setup.phase.m_chart
    assert chart.coords == ("x", "p_x")
    point = np.array([0.3, 0.7])
    x, p = ScalarField.coordinate(chart, "x"), ScalarField.coordinate(chart, "p_x")
    assert dirac_poisson_bracket(setup.D, x, p, point) == pytest.approx(1.0)
    assert setup.hamiltonian(point) == pytest.approx(0.7 ** 2 / 4.0)
    assert check_lagrangian(setup.D, [point])


@pytest.mark.parametrize("change, message", [
    ({"chart": None}, "chart"),
    ({"colour": "red"}, "unknown keys"),
    ({"constraints": [["1", "0"]]}, "constraint 0"),
    ({"box": {"w": [0, 1]}}, "unknown coordinates"),
    ({"expected": {"colour": "1"}}, "unknown keys"),
])
def test_malformed_documents(change, message):
    doc = dict(FREE_PARTICLE)
    for key, value in change.items():
        if value is None:
            doc.pop(key)
        else:
            doc[key] = value
    with pytest.raises(InputError, match=message):
        build_system(doc)


def test_bad_expression_in_document():
    doc = dict(FREE_PARTICLE, metric=[["m*"]])
    with pytest.raises(ExpressionError):
        build_system(doc)


def test_action_needs_a_quotient():
    doc = dict(FREE_PARTICLE, actions=[{"name": "T", "generators": [["1"]]}])
    with pytest.raises(InputError, match="quotient"):
        build_system(doc)


def test_dump_and_reload(tmp_path):
    path = dump_document(systems_catalog.document("constrained_particle"), tmp_path / "particle.json")
    setup = build_from_file(path)
    assert setup.name == "constrained_particle"
    assert list(setup.actions) == ["R2"]
    assert setup.action().name == "R2"


def test_load_document_errors(tmp_path):
    with pytest.raises(InputError):
        load_document(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(InputError):
        load_document(broken)
    listing = tmp_path / "list.json"
    listing.write_text(json.dumps([1, 2]))
    with pytest.raises(InputError):
        load_document(listing)


def test_unknown_action_name(particle):
    with pytest.raises(InputError):
        particle.action("SE2")
