import pytest

from dirac_kit import systems_catalog
from dirac_kit.errors import InputError
from dirac_kit.verification import catalog_runs


def test_catalog_contents():
    assert systems_catalog.names() == ["constrained_particle", "vertical_disk", "chaplygin_skate",
                                       "skate_with_rotor", "heisenberg_particle"]
    actions = {e["name"]: e["actions"] for e in systems_catalog.entries()}
    assert actions["vertical_disk"] == ["R2", "SE2", "S1xR2", "SE2xS1"]
    assert actions["chaplygin_skate"] == ["SE2", "R2"]
    assert sum(len(a) for a in actions.values()) == 9
    assert len(catalog_runs()) == 9


def test_document_is_a_copy():
    doc = systems_catalog.document("constrained_particle")
    doc["actions"][0]["name"] = "changed"
    assert systems_catalog.document("constrained_particle")["actions"][0]["name"] == "R2"


def test_unknown_system():
    with pytest.raises(InputError, match="unknown system"):
        systems_catalog.document("double_pendulum")


def test_parameters_must_be_positive():
    with pytest.raises(InputError):
        systems_catalog.load("vertical_disk", {"mu": -1.0})
    with pytest.raises(InputError):
        systems_catalog.load("vertical_disk", {"radius": 1.0})


@pytest.mark.parametrize("name", systems_catalog.names())
def test_every_system_builds(name):
    setup = systems_catalog.load(name)
    doc = systems_catalog.document(name)
    assert list(setup.actions) == [a["name"] for a in doc["actions"]]
    for entry in setup.actions.values():
        assert entry.quotient.projection.source.same_as(setup.phase.m_chart)
