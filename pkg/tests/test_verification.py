import pytest

from dirac_kit.errors import InputError
from dirac_kit.verification import INVARIANT_CHECKS, AcceptanceVerifier, catalog_runs


@pytest.fixture
def verifier(fast_settings):
    return AcceptanceVerifier(fast_settings, subspace_trials=20)


def criterion(acceptance, name):
    summary = acceptance.run_all(name)
    assert summary["summary"]["total"] == 1
    return summary["criteria"][0]


def failing(result):
    return [(d["run"], d["check"], d["status"]) for d in result["details"] if not d["ok"]]


def test_particle_reduction(verifier):
    summary = verifier.run_all("particle_reduction")
    assert summary["suite"] == "acceptance"
    assert summary["summary"] == {"total": 1, "passed": 1, "failed": 0, "pass_rate": 100.0}
    result = summary["criteria"][0]
    assert result["name"] == "particle_reduction"
    assert "expected_d_red_bivector" in [d["check"] for d in result["details"]]
    assert all(d["ok"] for d in result["details"])


def test_particle_battery(acceptance):
    result = criterion(acceptance, "particle_battery")
    assert failing(result) == []
    assert result["status"] == "pass"


def test_disk_reductions(acceptance):
    result = criterion(acceptance, "disk_reductions")
    assert failing(result) == []
    assert {d["run"] for d in result["details"]} == {"vertical_disk/R2", "vertical_disk/SE2",
                                                     "vertical_disk/S1xR2"}


def test_disk_battery(acceptance):
    assert failing(criterion(acceptance, "disk_battery")) == []


def test_skate(acceptance):
    result = criterion(acceptance, "skate")
    assert failing(result) == []
    lifted = next(d for d in result["details"] if d["check"] == "lifted_rotation_momentum_identity")
    assert lifted["run"] == "chaplygin_skate/SO2"
    assert lifted["max_residual"] < 1e-9


def test_heisenberg(acceptance):
    result = criterion(acceptance, "heisenberg")
    assert failing(result) == []
    assert result["details"][-1]["check"] == "d_red_closed_witness"


def test_properties(acceptance):
    result = criterion(acceptance, "properties")
    details = result["details"]
    assert len(details) == 3 + len(catalog_runs()) * len(INVARIANT_CHECKS)
    assert failing(result) == []
    assert details[0]["trials"] == 20


def test_determinism(acceptance):
    assert criterion(acceptance, "determinism")["status"] == "pass"


def test_courant_axioms_on_compiled_sections(verifier):
    detail = verifier._courant_properties()
    assert detail["check"] == "courant_axioms"
    assert detail["ok"]
    assert detail["max_residual"] <= 1e-8


def test_catalog_has_nine_runs():
    runs = catalog_runs()
    assert len(runs) == 9
    assert ("chaplygin_skate", "SE2") in runs
    assert ("skate_with_rotor", "S1xSE2") in runs


def test_analyses_are_cached(verifier):
    verifier.run_all("particle_reduction")
    verifier.run_all("particle_battery")
    assert list(verifier.reports) == [("constrained_particle", "R2")]


def test_unknown_criterion(verifier):
    with pytest.raises(InputError):
        verifier.run_all("pendulum")


def test_missing_check_is_reported(verifier):
    details = verifier._require("constrained_particle", "R2", ["no_such_check"])
    assert details[0]["status"] == "missing"
    assert not details[0]["ok"]
