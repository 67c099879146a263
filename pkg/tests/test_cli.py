import json

import pytest

from dirac_kit.cli import main, parse_params
from dirac_kit.errors import InputError

FAST = ["--samples", "4", "--seed", "3"]


def test_parse_params():
    assert parse_params(["mu=2", "R = 0.5"]) == {"mu": 2.0, "R": 0.5}
    assert parse_params(None) == {}
    for bad in (["mu"], ["=1"], ["mu=fast"]):
        with pytest.raises(InputError):
            parse_params(bad)


def test_list_systems(capsys):
    assert main(["list-systems"]) == 0
    out = capsys.readouterr().out
    assert "constrained_particle" in out
    assert "SE2xS1" in out


def test_analyze_writes_a_report(tmp_path):
    out = tmp_path / "reports" / "particle.json"
    code = main(["analyze", "--system", "constrained_particle", "--action", "R2", *FAST, "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["schema"] == "dirac-kit/1"
    assert report["seed"] == 3
    assert report["summary"]["fail"] == 0


@pytest.mark.parametrize("argv", [
    ["analyze", "--system", "pendulum"],
    ["analyze", "--system", "vertical_disk", "--params", "mu"],
    ["analyze", "--system", "vertical_disk", "--params", "mu=-1"],
    ["analyze", "--system", "constrained_particle", "--action", "SE2", *FAST],
    ["verify"],
    ["custom", "--file", "/nonexistent/system.json"],
    [],
])
def test_input_errors_exit_with_2(argv):
    assert main(argv) == 2


def test_dump_then_custom(tmp_path, capsys):
    path = tmp_path / "particle.json"
    assert main(["dump", "--system", "constrained_particle", "--out", str(path)]) == 0
    assert main(["dump", "--system", "constrained_particle"]) == 0
    assert json.loads(capsys.readouterr().out)["name"] == "constrained_particle"
    report = tmp_path / "custom.json"
    assert main(["custom", "--file", str(path), *FAST, "--out", str(report)]) == 0
    assert json.loads(report.read_text())["action"] == "R2"
