"""Settings, logging, check outcomes and sampling"""

import numpy as np
import pytest
import yaml
from loguru import logger

from dirac_kit.errors import InputError, RankError
from dirac_kit.jet_calculus import Chart
from dirac_kit.log_setup import setup_logging
from dirac_kit.outcomes import CheckOutcome, ResidualTracker
from dirac_kit.sampling import draw_points, map_points
from dirac_kit.settings import DEFAULT_SETTINGS, load_settings


class TestSettings:
    def test_shipped_config_matches_defaults(self):
        assert load_settings() == DEFAULT_SETTINGS

    def test_overrides_skip_none(self):
        settings = load_settings(overrides={"samples": 16, "seed": None})
        assert settings["samples"] == 16
        assert settings["seed"] == DEFAULT_SETTINGS["seed"]

    def test_file_values_and_unknown_keys(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump({"tol": 1e-8, "colour": "blue"}))
        settings = load_settings(path)
        assert settings["tol"] == 1e-8
        assert "colour" not in settings

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            load_settings(tmp_path / "absent.yaml")

    @pytest.mark.parametrize("overrides", [{"tol": 0.0}, {"fd_tol": -1.0}, {"samples": 0}])
    def test_invalid_values(self, overrides):
        with pytest.raises(InputError):
            load_settings(overrides=overrides)

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(InputError):
            load_settings(path)


def test_log_file_is_created(tmp_path):
    log_file = setup_logging(tmp_path / "logs", verbose=True)
    logger.debug("written to the run log")
    assert log_file is not None and log_file.exists()
    assert "written to the run log" in log_file.read_text()
    assert setup_logging() is None


def test_exit_codes():
    assert InputError.exit_code == 2
    assert RankError.exit_code == 3
    err = RankError("rank dropped", "reduce_dirac", [np.array([1.0, 2.0])])
    assert err.stage == "reduce_dirac"
    assert err.points == [[1.0, 2.0]]
    assert "[reduce_dirac]" in str(err)


class TestResidualTracker:
    def test_first_failure_is_the_witness(self):
        tracker = ResidualTracker(1e-6)
        assert tracker.record(1e-8, [0.0])
        assert not tracker.record(1e-3, [1.0], "first")
        tracker.record(1e-1, [2.0], "second")
        outcome = tracker.outcome()
        assert not outcome
        assert outcome.max_residual == pytest.approx(1e-1)
        assert outcome.witness.detail == "first"

    def test_fail_without_residual(self):
        tracker = ResidualTracker(1.0)
        tracker.fail([0.5], "dims 2 vs 3")
        outcome = tracker.outcome()
        assert not outcome.ok
        assert outcome.max_residual == np.inf

    def test_merge(self):
        tracker = ResidualTracker(1e-6)
        tracker.merge(CheckOutcome.passed())
        assert tracker.outcome().ok
        inner = ResidualTracker(1e-9)
        inner.record(1e-3, [3.0], "inner")
        tracker.merge(inner.outcome())
        assert tracker.outcome().witness.point == [3.0]

    def test_empty_tracker_passes(self):
        assert ResidualTracker(0.0).outcome().ok


class TestSampling:
    def test_seeded(self):
        chart = Chart.build("xy", ["x", "theta"])
        first, second = draw_points(chart, 5, 7), draw_points(chart, 5, 7)
        np.testing.assert_array_equal(np.array(first), np.array(second))
        assert all(-2.0 <= p[0] <= 2.0 and 0.0 <= p[1] < 2 * np.pi for p in first)

    def test_excluded_sets_are_avoided(self):
        chart = Chart.build("x", ["x"], excluded=[lambda p: p[0]])
        assert all(abs(p[0]) >= 1e-3 for p in draw_points(chart, 50, 0))

    def test_map_points_keeps_order(self):
        points = [np.array([float(i)]) for i in range(8)]
        assert map_points(lambda p: p[0] ** 2, points, n_jobs=2) == [float(i) ** 2 for i in range(8)]
