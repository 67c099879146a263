"""Shared fixtures: small sample counts so the suite stays quick"""

import sys
from pathlib import Path

import numpy as np
import pytest

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from dirac_kit import systems_catalog  # noqa: E402
from dirac_kit.analysis import AnalysisRunner  # noqa: E402
from dirac_kit.dirac_core import graph_of_two_form  # noqa: E402
from dirac_kit.jet_calculus import Chart, TwoForm  # noqa: E402
from dirac_kit.settings import DEFAULT_SETTINGS  # noqa: E402
from dirac_kit.verification import AcceptanceVerifier  # noqa: E402

FAST = {"samples": 4, "closedness_samples": 2, "report_points": 1, "seed": 42}


@pytest.fixture(scope="session")
def fast_settings():
    settings = dict(DEFAULT_SETTINGS)
    settings.update(FAST)
    return settings


@pytest.fixture
def plane():
    return Chart.build("plane", ["q", "p"])


@pytest.fixture
def canonical(plane):
    """graph of dq∧dp on the plane"""
    return graph_of_two_form(plane, [], TwoForm.from_upper(plane, {("q", "p"): 1.0}), "canonical")


@pytest.fixture(scope="session")
def particle():
    return systems_catalog.load("constrained_particle")


@pytest.fixture(scope="session")
def acceptance(fast_settings):
    """one verifier for the session so every catalog analysis runs once"""
    return AcceptanceVerifier(fast_settings, subspace_trials=20)


@pytest.fixture(scope="session")
def particle_report(particle, fast_settings):
    return AnalysisRunner(particle, "R2", fast_settings).run()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
