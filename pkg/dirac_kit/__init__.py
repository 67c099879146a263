"""
dirac-kit: Dirac structures, their symmetry reduction and nonholonomic mechanics,
computed pointwise on coordinate charts.
"""

from .analysis import SCHEMA, AnalysisRunner, dump_report, run_analysis
from .errors import (ChartMismatchError, DimensionError, DiracKitError, ExpressionError, InadmissibleError,
                     InputError, JetOrderError, RankError)
from .expressions import compile_expression, parse_expression, to_text
from .outcomes import CheckOutcome, Witness
from .settings import DEFAULT_SETTINGS, load_settings
from .system_config import build_from_file, build_system
from .verification import AcceptanceVerifier

__version__ = "0.1.0"

__all__ = [
    "SCHEMA", "AnalysisRunner", "run_analysis", "dump_report", "AcceptanceVerifier",
    "parse_expression", "compile_expression", "to_text", "build_system", "build_from_file",
    "CheckOutcome", "Witness", "DEFAULT_SETTINGS", "load_settings",
    "DiracKitError", "InputError", "ExpressionError", "ChartMismatchError", "DimensionError",
    "InadmissibleError", "JetOrderError", "RankError",
]
