"""
Run defaults.

Values come from config/dirac_kit.yaml when present; command line flags override them.
"""

import copy
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from loguru import logger

from .errors import InputError

PROJECT_ROOT = Path(__file__).resolve().parent.parent
CONFIG_FILE = PROJECT_ROOT / "config" / "dirac_kit.yaml"

DEFAULT_SETTINGS: Dict[str, Any] = {
    "tol": 1e-9,
    "samples": 128,
    "seed": 42,
    "fd_step": 1e-4,       # fraction of the box width
    "fd_tol": 1e-7,        # membership tolerance for stencil-differentiated sections
    "closedness_samples": 24,
    "n_jobs": 1,
    "report_points": 3,
    "momentum_box": [-2.0, 2.0],
    "log_dir": "results",
}


def load_settings(config_file: Optional[Union[str, Path]] = None,
                  overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """加载配置文件, merged over the defaults"""
    settings = copy.deepcopy(DEFAULT_SETTINGS)
    path = Path(config_file) if config_file is not None else CONFIG_FILE

    if path.exists():
        with open(path, "r") as f:
            loaded = yaml.safe_load(f) or {}
        if not isinstance(loaded, dict):
            raise InputError(f"Settings file {path} must hold a mapping")
        unknown = sorted(set(loaded) - set(DEFAULT_SETTINGS))
        if unknown:
            logger.warning(f"Ignoring unknown settings in {path}: {unknown}")
        settings.update({k: v for k, v in loaded.items() if k in DEFAULT_SETTINGS})
    elif config_file is not None:
        raise InputError(f"Settings file not found: {path}")

    for key, value in (overrides or {}).items():
        if value is not None:
            settings[key] = value

    if settings["tol"] <= 0 or settings["fd_tol"] <= 0:
        raise InputError("Tolerances must be positive")
    if int(settings["samples"]) < 1:
        raise InputError("samples must be at least 1")
    return settings
