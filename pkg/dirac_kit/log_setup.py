"""日志配置 (loguru sinks for the command line and the regression runner)"""

import sys
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

from loguru import logger

LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level} | {message}"


def setup_logging(log_dir: Optional[Union[str, Path]] = None, verbose: bool = False) -> Optional[Path]:
    """配置日志: DEBUG to a timestamped file, INFO (or DEBUG) to stderr"""
    logger.remove()
    log_file = None
    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"dirac_kit_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
        logger.add(log_file, level="DEBUG", format=LOG_FORMAT)
    logger.add(sys.stderr, level="DEBUG" if verbose else "INFO", format=LOG_FORMAT)
    return log_file
