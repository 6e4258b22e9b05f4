# utils/log_setup.py
"""
Logging setup. Entry points call configure_logging() once; every module
just does `from loguru import logger`.
"""

import os
import sys

from loguru import logger

from config.settings import LOG_FILE, LOG_LEVEL

_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} - {level} - {name}:{function} - {message}"


def configure_logging(level=None, log_file=None):
    """
    Install the stderr sink and, optionally, a rotating file sink.

    Args:
        level (str): Minimum level, defaults to KOSZUL_LOG_LEVEL
        log_file (str): File path, defaults to KOSZUL_LOG_FILE (None disables)
    """
    level = (level or LOG_LEVEL).upper()
    log_file = log_file or LOG_FILE

    logger.remove()
    logger.add(sys.stderr, level=level, format=_FORMAT)

    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        logger.add(log_file, level=level, format=_FORMAT, rotation="10 MB")

    return logger
