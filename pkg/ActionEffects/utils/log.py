import logging
import sys

__all__ = ['setup_logging']

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level=logging.INFO):
    """
    Configures the 'ActionEffects' logger with a single stderr handler.
    Calling it again replaces the handler instead of stacking a new one.

    :param level: Logging level for the package logger.
    :rtype: logging.Logger
    """
    logger = logging.getLogger('ActionEffects')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level)
    logger.propagate = False
    return logger
