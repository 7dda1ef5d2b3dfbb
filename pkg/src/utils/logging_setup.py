"""
Logging configuration for the command-line entry point
"""
import logging

LOG_FORMAT = '%(asctime)s %(levelname)-7s %(name)s: %(message)s'


def configure_logging(verbosity=0):
    """
    Install one stream handler on the root logger

    Args:
        verbosity: 0 = warnings only, 1 = info, 2+ = debug
    """
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.WARNING

    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
    logging.getLogger(__name__).debug('Logging configured at %s', logging.getLevelName(level))
