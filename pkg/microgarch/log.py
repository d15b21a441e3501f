import logging
import sys

import structlog

_LEVELS = {
    0: logging.WARNING,
    1: logging.INFO,
    2: logging.DEBUG,
}


def configure_logging(verbosity: int = 0) -> None:
    """Route structlog output to standard error at a level picked by the command-line
    verbosity. Library code only ever asks for loggers; the front end is the one place
    that decides where they go.

    :param verbosity: 0 for warnings, 1 for info, 2 or more for debug.
    """
    level = _LEVELS[min(max(verbosity, 0), 2)]
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=structlog.PrintLoggerFactory(sys.stderr),
        cache_logger_on_first_use=False,
    )
