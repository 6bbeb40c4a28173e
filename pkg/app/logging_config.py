import logging
import sys

import structlog


def configure_logging(level: str = "WARNING", fmt: str = "console") -> None:
    """
    Route stdlib log records to stderr through a structlog renderer.

    Args:
        level: Root log level name
        fmt: ``console`` for human readable lines, ``json`` for one JSON object per line
    """
    renderer = structlog.processors.JSONRenderer() if fmt == "json" else structlog.dev.ConsoleRenderer(colors=False)
    formatter = structlog.stdlib.ProcessorFormatter(
        processor=renderer,
        foreign_pre_chain=[
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.processors.TimeStamper(fmt="iso"),
        ],
    )

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(formatter)

    root = logging.getLogger()
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(level.upper())

    # Set specific loggers to DEBUG for more detailed output
    # logging.getLogger("app.services.kernel").setLevel(logging.DEBUG)
    # logging.getLogger("app.models.external").setLevel(logging.DEBUG)
