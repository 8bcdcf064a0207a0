"""
Structured Logging & Stage Timing
"""

import logging
import sys
import time
from functools import wraps
from typing import Any, Callable, TypeVar

import structlog
from structlog.types import EventDict, Processor

from app.core.config import Settings, settings as default_settings

F = TypeVar("F", bound=Callable[..., Any])

_app_context: dict[str, str] = {
    "app": default_settings.app_name,
    "version": default_settings.app_version,
}


def add_app_context(logger: Any, method_name: str, event_dict: EventDict) -> EventDict:
    """Stamp every event with the tool name and version."""
    event_dict.update(_app_context)
    return event_dict


def configure_logging(config: Settings | None = None) -> None:
    """
    Route structlog to stderr, as JSON lines when `log_json` is set.

    stdout carries command output only (e.g. the path printed by gen-synthetic).
    """
    config = config or default_settings
    _app_context["app"] = config.app_name
    _app_context["version"] = config.app_version

    shared_processors: list[Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        add_app_context,
    ]

    if config.log_json:
        processors: list[Processor] = [
            *shared_processors,
            structlog.processors.format_exc_info,
            structlog.processors.JSONRenderer(),
        ]
    else:
        processors = [
            *shared_processors,
            structlog.processors.ExceptionPrettyPrinter(),
            structlog.dev.ConsoleRenderer(colors=False),
        ]

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.getLevelName(config.log_level)
        ),
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=logging.getLevelName(config.log_level),
    )


def get_logger(name: str) -> structlog.stdlib.BoundLogger:
    """logger = get_logger(__name__); logger.info("movements_segmented", mmsi=..., movements=4)"""
    return structlog.get_logger(name)


def measure_latency(operation: str) -> Callable[[F], F]:
    """Log the wall time spent in a pipeline stage."""

    def decorator(func: F) -> F:
        @wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            start = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                elapsed_ms = (time.perf_counter() - start) * 1000
                get_logger(func.__module__).info(
                    "latency", operation=operation, latency_ms=round(elapsed_ms, 3)
                )

        return wrapper  # type: ignore[return-value]

    return decorator
