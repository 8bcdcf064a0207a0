"""
Service Layer Base Classes

Common start/success/failure logging and error conversion for pipeline stages.
"""

from __future__ import annotations

from abc import ABC
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, TypeVar

from app.core.exceptions import AisActivityError, StageError
from app.core.logging import get_logger

T = TypeVar("T")
R = TypeVar("R")


class BaseService(ABC):
    """
    Service base class providing shared logging and error helpers.

    Every stage runs through `_execute_with_handling`, which records its state
    in `stage_status` so that a failed run still reports which stages finished.
    """

    def __init__(self, *, threads: int = 1) -> None:
        self.threads = threads
        self.stage_status: dict[str, tuple[str, str | None]] = {}
        self.logger = get_logger(self.__class__.__name__)

    def _log_start(self, operation: str, payload: dict[str, Any] | None = None) -> None:
        self.logger.info("service_operation_start", operation=operation, **(payload or {}))

    def _log_success(self, operation: str, metadata: dict[str, Any] | None = None) -> None:
        meta = metadata or {}
        self.logger.info("service_operation_success", operation=operation, **meta)

    def _log_failure(self, operation: str, error: Exception) -> None:
        self.logger.error(
            "service_operation_failed",
            operation=operation,
            error=str(error),
            error_type=type(error).__name__,
        )

    def _execute_with_handling(
        self,
        operation: str,
        action: Callable[[], T],
        *,
        metadata: Callable[[T], dict[str, Any]] | None = None,
    ) -> T:
        """
        Run one stage: start/success/failure logs and conversion to StageError

        Raises:
            StageError: tagged with `operation`, wrapping whatever the stage raised
        """
        self._log_start(operation)
        try:
            result = action()
        except StageError as exc:
            self._log_failure(operation, exc)
            self.stage_status[operation] = ("failed", exc.message)
            raise
        except AisActivityError as exc:
            self._log_failure(operation, exc)
            self.stage_status[operation] = ("failed", exc.message)
            raise StageError(exc.message, stage=operation, code=exc.code) from exc
        except Exception as exc:  # noqa: BLE001 - converted at the stage boundary
            self._log_failure(operation, exc)
            self.stage_status[operation] = ("failed", str(exc))
            raise StageError(str(exc), stage=operation) from exc

        self.stage_status[operation] = ("ok", None)
        self._log_success(operation, metadata(result) if metadata else None)
        return result

    def _map_parallel(self, func: Callable[[T], R], items: Iterable[T]) -> list[R]:
        return parallel_map(func, items, self.threads)


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Order-preserving map, threaded when more than one worker is configured."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
