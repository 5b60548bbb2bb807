import logging
import json
import sys
import time
import traceback
import uuid
from datetime import datetime, timezone
from functools import wraps
from typing import Any, Callable, Optional, TypeVar

from climtrend.config import settings

# Configure root logger; stderr keeps stdout and artifacts clean
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format="%(message)s",
    handlers=[logging.StreamHandler(sys.stderr)]
)

F = TypeVar("F", bound=Callable[..., Any])


class StructuredLogger:
    """
    Structured logger that outputs JSON logs
    """

    def __init__(self, name: str):
        self.logger = logging.getLogger(name)
        self.run_id: Optional[str] = None

    def _log(self, level: int, message: str, **kwargs):
        """
        Log a message with structured data
        """
        if not self.logger.isEnabledFor(level):
            return

        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": logging.getLevelName(level),
            "message": message,
            "service": settings.APP_NAME,
            "environment": settings.ENVIRONMENT,
        }

        # Add run ID if available
        if self.run_id:
            log_data["run_id"] = self.run_id

        exc_info = kwargs.pop("exc_info", False)
        if kwargs:
            log_data.update(kwargs)

        # Handle exceptions
        if exc_info:
            exc_type, exc_value, exc_traceback = sys.exc_info()
            if exc_type and exc_value:
                log_data["exception"] = {
                    "type": exc_type.__name__,
                    "message": str(exc_value),
                    "traceback": traceback.format_exception(exc_type, exc_value, exc_traceback)
                }

        # Log as JSON; numpy scalars and paths fall back to str
        self.logger.log(level, json.dumps(log_data, default=str))

    def debug(self, message: str, **kwargs):
        self._log(logging.DEBUG, message, **kwargs)

    def info(self, message: str, **kwargs):
        self._log(logging.INFO, message, **kwargs)

    def warning(self, message: str, **kwargs):
        self._log(logging.WARNING, message, **kwargs)

    def error(self, message: str, **kwargs):
        self._log(logging.ERROR, message, **kwargs)

    def critical(self, message: str, **kwargs):
        self._log(logging.CRITICAL, message, **kwargs)

    def set_run_id(self, run_id: Optional[str]):
        """Set run ID for correlation"""
        self.run_id = run_id

    def set_level(self, level: str):
        self.logger.setLevel(getattr(logging, level.upper(), logging.INFO))


# Create logger instance
logger = StructuredLogger("climtrend")


def log_command(func: F) -> F:
    """
    Decorator for command logging and timing
    """
    @wraps(func)
    def wrapper(config, *args, **kwargs):
        run_id = str(uuid.uuid4())
        logger.set_run_id(run_id)

        command = getattr(config.command, "value", str(config.command))
        logger.info(
            f"Command started: {command}",
            command=command,
            config=config.model_dump(mode="json"),
        )

        start_time = time.perf_counter()
        try:
            result = func(config, *args, **kwargs)
            logger.info(
                f"Command completed: {command}",
                command=command,
                duration=time.perf_counter() - start_time,
            )
            return result
        except Exception as e:
            # Expected failures are logged without traceback
            expected = getattr(e, "exit_code", None) is not None
            logger.error(
                f"Command failed: {command}",
                command=command,
                error=str(e),
                duration=time.perf_counter() - start_time,
                exc_info=not expected,
            )
            raise
        finally:
            logger.set_run_id(None)

    return wrapper  # type: ignore[return-value]
