"""
Centralized Logging Configuration
Obrauer - Cyclotomic Oriented Brauer Engine

Reports go to stdout, so every log stream is routed to stderr or to files.
"""

import logging
import sys
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Dict, List, Optional

import structlog
from pythonjsonlogger import jsonlogger

ENGINE_FIELDS = ("command", "params_id", "passed", "duration_ms", "error")


class CustomJsonFormatter(jsonlogger.JsonFormatter):
    """JSON records tagged with the engine service and its run context."""

    def add_fields(
        self,
        log_record: Dict[str, Any],
        record: logging.LogRecord,
        message_dict: Dict[str, Any],
    ) -> None:
        super().add_fields(log_record, record, message_dict)
        log_record["timestamp"] = datetime.now(timezone.utc).isoformat()
        log_record["level"] = record.levelname.upper()
        log_record["logger"] = record.name
        log_record["service"] = "obrauer"
        log_record["source"] = {
            "file": record.pathname,
            "line": record.lineno,
            "function": record.funcName,
        }
        for name in ENGINE_FIELDS:
            if hasattr(record, name):
                log_record[name] = getattr(record, name)


class LoggingConfig:
    """Routes stdlib and structlog output for one engine run."""

    def __init__(
        self,
        log_level: str = "WARNING",
        log_format: str = "json",
        log_dir: str = "logs",
        app_name: str = "obrauer",
        enable_file_logging: bool = False,
        enable_console_logging: bool = True,
        max_file_size: int = 10 * 1024 * 1024,  # 10MB
        backup_count: int = 5,
    ):
        self.level = getattr(logging, log_level.upper(), logging.WARNING)
        self.json = log_format == "json"
        self.log_dir = Path(log_dir)
        self.app_name = app_name
        self.to_files = enable_file_logging
        self.to_console = enable_console_logging
        self.max_file_size = max_file_size
        self.backup_count = backup_count

    def _formatter(self) -> logging.Formatter:
        if self.json:
            return CustomJsonFormatter("%(timestamp)s %(level)s %(name)s %(message)s")
        return logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )

    def _rotating(self, suffix: str, level: int) -> logging.Handler:
        handler = RotatingFileHandler(
            self.log_dir / f"{self.app_name}{suffix}.log",
            maxBytes=self.max_file_size,
            backupCount=self.backup_count,
        )
        handler.setLevel(level)
        return handler

    def handlers(self) -> List[logging.Handler]:
        out: List[logging.Handler] = []
        if self.to_console:
            console = logging.StreamHandler(sys.stderr)
            console.setLevel(self.level)
            out.append(console)
        if self.to_files:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            out.append(self._rotating("", self.level))
            out.append(self._rotating("-error", logging.ERROR))
        return out

    def setup(self) -> logging.Logger:
        """Replace the root handlers and point structlog at stderr."""
        root = logging.getLogger()
        root.setLevel(self.level)
        root.handlers.clear()
        formatter = self._formatter()
        for handler in self.handlers():
            handler.setFormatter(formatter)
            root.addHandler(handler)

        renderer = (
            structlog.processors.JSONRenderer()
            if self.json
            else structlog.dev.ConsoleRenderer(colors=False)
        )
        structlog.configure(
            processors=[
                structlog.contextvars.merge_contextvars,
                structlog.processors.add_log_level,
                structlog.processors.StackInfoRenderer(),
                structlog.dev.set_exc_info,
                structlog.processors.TimeStamper(fmt="iso"),
                renderer,
            ],
            wrapper_class=structlog.make_filtering_bound_logger(self.level),
            context_class=dict,
            logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
            cache_logger_on_first_use=False,
        )
        return root


class ContextLogger:
    """Stdlib logger that stamps bound run context onto every record."""

    def __init__(self, name: str):
        self.logger = logging.getLogger(name)
        self._context: Dict[str, Any] = {}

    def bind(self, **kwargs) -> "ContextLogger":
        self._context.update(kwargs)
        return self

    def _log(self, level: int, msg: str, extra: Optional[Dict[str, Any]] = None) -> None:
        self.logger.log(level, msg, extra={**(extra or {}), **self._context})

    def info(self, msg: str, extra: Optional[Dict[str, Any]] = None) -> None:
        self._log(logging.INFO, msg, extra)

    def error(self, msg: str, extra: Optional[Dict[str, Any]] = None) -> None:
        self._log(logging.ERROR, msg, extra)
