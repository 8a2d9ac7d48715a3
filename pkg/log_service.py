"""
Logging service for heckelab.

This module provides the centralized logging used throughout the package:
one JSON-like line per record on standard error (standard output carries CSV
and JSON results), plus an optional log file when HECKELAB_LOG_DIR is set.
"""

import logging
import os
import sys
from datetime import datetime
from typing import Optional


class LogService:
    """
    Centralized logging service for heckelab.

    The first instantiation configures the root logger; later ones return the
    same object without touching the handlers again.
    """

    _instance = None
    _initialized = False

    def __new__(cls):
        """Singleton pattern to ensure only one logger configuration exists."""
        if cls._instance is None:
            cls._instance = super(LogService, cls).__new__(cls)
        return cls._instance

    def __init__(self):
        """Initialize the logging service if not already initialized."""
        if LogService._initialized:
            return

        self.root_logger = logging.getLogger()
        level_name = os.environ.get("HECKELAB_LOG_LEVEL", "INFO").upper()
        level = getattr(logging, level_name, logging.INFO)
        self.root_logger.setLevel(level)

        # Remove existing handlers to avoid duplicate logs
        for handler in self.root_logger.handlers[:]:
            self.root_logger.removeHandler(handler)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level)
        console_format = logging.Formatter(
            '{"time": "%(asctime)s", "thread": "%(threadName)s", "name": "%(name)s", "level": "%(levelname)s", "message": "%(message)s"}'
        )
        console_handler.setFormatter(console_format)
        self.root_logger.addHandler(console_handler)

        log_dir = os.environ.get("HECKELAB_LOG_DIR")
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
            current_time = datetime.now().strftime("%Y%m%d_%H%M%S")
            log_filename = os.path.join(log_dir, f"heckelab_{current_time}.log")

            file_handler = logging.FileHandler(log_filename)
            file_handler.setLevel(level)
            file_handler.setFormatter(
                logging.Formatter(
                    "%(asctime)s - [%(threadName)s] - %(levelname)s - %(name)s - %(message)s"
                )
            )
            self.root_logger.addHandler(file_handler)

        LogService._initialized = True

    def get_logger(self, name: str) -> logging.Logger:
        """
        Get a named logger that will use the centralized configuration.

        Args:
            name: The name of the logger to get, typically the module name.

        Returns:
            A configured logger instance.
        """
        return logging.getLogger(name)

    def log_run_start(self, subcommand: str) -> None:
        """Log the start of a subcommand run."""
        self.root_logger.info("===== heckelab %s started =====", subcommand)

    def log_run_end(
        self, subcommand: str, rows: Optional[int], seconds: float
    ) -> None:
        """
        Log the end of a subcommand run with summary statistics.

        Args:
            subcommand: Name of the subcommand that ran
            rows: Number of result rows written (None for single-result commands)
            seconds: Wall time of the run
        """
        self.root_logger.info("===== heckelab %s completed =====", subcommand)
        if rows is not None:
            self.root_logger.info("Rows written: %d", rows)
        self.root_logger.info("Wall time: %.3f s", seconds)


def get_logger(name: str) -> logging.Logger:
    """
    Get a named logger that uses the centralized configuration.

    Args:
        name: The name for the logger, typically the module name

    Returns:
        A configured logger instance
    """
    LogService()
    return logging.getLogger(name)
