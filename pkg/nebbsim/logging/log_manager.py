"""
NEBBSIM Log Manager
Routes log entries to the terminal, an optional JSON-lines file, and the
running session digest.
"""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

from rich.console import Console
from rich.markup import escape

from nebbsim.logging.sim_logger import LogLevel, SimLogEntry, clear_loggers

_LEVEL_STYLES = {
    LogLevel.CRITICAL: "bold bright_red",
    LogLevel.ERROR: "red",
    LogLevel.WARNING: "yellow",
    LogLevel.INFO: "green",
    LogLevel.DEBUG: "cyan",
    LogLevel.TRACE: "bright_black",
}


@dataclass
class LogConfig:
    """Configuration for logging behavior"""
    min_level: LogLevel = LogLevel.WARNING
    color_output: bool = True
    file_output: Optional[str] = None  # JSON lines
    keep_entries: bool = True


class SimLogManager:
    """Owns the console, the log file and the digest of one process."""

    def __init__(self, config: Optional[LogConfig] = None):
        self.config = config or LogConfig()
        self.console = Console(stderr=True, no_color=not self.config.color_output, highlight=False)
        self.entry_count = 0
        self._digest = hashlib.sha256()
        self._file: Optional[TextIO] = None
        if self.config.file_output:
            path = Path(self.config.file_output)
            path.parent.mkdir(parents=True, exist_ok=True)
            self._file = path.open("a", encoding="utf-8")

    def record(self, entry: SimLogEntry) -> None:
        self.entry_count += 1
        self._digest.update(entry.hash_value.encode())
        if entry.level >= self.config.min_level:
            self._emit(entry)
            if self._file is not None:
                self._file.write(json.dumps(entry.to_dict(), default=str) + "\n")

    def _emit(self, entry: SimLogEntry) -> None:
        style = _LEVEL_STYLES[entry.level]
        details = escape(" ".join(f"{k}={v}" for k, v in entry.state.items()))
        cycle = f"@{entry.cycle}" if entry.cycle >= 0 else ""
        self.console.print(
            f"[{style}][NEBB] {entry.level.value:8}[/{style}] | "
            f"[dim]{entry.component:12}[/dim] | {escape(entry.operation)}{cycle} | "
            f"{details} [dim]#{entry.hash_value}[/dim]",
            markup=True,
        )

    def begin_session(self) -> None:
        """Start a fresh digest; called at the start of every run."""
        self._digest = hashlib.sha256()
        self.entry_count = 0
        clear_loggers()

    def session_digest(self) -> str:
        return self._digest.copy().hexdigest()

    def get_session_stats(self) -> Dict[str, Any]:
        return {
            "entries": self.entry_count,
            "min_level": self.config.min_level.value,
            "digest": self.session_digest(),
        }

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None


# Global log manager instance
_log_manager: Optional[SimLogManager] = None


def init_logging(config: Optional[LogConfig] = None) -> SimLogManager:
    """Initialize the global logging system"""
    global _log_manager
    if _log_manager is not None:
        _log_manager.close()
    _log_manager = SimLogManager(config)
    return _log_manager


def get_log_manager() -> SimLogManager:
    """Get the global log manager"""
    global _log_manager
    if _log_manager is None:
        _log_manager = SimLogManager()
    return _log_manager


def reset_logging() -> None:
    global _log_manager
    if _log_manager is not None:
        _log_manager.close()
    _log_manager = None
    clear_loggers()


def session_digest() -> str:
    return get_log_manager().session_digest()
