"""
NEBBSIM Cycle Logger
Hashed, cycle-stamped log entries for debugging and run verification.

Every entry hashes only simulated state (cycle, component, operation, state),
never wall-clock time, so two runs of the same configuration produce the same
sequence of hashes and the same session digest.
"""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List


class LogLevel(Enum):
    """Significance levels, most severe first"""
    CRITICAL = "CRITICAL"  # Run aborted
    ERROR = "ERROR"        # Operation failed
    WARNING = "WARNING"    # Unexpected state
    INFO = "INFO"          # Run milestones
    DEBUG = "DEBUG"        # Per-event details
    TRACE = "TRACE"        # Every pipeline step

    @property
    def rank(self) -> int:
        return _RANKS[self]

    def __ge__(self, other: "LogLevel") -> bool:
        return self.rank >= other.rank

    def __lt__(self, other: "LogLevel") -> bool:
        return self.rank < other.rank

    @classmethod
    def parse(cls, text: str) -> "LogLevel":
        try:
            return cls(text.strip().upper())
        except ValueError:
            known = ", ".join(level.value for level in cls)
            raise ValueError(f"unknown log level {text!r} (known: {known})") from None


_RANKS = {
    LogLevel.CRITICAL: 50,
    LogLevel.ERROR: 40,
    LogLevel.WARNING: 30,
    LogLevel.INFO: 20,
    LogLevel.DEBUG: 10,
    LogLevel.TRACE: 5,
}


@dataclass
class SimLogEntry:
    """A single cycle-stamped observation"""
    cycle: int = -1
    level: LogLevel = LogLevel.INFO
    component: str = ""
    operation: str = ""
    state: Dict[str, Any] = field(default_factory=dict)
    hash_value: str = field(init=False)

    def __post_init__(self):
        content = {
            "cycle": self.cycle,
            "component": self.component,
            "operation": self.operation,
            "state": self.state,
        }
        self.hash_value = hashlib.sha256(
            json.dumps(content, sort_keys=True, default=str).encode()
        ).hexdigest()[:16]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cycle": self.cycle,
            "lvl": self.level.value,
            "comp": self.component,
            "op": self.operation,
            "state": self.state,
            "hash": self.hash_value,
        }


class SimLogger:
    """Logger for one simulator component"""

    def __init__(self, component_name: str):
        self.component = component_name
        self.entries: List[SimLogEntry] = []

    def enabled(self, level: LogLevel) -> bool:
        """Cheap guard for the cycle loop: will an entry at `level` be shown?"""
        from nebbsim.logging.log_manager import get_log_manager

        return level >= get_log_manager().config.min_level

    def log(self, level: LogLevel, operation: str, cycle: int = -1, **state: Any) -> SimLogEntry:
        """Record an entry and hand it to the manager for display and digest."""
        from nebbsim.logging.log_manager import get_log_manager

        entry = SimLogEntry(
            cycle=cycle,
            level=level,
            component=self.component,
            operation=operation,
            state=state,
        )
        manager = get_log_manager()
        if manager.config.keep_entries:
            self.entries.append(entry)
        manager.record(entry)
        return entry

    def critical(self, operation: str, cycle: int = -1, **state: Any) -> SimLogEntry:
        return self.log(LogLevel.CRITICAL, operation, cycle, **state)

    def error(self, operation: str, cycle: int = -1, **state: Any) -> SimLogEntry:
        return self.log(LogLevel.ERROR, operation, cycle, **state)

    def warning(self, operation: str, cycle: int = -1, **state: Any) -> SimLogEntry:
        return self.log(LogLevel.WARNING, operation, cycle, **state)

    def info(self, operation: str, cycle: int = -1, **state: Any) -> SimLogEntry:
        return self.log(LogLevel.INFO, operation, cycle, **state)

    def debug(self, operation: str, cycle: int = -1, **state: Any) -> SimLogEntry:
        return self.log(LogLevel.DEBUG, operation, cycle, **state)

    def trace(self, operation: str, cycle: int = -1, **state: Any) -> SimLogEntry:
        return self.log(LogLevel.TRACE, operation, cycle, **state)

    def get_session_hash(self) -> str:
        """Hash of this component's entries, in order"""
        content = {
            "component": self.component,
            "entries": [e.hash_value for e in self.entries],
        }
        return hashlib.sha256(json.dumps(content).encode()).hexdigest()


# Loggers for the simulator components
_loggers: Dict[str, SimLogger] = {}


def get_logger(component: str) -> SimLogger:
    """Get or create logger for component"""
    if component not in _loggers:
        _loggers[component] = SimLogger(component)
    return _loggers[component]


def clear_loggers() -> None:
    for logger in _loggers.values():
        logger.entries.clear()
