"""
NEBBSIM Logging System
Cycle-stamped, hashed log entries shown through rich and folded into a
per-run digest.
"""

from .sim_logger import (
    LogLevel,
    SimLogEntry,
    SimLogger,
    get_logger,
)

from .log_manager import (
    LogConfig,
    SimLogManager,
    init_logging,
    get_log_manager,
    reset_logging,
    session_digest,
)

__all__ = [
    "LogLevel",
    "SimLogEntry",
    "SimLogger",
    "get_logger",
    "LogConfig",
    "SimLogManager",
    "init_logging",
    "get_log_manager",
    "reset_logging",
    "session_digest",
]
