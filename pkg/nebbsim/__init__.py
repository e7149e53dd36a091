"""
╔═══════════════════════════════════════════════════════════════════════════════╗
║                                                                               ║
║    ███╗   ██╗███████╗██████╗ ██████╗ ███████╗██╗███╗   ███╗                   ║
║    ████╗  ██║██╔════╝██╔══██╗██╔══██╗██╔════╝██║████╗ ████║                   ║
║    ██╔██╗ ██║█████╗  ██████╔╝██████╔╝███████╗██║██╔████╔██║                   ║
║    ██║╚██╗██║██╔══╝  ██╔══██╗██╔══██╗╚════██║██║██║╚██╔╝██║                   ║
║    ██║ ╚████║███████╗██████╔╝██████╔╝███████║██║██║ ╚═╝ ██║                   ║
║    ╚═╝  ╚═══╝╚══════╝╚═════╝ ╚═════╝ ╚══════╝╚═╝╚═╝     ╚═╝                   ║
║                                                                               ║
║    Cycle-accurate on-chip network simulator                                   ║
║                                                                               ║
╚═══════════════════════════════════════════════════════════════════════════════╝

Routers with lookahead bypass on meshes, tori and rings. Compares empty-VC
bypass, wormhole and cut-through baselines, and non-empty-buffer bypass
(NEBB) under wormhole, cut-through and hybrid flow control.

Quick Start:
    >>> import nebbsim
    >>> report = nebbsim.run(nebbsim.SimConfig(load=0.06))
    >>> report.avg_latency
    >>>
    >>> reports = nebbsim.sweep(nebbsim.SimConfig(), [0.02, 0.04, 0.06],
    ...                         [nebbsim.Mechanism.NEBB_HYBRID, nebbsim.Mechanism.EMPTY_VC])
"""

__version__ = "0.1.0"
__license__ = "MIT"

from nebbsim.core.errors import ConfigurationError, InvariantViolation
from nebbsim.core.mechanism import Mechanism
from nebbsim.analysis.metrics import SimReport
from nebbsim.engine.config import SimConfig
from nebbsim.engine.simulation import Scenario, ScriptedPacket, run, simulate
from nebbsim.engine.scenarios import figure6_scenario, zero_load_probe
from nebbsim.engine.sweep import find_saturation, sweep
from nebbsim.export.csv_export import export_sweep_csv

__all__ = [
    "__version__",
    "ConfigurationError",
    "InvariantViolation",
    "Mechanism",
    "SimReport",
    "SimConfig",
    "Scenario",
    "ScriptedPacket",
    "run",
    "simulate",
    "figure6_scenario",
    "zero_load_probe",
    "find_saturation",
    "sweep",
    "export_sweep_csv",
]
