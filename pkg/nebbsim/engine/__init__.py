"""NEBBSIM Engine - configuration, the network, runs, scenarios and sweeps."""

from nebbsim.engine.config import SimConfig, load_config_file
from nebbsim.engine.network import Network
from nebbsim.engine.simulation import Scenario, ScriptedPacket, run, simulate
from nebbsim.engine.scenarios import figure6_scenario, split_bypass_scenario, zero_load_probe
from nebbsim.engine.sweep import find_saturation, sweep

__all__ = [
    "SimConfig",
    "load_config_file",
    "Network",
    "Scenario",
    "ScriptedPacket",
    "run",
    "simulate",
    "figure6_scenario",
    "split_bypass_scenario",
    "zero_load_probe",
    "find_saturation",
    "sweep",
]
