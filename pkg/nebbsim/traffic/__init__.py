"""NEBBSIM Traffic - synthetic patterns and seeded per-node sources."""

from nebbsim.traffic.patterns import TrafficPattern, TrafficSpec
from nebbsim.traffic.source import RNG_ALGORITHM, TrafficGenerator, zero_load_latency

__all__ = [
    "TrafficPattern",
    "TrafficSpec",
    "RNG_ALGORITHM",
    "TrafficGenerator",
    "zero_load_latency",
]
