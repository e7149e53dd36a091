"""
NEBBSIM Core - Domain vocabulary shared by every module.
"""

from nebbsim.core.errors import ConfigurationError, InvariantViolation
from nebbsim.core.flit import Flit, FlitRole, HopRecord, PacketDescriptor, segment_packet
from nebbsim.core.lookahead import LaPriority, Lookahead, make_lookahead
from nebbsim.core.mechanism import FlowControl, LaMode, Mechanism
from nebbsim.core.ports import TRANSIT_PORTS, Direction, PortId

__all__ = [
    "ConfigurationError",
    "InvariantViolation",
    "Flit",
    "FlitRole",
    "HopRecord",
    "PacketDescriptor",
    "segment_packet",
    "LaPriority",
    "Lookahead",
    "make_lookahead",
    "FlowControl",
    "LaMode",
    "Mechanism",
    "TRANSIT_PORTS",
    "Direction",
    "PortId",
]
