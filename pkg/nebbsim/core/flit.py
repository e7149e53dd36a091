"""
NEBBSIM Core - Packets and flits.

These are the units every other module moves around. Packets are immutable
descriptors; flits are the mutable per-hop carriers of a packet.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List

from nebbsim.core.errors import ConfigurationError


class FlitRole(Enum):
    """Position of a flit within its packet."""
    HEAD_TAIL = "HeadTail"  # single-flit packet, both head and tail
    HEAD = "Head"
    BODY = "Body"
    TAIL = "Tail"

    @property
    def is_head(self) -> bool:
        return self is FlitRole.HEAD or self is FlitRole.HEAD_TAIL

    @property
    def is_tail(self) -> bool:
        return self is FlitRole.TAIL or self is FlitRole.HEAD_TAIL

    @property
    def symbol(self) -> str:
        return {"HeadTail": "HT", "Head": "H", "Body": "B", "Tail": "T"}[self.value]


@dataclass(frozen=True)
class PacketDescriptor:
    """
    Identity of a packet.

    Attributes:
        id: Unique per simulation run
        source: Injecting node
        destination: Ejecting node
        size: Flit count
        creation_cycle: Cycle at which the traffic source generated it
    """
    id: int
    source: int
    destination: int
    size: int
    creation_cycle: int

    def __post_init__(self):
        if self.size < 1:
            raise ConfigurationError(f"packet {self.id}: size must be >= 1, got {self.size}")
        if self.source == self.destination:
            raise ConfigurationError(f"packet {self.id}: source equals destination ({self.source})")

    @property
    def multi_flit(self) -> bool:
        return self.size > 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "source": self.source,
            "destination": self.destination,
            "size": self.size,
            "creation_cycle": self.creation_cycle,
        }


@dataclass(frozen=True)
class HopRecord:
    router: int
    was_buffered: bool


@dataclass(eq=False)
class Flit:
    """
    One flit of a packet.

    `arrival_cycle` is the cycle the flit was written into the current
    router's buffer; it may request switch allocation from the next cycle on.
    """
    packet: PacketDescriptor
    role: FlitRole
    seq: int
    injection_cycle: int = -1
    hops: List[HopRecord] = field(default_factory=list)
    arrival_cycle: int = -1

    @property
    def is_head(self) -> bool:
        return self.role.is_head

    @property
    def is_tail(self) -> bool:
        return self.role.is_tail

    def record_hop(self, router: int, was_buffered: bool) -> None:
        self.hops.append(HopRecord(router, was_buffered))

    def __repr__(self) -> str:
        return f"Flit(p{self.packet.id}.{self.seq}:{self.role.symbol})"


def segment_packet(pkt: PacketDescriptor) -> List[Flit]:
    """Split a packet into its flits: HeadTail, or Head Body* Tail."""
    if pkt.size < 1:
        raise ConfigurationError(f"cannot segment packet of size {pkt.size}")
    if pkt.size == 1:
        return [Flit(pkt, FlitRole.HEAD_TAIL, 0)]
    roles = [FlitRole.HEAD] + [FlitRole.BODY] * (pkt.size - 2) + [FlitRole.TAIL]
    return [Flit(pkt, role, seq) for seq, role in enumerate(roles)]
