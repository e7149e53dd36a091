"""
NEBBSIM Core - Router ports.

A router has 4 transit ports (X+, X-, Y+, Y-) and c local
(injection/ejection) ports. Inside the cycle loop ports are plain integers:
transit ports are numbered by Direction value, local slot s is 4 + s.
PortId is the typed view of that number.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

TRANSIT_PORTS = 4


class Direction(Enum):
    """Transit directions, numbered as their port index."""
    X_PLUS = 0
    X_MINUS = 1
    Y_PLUS = 2
    Y_MINUS = 3

    @property
    def dimension(self) -> int:
        return self.value // 2

    @property
    def opposite(self) -> "Direction":
        return Direction(self.value ^ 1)

    @property
    def positive(self) -> bool:
        return self.value % 2 == 0

    @property
    def label(self) -> str:
        return ("X", "Y")[self.dimension] + ("+" if self.positive else "-")


@dataclass(frozen=True)
class PortId:
    """Either Transit(direction) or Local(slot)."""
    direction: Optional[Direction] = None
    slot: Optional[int] = None

    def __post_init__(self):
        if (self.direction is None) == (self.slot is None):
            raise ValueError("PortId needs exactly one of direction or slot")
        if self.slot is not None and self.slot < 0:
            raise ValueError(f"negative local slot {self.slot}")

    @classmethod
    def transit(cls, direction: Direction) -> "PortId":
        return cls(direction=direction)

    @classmethod
    def local(cls, slot: int) -> "PortId":
        return cls(slot=slot)

    @classmethod
    def from_number(cls, number: int) -> "PortId":
        if number < TRANSIT_PORTS:
            return cls(direction=Direction(number))
        return cls(slot=number - TRANSIT_PORTS)

    @property
    def is_local(self) -> bool:
        return self.slot is not None

    @property
    def number(self) -> int:
        if self.direction is not None:
            return self.direction.value
        return TRANSIT_PORTS + self.slot

    def __str__(self) -> str:
        if self.direction is not None:
            return self.direction.label
        return f"L{self.slot}"


def is_local_port(port: int) -> bool:
    return port >= TRANSIT_PORTS


def port_dimension(port: int) -> Optional[int]:
    """Dimension (0 = X, 1 = Y) of a transit port number; None for local ports."""
    if port >= TRANSIT_PORTS:
        return None
    return port // 2


def opposite_port(port: int) -> int:
    """Input port at the neighbour that receives what leaves through `port`."""
    return port ^ 1


def port_label(port: int) -> str:
    return str(PortId.from_number(port))
