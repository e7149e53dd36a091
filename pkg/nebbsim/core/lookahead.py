"""
NEBBSIM Core - Lookaheads.

A lookahead (LA) is generated when a flit enters the crossbar and reaches
the next router one cycle before the flit, where it tries to pre-configure
the crossbar so the flit skips buffer write and allocation.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from nebbsim.core.flit import Flit, FlitRole, PacketDescriptor
from nebbsim.core.ports import port_label


class LaPriority(Enum):
    MAX = "Max"
    NORMAL = "Normal"


@dataclass(frozen=True)
class Lookahead:
    """
    Control record travelling one cycle ahead of its flit.

    out_port and in_port are port numbers at the receiving router. dest_vc is
    left unset by the sender and filled in by the receiver's LA stage, which
    is the only place that knows which output VCs are free.
    """
    flit: Flit
    out_port: int
    in_vc: int
    dest_vc: Optional[int]
    vct_mode: bool
    priority: LaPriority
    in_port: int = -1

    @property
    def packet(self) -> PacketDescriptor:
        return self.flit.packet

    @property
    def flit_role(self) -> FlitRole:
        return self.flit.role

    def __repr__(self) -> str:
        return (f"LA(p{self.packet.id}.{self.flit.seq} in={self.in_port}/{self.in_vc} "
                f"out={port_label(self.out_port)}/{self.dest_vc} {self.priority.value})")


def make_lookahead(
    flit: Flit,
    out_port: int,
    in_vc: int,
    dest_vc: Optional[int],
    vct_mode: bool,
    in_port: int = -1,
) -> Lookahead:
    """Build an LA; Max priority only for VCT bypasses of multi-flit packets."""
    priority = LaPriority.MAX if vct_mode and flit.packet.multi_flit else LaPriority.NORMAL
    return Lookahead(
        flit=flit,
        out_port=out_port,
        in_vc=in_vc,
        dest_vc=dest_vc,
        vct_mode=vct_mode,
        priority=priority,
        in_port=in_port,
    )
