"""
NEBBSIM Traffic - Synthetic patterns and what the sources inject.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from nebbsim.core.errors import ConfigurationError

HOTSPOT_NODES: Tuple[int, ...] = (0, 15, 240, 255)


class TrafficPattern(Enum):
    """Supported destination patterns."""
    UNIFORM = "uniform"      # any other node, equally likely
    BIT_REVERSAL = "bitrev"  # reverse the bits of the source id
    TRANSPOSE = "transpose"  # swap the high and low halves of the source id
    HOTSPOT = "hotspot"      # a fraction of the traffic goes to a few nodes

    @classmethod
    def parse(cls, text: str) -> "TrafficPattern":
        wanted = text.strip().lower().replace("-", "").replace("_", "")
        aliases = {"bitreversal": cls.BIT_REVERSAL, "bitrev": cls.BIT_REVERSAL}
        if wanted in aliases:
            return aliases[wanted]
        for pattern in cls:
            if pattern.value == wanted:
                return pattern
        known = ", ".join(p.value for p in cls)
        raise ConfigurationError(f"unknown traffic pattern {text!r} (known: {known})")

    @property
    def permutation(self) -> bool:
        return self in (TrafficPattern.BIT_REVERSAL, TrafficPattern.TRANSPOSE)


def address_bits(nodes: int) -> int:
    """Bits of a node id; `nodes` must be a power of two."""
    bits = nodes.bit_length() - 1
    if nodes < 2 or 1 << bits != nodes:
        raise ConfigurationError(f"permutation patterns need a power-of-two node count, got {nodes}")
    return bits


def bit_reverse(node: int, bits: int) -> int:
    result = 0
    for _ in range(bits):
        result = (result << 1) | (node & 1)
        node >>= 1
    return result


def transpose(node: int, bits: int) -> int:
    if bits % 2:
        raise ConfigurationError(f"transpose needs an even number of address bits, got {bits}")
    half = bits // 2
    mask = (1 << half) - 1
    return ((node & mask) << half) | (node >> half)


def permutation_destination(pattern: TrafficPattern, source: int, nodes: int) -> Optional[int]:
    """Fixed destination of a permutation pattern; None when it maps the node to itself."""
    bits = address_bits(nodes)
    dest = bit_reverse(source, bits) if pattern is TrafficPattern.BIT_REVERSAL else transpose(source, bits)
    return None if dest == source else dest


@dataclass(frozen=True)
class TrafficSpec:
    """
    What the sources inject.

    Attributes:
        injection_rate: Offered load in flits/node/cycle
        packet_sizes: One size, or (small, large) for the bimodal mix
        single_flit_ratio: Probability of the first size in the bimodal mix
        hotspot_fraction: Share of hotspot traffic sent to the hotspot nodes
    """
    pattern: TrafficPattern = TrafficPattern.UNIFORM
    injection_rate: float = 0.05
    packet_sizes: Tuple[int, ...] = (1, 5)
    single_flit_ratio: float = 0.8
    hotspot_nodes: Tuple[int, ...] = HOTSPOT_NODES
    hotspot_fraction: float = 0.25
    seed: int = 1

    def __post_init__(self):
        if not 0.0 <= self.injection_rate <= 1.0:
            raise ConfigurationError(f"injection rate must be in [0, 1], got {self.injection_rate}")
        if not 1 <= len(self.packet_sizes) <= 2 or min(self.packet_sizes) < 1:
            raise ConfigurationError(f"packet sizes must be one or two sizes >= 1, got {self.packet_sizes}")
        if not 0.0 <= self.single_flit_ratio <= 1.0:
            raise ConfigurationError(f"size ratio must be in [0, 1], got {self.single_flit_ratio}")
        if not 0.0 <= self.hotspot_fraction <= 1.0:
            raise ConfigurationError(f"hotspot fraction must be in [0, 1], got {self.hotspot_fraction}")

    @property
    def bimodal(self) -> bool:
        return len(self.packet_sizes) == 2

    @property
    def max_packet_size(self) -> int:
        return max(self.packet_sizes)

    @property
    def mean_packet_size(self) -> float:
        if not self.bimodal:
            return float(self.packet_sizes[0])
        small, large = self.packet_sizes
        return self.single_flit_ratio * small + (1.0 - self.single_flit_ratio) * large

    @property
    def packet_probability(self) -> float:
        """Per-cycle chance that a node generates a packet."""
        return self.injection_rate / self.mean_packet_size

    def size_for(self, u: float) -> int:
        """Packet size from a uniform draw in [0, 1)."""
        if not self.bimodal or u < self.single_flit_ratio:
            return self.packet_sizes[0]
        return self.packet_sizes[1]

    def destination(self, source: int, nodes: int, u_pick: float, u_hot: float) -> Optional[int]:
        """Destination for `source` from two uniform draws; None means no packet."""
        if self.pattern.permutation:
            return permutation_destination(self.pattern, source, nodes)
        if self.pattern is TrafficPattern.HOTSPOT and u_hot < self.hotspot_fraction:
            targets = [n for n in self.hotspot_nodes if n < nodes and n != source]
            if targets:
                return targets[int(u_pick * len(targets))]
        return uniform_destination(source, nodes, u_pick)


def uniform_destination(source: int, nodes: int, u: float) -> int:
    """Uniform over every node except the source."""
    dest = int(u * (nodes - 1))
    return dest + 1 if dest >= source else dest
