"""
NEBBSIM Traffic - Per-node packet sources.

Each node owns two independent PCG64 streams derived from (seed, node):
one decides whether a packet is generated this cycle, the other draws its
size and destination. Arrival draws are taken in blocks so a cycle costs one
array lookup.
"""

from itertools import count
from typing import Iterator, List, Optional

import numpy as np

from nebbsim.core.flit import PacketDescriptor
from nebbsim.topology.routing import hops
from nebbsim.topology.shape import NetworkShape
from nebbsim.traffic.patterns import TrafficPattern, TrafficSpec

RNG_ALGORITHM = "PCG64"
_BLOCK = 4096

# Fixed pipeline cost of a packet: injection link, buffered injection hop
# (BW, VA/SA, ST) and the ejection link.
BASE_LATENCY = 5
HOP_LATENCY = 2


def node_streams(seed: int, node: int) -> List[np.random.Generator]:
    """Arrival and attribute generators of one node."""
    root = np.random.SeedSequence(entropy=seed, spawn_key=(node,))
    return [np.random.Generator(np.random.PCG64(child)) for child in root.spawn(2)]


class TrafficSource:
    """Bernoulli packet source of one node."""

    def __init__(self, spec: TrafficSpec, node: int, nodes: int):
        self.spec = spec
        self.node = node
        self.nodes = nodes
        self._arrivals, self._attributes = node_streams(spec.seed, node)
        self._probability = spec.packet_probability
        self._block = np.empty(0)
        self._cursor = 0

    def _next_uniform(self) -> float:
        if self._cursor >= len(self._block):
            self._block = self._arrivals.random(_BLOCK)
            self._cursor = 0
        u = self._block[self._cursor]
        self._cursor += 1
        return float(u)

    def next_injection(self, cycle: int, packet_ids: Iterator[int]) -> Optional[PacketDescriptor]:
        if self._next_uniform() >= self._probability:
            return None
        u_size, u_pick, u_hot = self._attributes.random(3)
        dest = self.spec.destination(self.node, self.nodes, float(u_pick), float(u_hot))
        if dest is None:
            return None
        return PacketDescriptor(
            id=next(packet_ids),
            source=self.node,
            destination=dest,
            size=self.spec.size_for(float(u_size)),
            creation_cycle=cycle,
        )


class TrafficGenerator:
    """All sources of a network; packet ids are assigned in node order."""

    def __init__(self, spec: TrafficSpec, nodes: int):
        self.spec = spec
        self.sources = [TrafficSource(spec, node, nodes) for node in range(nodes)]
        self._ids = count()

    def next_injections(self, cycle: int) -> List[PacketDescriptor]:
        if self.spec.injection_rate <= 0.0:
            return []
        packets = []
        for source in self.sources:
            packet = source.next_injection(cycle, self._ids)
            if packet is not None:
                packets.append(packet)
        return packets

    def take_id(self) -> int:
        """Reserve an id for a scripted packet."""
        return next(self._ids)


def next_injections(spec: TrafficSpec, node: int, cycle: int, source: TrafficSource,
                    packet_ids: Iterator[int]) -> Optional[PacketDescriptor]:
    """One Bernoulli trial of `node`'s source at `cycle`."""
    if source.node != node:
        raise ValueError(f"source of node {source.node} used for node {node}")
    return source.next_injection(cycle, packet_ids)


def zero_load_latency(shape: NetworkShape, spec: TrafficSpec) -> float:
    """
    Mean latency of an idle network for this traffic: every transit hop
    bypassed, serialization of the mean packet size on top.
    """
    nodes = shape.nodes
    if nodes < 2:
        return float(BASE_LATENCY)
    serialization = spec.mean_packet_size - 1.0
    distance = np.array(
        [[hops(shape, s, d) for d in range(nodes)] for s in range(nodes)],
        dtype=np.float64,
    )
    off_diagonal = ~np.eye(nodes, dtype=bool)
    uniform_hops = distance[off_diagonal].mean()

    if spec.pattern.permutation:
        pairs = [(s, spec.destination(s, nodes, 0.0, 1.0)) for s in range(nodes)]
        moving = [distance[s, d] for s, d in pairs if d is not None]
        mean_hops = float(np.mean(moving)) if moving else 0.0
    elif spec.pattern is TrafficPattern.HOTSPOT:
        per_source = []
        for s in range(nodes):
            targets = [n for n in spec.hotspot_nodes if n < nodes and n != s]
            others = distance[s][off_diagonal[s]].mean()
            if targets:
                hot = distance[s, targets].mean()
                per_source.append(spec.hotspot_fraction * hot + (1 - spec.hotspot_fraction) * others)
            else:
                per_source.append(others)
        mean_hops = float(np.mean(per_source))
    else:
        mean_hops = float(uniform_hops)
    return BASE_LATENCY + HOP_LATENCY * mean_hops + serialization
