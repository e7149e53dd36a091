"""
NEBBSIM Engine - Scripted scenarios.

- figure6_scenario: the switch-allocator deadlock on a 3-router ring with
  FBFC-L. Every router holds the tail of a packet whose head already moved
  on, and that tail waits for a downstream VC filled by packets queued
  behind the next router's tail. If the SA input arbiter keeps favouring the
  tail's VC until it advances, nothing ever moves; demoting it on a stall
  lets the other VC through and the ring drains.
- split_bypass_scenario: a multi-flit packet offered a WH bypass of an idle
  VC that still holds another packet. Safe NEBB-WH buffers it; the unsafe
  test hook bypasses it and the packet ends up interleaved.
- zero_load_probe: latency of one packet through an idle network.
"""

from typing import Callable, Dict, List, Tuple

from nebbsim.core.errors import ConfigurationError
from nebbsim.core.flit import Flit, PacketDescriptor, segment_packet
from nebbsim.core.mechanism import Mechanism
from nebbsim.core.ports import Direction
from nebbsim.engine.config import SimConfig
from nebbsim.engine.network import Network
from nebbsim.engine.simulation import Scenario, ScriptedPacket, simulate
from nebbsim.router.arbiters import SaInputMode
from nebbsim.router.buffers import BufferKind, BufferOrganization
from nebbsim.router.flow_control import DeadlockRule
from nebbsim.topology.shape import TopologyKind

FIGURE6_CYCLES = 3000

# name -> (source node, destination node)
FIGURE6_PACKETS: Dict[str, Tuple[int, int]] = {
    "A": (0, 2), "B": (0, 2),
    "C": (1, 0), "D": (1, 0), "G": (1, 0),
    "E": (2, 1), "F": (2, 1),
}

# Input VC contents at the X- port of each router, front first, as
# (packet, flit index). VC0 holds the tail of a packet that owns VC1 of the
# next router.
FIGURE6_QUEUES: Dict[int, Tuple[List[Tuple[str, int]], List[Tuple[str, int]]]] = {
    0: ([("F", 1), ("D", 0), ("D", 1)], [("E", 0), ("E", 1), ("G", 0)]),
    1: ([("A", 1)], [("B", 0), ("B", 1), ("F", 0)]),
    2: ([("G", 1)], [("C", 0), ("C", 1), ("A", 0)]),
}


def figure6_config(sa_mode: SaInputMode = SaInputMode.DEMOTE_ON_STALL) -> SimConfig:
    return SimConfig(
        topology=TopologyKind.RING,
        k=3,
        concentration=1,
        mechanism=Mechanism.NEBB_HYBRID,
        vcs=2,
        buffer=BufferOrganization(BufferKind.PRIVATE, 3),
        packet_sizes=(2,),
        load=0.0,
        cycles=FIGURE6_CYCLES,
        warmup_fraction=0.0,
        deadlock_rule=DeadlockRule.FBFC_L,
        sa_input_mode=sa_mode,
    )


def _install_figure6(network: Network, take_id: Callable[[], int]) -> None:
    flits: Dict[str, List[Flit]] = {}
    for name, (source, destination) in FIGURE6_PACKETS.items():
        packet = PacketDescriptor(take_id(), source, destination, 2, 0)
        flits[name] = segment_packet(packet)
        network.metrics.record_generation(packet)

    in_port = Direction.X_MINUS.value
    out_port = Direction.X_PLUS.value
    for router_id, (vc0, vc1) in FIGURE6_QUEUES.items():
        router = network.routers[router_id]
        buf = router.inputs[in_port]
        for vc, contents in enumerate((vc0, vc1)):
            for name, index in contents:
                buf.queues[vc].append(flits[name][index])
        tail_owner = flits[vc0[0][0]][0].packet
        buf.vc_states[0].activate(tail_owner, out_port, 1)
        router.out_owner[out_port][1] = tail_owner.id
        router.sa_inputs[in_port].held_vc = 0

    network.flits_injected += sum(len(f) for f in flits.values())
    network.sync_credit_views()


def figure6_scenario(sa_mode: SaInputMode = SaInputMode.DEMOTE_ON_STALL) -> Scenario:
    """The ring deadlock, run under the given SA input arbiter policy."""
    return Scenario(
        name=f"fig6-{sa_mode.value}",
        config=figure6_config(sa_mode),
        installer=_install_figure6,
        description="3-router ring, FBFC-L, 2-flit packets A..G queued behind held VCs",
    )


SPLIT_BYPASS_CYCLES = 80


def split_bypass_config(unsafe: bool) -> SimConfig:
    return SimConfig(
        topology=TopologyKind.MESH,
        k=4,
        concentration=1,
        mechanism=Mechanism.NEBB_WH,
        vcs=2,
        buffer=BufferOrganization(BufferKind.PRIVATE, 2),
        packet_sizes=(1, 5),
        load=0.0,
        cycles=SPLIT_BYPASS_CYCLES,
        warmup_fraction=0.0,
        check=True,
        unsafe_multiflit_bypass=unsafe,
    )


def _install_split_bypass(network: Network, take_id: Callable[[], int]) -> None:
    # Row y=0 of a 4x4 mesh: R0 -> R1 -> R2 -> R3. Q sits idle in R1's X- vc0
    # and Z in R2's X- vc0; both wait for outputs whose VCs are held by
    # packets outside the row, so neither ever moves.
    x_plus, x_minus, y_plus = Direction.X_PLUS.value, Direction.X_MINUS.value, Direction.Y_PLUS.value
    holder = take_id()
    queued = {
        1: PacketDescriptor(take_id(), 0, 5, 1, 0),  # Q: turns north at R1
        2: PacketDescriptor(take_id(), 1, 3, 1, 0),  # Z: continues east at R2
    }
    for router_id, packet in queued.items():
        network.routers[router_id].inputs[x_minus].queues[0].extend(segment_packet(packet))
        network.metrics.record_generation(packet)
    network.routers[1].out_owner[y_plus] = [holder, holder]
    network.routers[2].out_owner[x_plus] = [holder, holder]
    # The 5-flit packet from node 0 to node 3 can only use vc0 on its way east.
    network.routers[0].out_owner[x_plus][1] = holder
    network.routers[1].out_owner[x_plus][1] = holder
    network.flits_injected += len(queued)
    network.sync_credit_views()


def split_bypass_scenario(unsafe: bool = True) -> Scenario:
    """
    A 5-flit packet crossing R1 whose vc0 is idle but holds another packet.

    NEBB-WH must buffer it behind that packet. With the unsafe hook the head
    bypasses anyway; the body then finds no credit at R1's output (the head
    is stuck at R2) and is written behind the foreign packet, splitting the
    packet across two routers.
    """
    return Scenario(
        name=f"split-bypass-{'unsafe' if unsafe else 'safe'}",
        config=split_bypass_config(unsafe),
        injections=[ScriptedPacket(0, 0, 3, 5)],
        installer=_install_split_bypass,
        description="4x4 mesh row, NEBB-WH, multi-flit head offered a bypass of an idle non-empty VC",
    )


def zero_load_probe(config: SimConfig, source: int, destination: int, size: int = 1) -> Tuple[int, Dict[str, int]]:
    """
    Inject one packet into an idle network.

    Returns its latency and the hop counts of the run (injection, buffered,
    bypassed WH, bypassed VCT).
    """
    probe = config.with_overrides(load=0.0, warmup_fraction=0.0, check=True)
    scenario = Scenario(
        name="zero-load",
        config=probe,
        injections=[ScriptedPacket(0, source, destination, size)],
    )
    report, network = simulate(probe, scenario)
    if report.aborted or not network.completions:
        details = "; ".join(str(v) for v in report.violations) or "packet never delivered"
        raise ConfigurationError(f"zero-load probe {source}->{destination} failed: {details}")
    (latency,) = network.completions.values()
    hops = {
        "injection": report.injection_hops,
        "buffered": report.buffered_hops,
        "bypassed_wh": report.bypassed_wh,
        "bypassed_vct": report.bypassed_vct,
    }
    return latency, hops

