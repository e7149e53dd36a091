"""
NEBBSIM Engine - Running a simulation.

    report = run(SimConfig(load=0.06))
    report, network = simulate(config, scenario)

A run is a pure function of its configuration (and scenario): traffic comes
from per-node PCG64 streams seeded by the config, routers are stepped in
index order, and the log digest covers every entry recorded.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from nebbsim.analysis.metrics import MetricsCollector, SimReport, finalize
from nebbsim.core.errors import InvariantViolation
from nebbsim.core.flit import PacketDescriptor
from nebbsim.diagnostics.invariants import check_invariants
from nebbsim.diagnostics.report import ViolationLog, ViolationRecord
from nebbsim.diagnostics.watchdog import DeadlockWatchdog, watchdog
from nebbsim.engine.config import SimConfig
from nebbsim.engine.network import Network
from nebbsim.logging import get_log_manager, get_logger
from nebbsim.traffic.source import RNG_ALGORITHM, TrafficGenerator, zero_load_latency


@dataclass(frozen=True)
class ScriptedPacket:
    """A packet injected at a fixed cycle, outside the random traffic."""
    cycle: int
    source: int
    destination: int
    size: int


@dataclass
class Scenario:
    """
    A configuration plus scripted traffic.

    installer(network, take_id) may place packets directly into router
    buffers before cycle 0; take_id hands out packet ids that do not clash
    with generated traffic.
    """
    name: str
    config: SimConfig
    injections: List[ScriptedPacket] = field(default_factory=list)
    installer: Optional[Callable[[Network, Callable[[], int]], None]] = None
    description: str = ""


def _abort(violations: ViolationLog, record: ViolationRecord) -> None:
    if violations.add(record):
        get_logger("engine").critical("invariant_violation", record.cycle, kind=record.kind.value,
                                      router=record.router, detail=record.detail)


def simulate(config: SimConfig, scenario: Optional[Scenario] = None) -> Tuple[SimReport, Network]:
    """Run to completion; returns the report and the final network state."""
    config.validate()
    manager = get_log_manager()
    manager.begin_session()
    log = get_logger("engine")

    shape = config.shape
    traffic = config.traffic
    phases = config.phases
    metrics = MetricsCollector(phases, shape.nodes, shape.routers)
    network = Network(shape, config.router_params(), metrics)
    generator = TrafficGenerator(traffic, shape.nodes)
    scripted = sorted(scenario.injections, key=lambda p: p.cycle) if scenario else []
    if scenario is not None and scenario.installer is not None:
        scenario.installer(network, generator.take_id)

    log.info("run_start", 0, mechanism=config.mechanism.value, topology=shape.describe(),
             load=config.load, seed=config.seed, deadlock_rule=config.resolved_deadlock_rule.value,
             scenario=scenario.name if scenario else None)

    violations = ViolationLog()
    dog = DeadlockWatchdog(config.watchdog_horizon, age_limit=config.age_warning)
    aborted = False
    try:
        while network.cycle < phases.drain_end:
            cycle = network.cycle
            if cycle >= phases.measure_end and network.idle:
                break
            if traffic.injection_rate == 0.0 and not scripted and network.idle:
                break
            if cycle < phases.measure_end:
                for packet in generator.next_injections(cycle):
                    network.inject(packet)
            while scripted and scripted[0].cycle <= cycle:
                item = scripted.pop(0)
                network.inject(PacketDescriptor(generator.take_id(), item.source, item.destination,
                                                item.size, cycle))

            traversals = network.step()

            if config.check:
                records = check_invariants(network, cycle)
                if records:
                    for record in records:
                        _abort(violations, record)
                    aborted = True
                    break
            in_flight = network.flits_injected - network.flits_ejected
            record = watchdog(cycle, traversals, in_flight, dog, network.routers)
            if record is not None:
                _abort(violations, record)
                aborted = True
                break
    except InvariantViolation as violation:
        violation.stamp(network.cycle, None)
        _abort(violations, violation.to_record())
        aborted = True

    report = finalize(metrics, config.mechanism.value, config.load, config.seed,
                      zero_load_latency(shape, traffic))
    report.rng = RNG_ALGORITHM
    report.aborted = aborted
    report.violations = list(violations.records)
    log.info("run_end", network.cycle, packets=report.packets_measured, aborted=aborted,
             violations=len(violations.records))
    report.log_digest = manager.session_digest()
    return report, network


def run(config: SimConfig, scenario: Optional[Scenario] = None) -> SimReport:
    """One simulation; violations end the run and are returned in the report."""
    report, _ = simulate(config, scenario)
    return report
