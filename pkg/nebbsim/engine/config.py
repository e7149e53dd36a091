"""
NEBBSIM Engine - Simulation configuration.

SimConfig carries every knob of a run. It can be built from keyword
arguments, from a flat `key = value` file, or from a string mapping (CLI
flags), and is validated as a whole before cycle 0:

    config = SimConfig.from_mapping(load_config_file("torus.cfg"))
    config = config.with_overrides(load="0.08", mechanism="NEBB-WH")
    config.validate()
"""

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Union

from nebbsim.analysis.metrics import Phases
from nebbsim.core.errors import ConfigurationError
from nebbsim.core.mechanism import Mechanism
from nebbsim.diagnostics.watchdog import DEFAULT_AGE_LIMIT, DEFAULT_HORIZON
from nebbsim.router.arbiters import SaInputMode
from nebbsim.router.buffers import BufferOrganization, BufferKind
from nebbsim.router.flow_control import DeadlockRule
from nebbsim.router.pipeline import LaPriorityMode, RouterParams
from nebbsim.topology.shape import NetworkShape, NodeMap, TopologyKind
from nebbsim.traffic.patterns import TrafficPattern, TrafficSpec, permutation_destination


# =============================================================================
# VALUE PARSERS
# =============================================================================

def parse_bool(text: str) -> bool:
    wanted = text.strip().lower()
    if wanted in ("true", "1", "yes", "on"):
        return True
    if wanted in ("false", "0", "no", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {text!r}")


def parse_int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ConfigurationError(f"expected an integer, got {text!r}") from None


def parse_float(text: str) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise ConfigurationError(f"expected a number, got {text!r}") from None


def parse_optional_int(text: str) -> Optional[int]:
    if text.strip().lower() in ("off", "none", ""):
        return None
    return parse_int(text)


def parse_sizes(text: str) -> Tuple[int, ...]:
    return tuple(parse_int(part) for part in text.split(",") if part.strip())


def parse_deadlock_rule(text: str) -> Optional[DeadlockRule]:
    """`auto` (None) picks the rule from topology and mechanism."""
    if text.strip().lower() == "auto":
        return None
    return DeadlockRule.parse(text)


def parse_optional_str(text: str) -> Optional[str]:
    return text.strip() or None


_PARSERS: Dict[str, Callable[[str], Any]] = {
    "topology": TopologyKind.parse,
    "k": parse_int,
    "concentration": parse_int,
    "node_map": NodeMap.parse,
    "mechanism": Mechanism.parse,
    "vcs": parse_int,
    "buffer": BufferOrganization.parse,
    "link_latency": parse_int,
    "channel_width": parse_int,
    "packet_sizes": parse_sizes,
    "single_flit_ratio": parse_float,
    "pattern": TrafficPattern.parse,
    "hotspot_fraction": parse_float,
    "load": parse_float,
    "cycles": parse_int,
    "warmup_fraction": parse_float,
    "drain_cycles": parse_int,
    "seed": parse_int,
    "deadlock_rule": parse_deadlock_rule,
    "la_priority": LaPriorityMode.parse,
    "la_threshold": parse_optional_int,
    "sa_input_mode": SaInputMode.parse,
    "check": parse_bool,
    "watchdog_horizon": parse_int,
    "age_warning": parse_optional_int,
    "unsafe_multiflit_bypass": parse_bool,
    "out": parse_optional_str,
}


# =============================================================================
# CONFIG
# =============================================================================

@dataclass(frozen=True)
class SimConfig:
    """
    One simulation run.

    Attributes:
        concentration: Nodes per router (c)
        buffer: Input buffer organization per port (shared DAMQ or private)
        channel_width: Bits per flit; informational, flits are the unit
        load: Offered load in flits/node/cycle
        cycles: Length of warmup plus measurement
        deadlock_rule: None selects the rule for the topology ("auto")
        la_threshold: Cycles a buffered head waits before it beats lookaheads
        age_warning: Cycles a packet may wait before the watchdog warns; None disables
        unsafe_multiflit_bypass: Test hook; NEBB-WH ignores VC occupancy
    """
    topology: TopologyKind = TopologyKind.MESH
    k: int = 8
    concentration: int = 4
    node_map: NodeMap = NodeMap.BLOCK
    mechanism: Mechanism = Mechanism.NEBB_HYBRID
    vcs: int = 2
    buffer: BufferOrganization = BufferOrganization(BufferKind.SHARED, 12)
    link_latency: int = 1
    channel_width: int = 128
    packet_sizes: Tuple[int, ...] = (1, 5)
    single_flit_ratio: float = 0.8
    pattern: TrafficPattern = TrafficPattern.UNIFORM
    hotspot_fraction: float = 0.25
    load: float = 0.05
    cycles: int = 50_000
    warmup_fraction: float = 0.2
    drain_cycles: int = 0
    seed: int = 1
    deadlock_rule: Optional[DeadlockRule] = None
    la_priority: LaPriorityMode = LaPriorityMode.LOOKAHEADS
    la_threshold: Optional[int] = None
    sa_input_mode: SaInputMode = SaInputMode.DEMOTE_ON_STALL
    check: bool = False
    watchdog_horizon: int = DEFAULT_HORIZON
    age_warning: Optional[int] = DEFAULT_AGE_LIMIT
    unsafe_multiflit_bypass: bool = False
    out: Optional[str] = None

    # ═══ construction ════════════════════════════════════════════════════

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "SimConfig":
        return cls().with_overrides(**mapping)

    def with_overrides(self, **overrides: Any) -> "SimConfig":
        """Copy with some fields replaced; string values are parsed."""
        changes = {}
        for raw_key, value in overrides.items():
            key = raw_key.replace("-", "_")
            if key not in _PARSERS:
                raise ConfigurationError(f"unknown configuration key {raw_key!r}")
            if isinstance(value, str):
                try:
                    value = _PARSERS[key](value)
                except ConfigurationError as exc:
                    raise ConfigurationError(f"{key}: {exc}") from None
            changes[key] = value
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "deadlock_rule":
                value = "auto" if value is None else value.value
            elif f.name == "packet_sizes":
                value = ",".join(str(s) for s in value)
            elif f.name == "buffer":
                value = str(value)
            elif hasattr(value, "value"):
                value = value.value
            result[f.name] = value
        return result

    # ═══ derived views ═══════════════════════════════════════════════════

    @property
    def shape(self) -> NetworkShape:
        return NetworkShape(self.topology, self.k, self.concentration, self.node_map)

    @property
    def traffic(self) -> TrafficSpec:
        return TrafficSpec(
            pattern=self.pattern,
            injection_rate=self.load,
            packet_sizes=self.packet_sizes,
            single_flit_ratio=self.single_flit_ratio,
            hotspot_fraction=self.hotspot_fraction,
            seed=self.seed,
        )

    @property
    def max_packet_size(self) -> int:
        return max(self.packet_sizes)

    @property
    def resolved_deadlock_rule(self) -> DeadlockRule:
        return resolve_deadlock_rule(self)

    @property
    def phases(self) -> Phases:
        return Phases.from_run(self.cycles, self.warmup_fraction, self.drain_cycles)

    def router_params(self) -> RouterParams:
        return RouterParams(
            mechanism=self.mechanism,
            vc_count=self.vcs,
            buffer=self.buffer,
            deadlock_rule=self.resolved_deadlock_rule,
            la_priority=self.la_priority,
            la_threshold=self.la_threshold,
            sa_mode=self.sa_input_mode,
            max_packet_size=self.max_packet_size,
            unsafe_multiflit_bypass=self.unsafe_multiflit_bypass,
        )

    # ═══ validation ══════════════════════════════════════════════════════

    def validate(self) -> "SimConfig":
        """Raise ConfigurationError on any invalid or incompatible option."""
        shape = self.shape  # k, concentration, node map
        traffic = self.traffic  # load, sizes, ratios
        if self.vcs < 1:
            raise ConfigurationError(f"vcs must be >= 1, got {self.vcs}")
        if self.buffer.shared and self.buffer.slots < self.vcs:
            raise ConfigurationError(
                f"shared buffer of {self.buffer.slots} slots cannot give each of {self.vcs} VCs a slot")
        if self.link_latency != 1:
            raise ConfigurationError(f"only 1-cycle links are modelled, got link_latency={self.link_latency}")
        if self.cycles < 1:
            raise ConfigurationError(f"cycles must be >= 1, got {self.cycles}")
        if not 0.0 <= self.warmup_fraction < 1.0:
            raise ConfigurationError(f"warmup fraction must be in [0, 1), got {self.warmup_fraction}")
        if self.drain_cycles < 0:
            raise ConfigurationError(f"drain cycles must be >= 0, got {self.drain_cycles}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be >= 0, got {self.seed}")
        if self.watchdog_horizon < 1:
            raise ConfigurationError(f"watchdog horizon must be >= 1, got {self.watchdog_horizon}")
        if self.age_warning is not None and self.age_warning < 1:
            raise ConfigurationError(f"age warning must be >= 1 or off, got {self.age_warning}")
        if self.la_threshold is not None and self.la_threshold < 0:
            raise ConfigurationError(f"lookahead threshold must be >= 0, got {self.la_threshold}")

        rule = self.resolved_deadlock_rule
        mech = self.mechanism
        if mech.empty_vc and rule is DeadlockRule.FBFC_L:
            raise ConfigurationError(f"{mech.value} cannot be combined with FBFC-L (FBFC needs non-empty VCs)")
        if not shape.wraps and rule is not DeadlockRule.NONE:
            raise ConfigurationError(f"deadlock rule {rule.value} only applies to rings and tori, not a mesh")
        if rule is DeadlockRule.DATELINE and self.vcs < 2:
            raise ConfigurationError("dateline needs at least 2 VCs")
        if shape.wraps and mech is Mechanism.NEBB_VCT and rule is not DeadlockRule.BUBBLE:
            raise ConfigurationError(f"NEBB-VCT on a {shape.kind.value} relies on bubble flow control, got {rule.value}")

        capacity = self.buffer.vc_capacity(self.vcs)
        largest = traffic.max_packet_size
        if rule is DeadlockRule.FBFC_L and capacity < largest + 1:
            raise ConfigurationError(
                f"FBFC-L needs {largest + 1} slots per VC for {largest}-flit packets, buffer gives {capacity}")
        if rule is DeadlockRule.BUBBLE and capacity < 2 * largest:
            raise ConfigurationError(
                f"bubble flow control needs {2 * largest} slots per VC, buffer gives {capacity}")
        if mech.cut_through and capacity < largest:
            raise ConfigurationError(
                f"{mech.value} cannot forward {largest}-flit packets with {capacity} slots per VC")

        if self.pattern.permutation:
            permutation_destination(self.pattern, 0, shape.nodes)
        return self


def resolve_deadlock_rule(config: SimConfig) -> DeadlockRule:
    """Explicit rule, or the default of the topology and mechanism."""
    if config.deadlock_rule is not None:
        return config.deadlock_rule
    if config.topology is TopologyKind.MESH:
        return DeadlockRule.NONE
    if config.mechanism.empty_vc:
        return DeadlockRule.DATELINE
    if config.mechanism.cut_through:
        return DeadlockRule.BUBBLE
    return DeadlockRule.FBFC_L


# =============================================================================
# FILES
# =============================================================================

def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read a flat configuration file.

        # 8x8 torus, bimodal traffic
        topology = torus
        packet_sizes = 1,5
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}:{number}: expected key = value, got {raw.strip()!r}")
        key = key.strip().replace("-", "_")
        if key not in _PARSERS:
            raise ConfigurationError(f"{path}:{number}: unknown configuration key {key!r}")
        values[key] = value.strip()
    return values
