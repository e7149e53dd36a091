"""
NEBBSIM CLI - Command-line front end.

    nebbsim --mechanism NEBB-Hybrid --load 0.06
    nebbsim --topology torus --mechanism WH-Baseline,NEBB-Hybrid --load 0.02,0.04,0.06 --out sweep.csv
    nebbsim --scenario fig6
    nebbsim --scenario split-bypass
    nebbsim --scenario zero-load --k 4 --concentration 1 --src 0 --dst 15

Exit status: 0 success, 1 invariant violation or aborted run, 2 bad configuration.
"""

import argparse
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from rich import box
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from nebbsim.analysis.metrics import SimReport
from nebbsim.core.errors import ConfigurationError
from nebbsim.core.mechanism import Mechanism
from nebbsim.diagnostics.report import ViolationKind
from nebbsim.engine.config import SimConfig, load_config_file, parse_float
from nebbsim.engine.scenarios import figure6_scenario, split_bypass_scenario, zero_load_probe
from nebbsim.engine.simulation import run, simulate
from nebbsim.engine.sweep import sweep
from nebbsim.export.csv_export import export_report_json, export_sweep_csv
from nebbsim.logging import LogConfig, LogLevel, init_logging
from nebbsim.router.arbiters import SaInputMode

console = Console()
err_console = Console(stderr=True)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2

# CLI flag (argparse dest) -> SimConfig key
_FLAG_KEYS = {
    "topology": "topology",
    "k": "k",
    "concentration": "concentration",
    "node_map": "node_map",
    "vcs": "vcs",
    "buffer": "buffer",
    "packet_sizes": "packet_sizes",
    "single_flit_ratio": "single_flit_ratio",
    "pattern": "pattern",
    "hotspot_fraction": "hotspot_fraction",
    "cycles": "cycles",
    "warmup": "warmup_fraction",
    "drain": "drain_cycles",
    "seed": "seed",
    "deadlock_rule": "deadlock_rule",
    "la_priority": "la_priority",
    "la_threshold": "la_threshold",
    "sa_mode": "sa_input_mode",
    "watchdog_horizon": "watchdog_horizon",
    "age_warning": "age_warning",
    "out": "out",
}


# ═══════════════════════════════════════════════════════════════════════════════
# PARSER
# ═══════════════════════════════════════════════════════════════════════════════

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nebbsim",
        description="NEBBSIM - cycle-accurate lookahead bypass NoC simulator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  nebbsim --load 0.06                                   one run, default configuration
  nebbsim --mechanism WH-Baseline,NEBB-Hybrid --load 0.02,0.04,0.06 --out sweep.csv
  nebbsim --topology torus --packet-sizes 1,5 --check   torus run with checkers on
  nebbsim --scenario fig6                               SA deadlock, both arbiter modes
  nebbsim --scenario split-bypass                       multi-flit bypass of a non-empty VC
        """,
    )
    parser.add_argument("--version", "-v", action="store_true", help="Show version")
    parser.add_argument("--config", help="key = value configuration file")

    net = parser.add_argument_group("network")
    net.add_argument("--topology", help="mesh, torus or ring")
    net.add_argument("--k", help="Routers per dimension")
    net.add_argument("--concentration", "-c", help="Nodes per router")
    net.add_argument("--node-map", help="block or grid")
    net.add_argument("--mechanism", "-m", help="Mechanism, or a comma list for a sweep")
    net.add_argument("--vcs", help="Virtual channels per port")
    net.add_argument("--buffer", help="shared:<slots> or private:<slots>")
    net.add_argument("--deadlock-rule", help="auto, none, fbfc, bubble or dateline")
    net.add_argument("--la-priority", help="la or flit")
    net.add_argument("--la-threshold", help="Cycles before a waiting head beats lookaheads, or off")
    net.add_argument("--sa-mode", help="demote or lock")

    traffic = parser.add_argument_group("traffic")
    traffic.add_argument("--load", "-l", help="Offered load, or a comma list for a sweep")
    traffic.add_argument("--packet-sizes", help="1 or 1,5")
    traffic.add_argument("--single-flit-ratio", help="Share of short packets in the bimodal mix")
    traffic.add_argument("--pattern", help="uniform, bitrev, transpose or hotspot")
    traffic.add_argument("--hotspot-fraction", help="Share of hotspot traffic")

    runp = parser.add_argument_group("run")
    runp.add_argument("--cycles", help="Warmup plus measurement cycles")
    runp.add_argument("--warmup", help="Warmup fraction of the cycles")
    runp.add_argument("--drain", help="Extra cycles without injection")
    runp.add_argument("--seed", help="Base seed")
    runp.add_argument("--check", action="store_true", help="Run the invariant checkers every cycle")
    runp.add_argument("--watchdog-horizon", help="Cycles without progress before a deadlock is reported")
    runp.add_argument("--age-warning", help="Cycles a packet may wait before a stall warning, or off")
    runp.add_argument("--unsafe-multiflit-bypass", action="store_true", help=argparse.SUPPRESS)
    runp.add_argument("--jobs", "-j", type=int, default=1, help="Parallel sweep cells")
    runp.add_argument("--scenario", help="fig6, split-bypass or zero-load")
    runp.add_argument("--src", type=int, default=0, help="Zero-load probe source node")
    runp.add_argument("--dst", type=int, default=None, help="Zero-load probe destination node")
    runp.add_argument("--size", type=int, default=1, help="Zero-load probe packet size")

    out = parser.add_argument_group("output")
    out.add_argument("--out", "-o", help="CSV path")
    out.add_argument("--json", help="Write the full report of a single run as JSON")
    out.add_argument("--log-level", default="WARNING", help="CRITICAL .. TRACE")
    out.add_argument("--log-file", help="Append log entries as JSON lines")
    return parser


def _split(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def resolve_config(args: argparse.Namespace) -> Tuple[SimConfig, List[float], List[Mechanism]]:
    """Config file, then flags; loads and mechanisms may be lists."""
    values: Dict[str, str] = load_config_file(args.config) if args.config else {}
    load_text = args.load if args.load is not None else values.pop("load", None)
    mech_text = args.mechanism if args.mechanism is not None else values.pop("mechanism", None)
    values.pop("load", None)
    values.pop("mechanism", None)

    for flag, key in _FLAG_KEYS.items():
        value = getattr(args, flag)
        if value is not None:
            values[key] = str(value)
    if args.check:
        values["check"] = "true"
    if args.unsafe_multiflit_bypass:
        values["unsafe_multiflit_bypass"] = "true"

    config = SimConfig.from_mapping(values)
    loads = [parse_float(x) for x in _split(load_text)] if load_text else [config.load]
    mechanisms = [Mechanism.parse(x) for x in _split(mech_text)] if mech_text else [config.mechanism]
    config = config.with_overrides(load=loads[0], mechanism=mechanisms[0])
    return config, loads, mechanisms


# ═══════════════════════════════════════════════════════════════════════════════
# OUTPUT
# ═══════════════════════════════════════════════════════════════════════════════

def _fmt(value: float) -> str:
    return "-" if value != value else f"{value:.3f}"


def report_table(reports: Sequence[SimReport], title: str) -> Table:
    table = Table(title=title, box=box.ROUNDED)
    table.add_column("Mechanism", style="cyan")
    table.add_column("Load", justify="right")
    table.add_column("Avg lat", justify="right")
    table.add_column("p99", justify="right")
    table.add_column("Throughput", justify="right")
    table.add_column("Buffered", justify="right", style="magenta")
    table.add_column("Byp WH", justify="right")
    table.add_column("Byp VCT", justify="right")
    table.add_column("State", justify="center")
    for r in reports:
        state = "[red]aborted[/]" if r.aborted else ("[yellow]saturated[/]" if r.saturated else "[green]ok[/]")
        table.add_row(
            r.mechanism, f"{r.load:g}", _fmt(r.avg_latency), _fmt(r.p99), f"{r.throughput:.4f}",
            f"{r.buffered_flit_ratio:.3f}", str(r.bypassed_wh), str(r.bypassed_vct), state,
        )
    return table


def print_violations(reports: Sequence[SimReport]) -> None:
    for report in reports:
        for violation in report.violations:
            err_console.print(f"[bold red]VIOLATION[/] {report.mechanism} load={report.load:g}: {escape(str(violation))}",
                              markup=True, highlight=False)


# ═══════════════════════════════════════════════════════════════════════════════
# COMMANDS
# ═══════════════════════════════════════════════════════════════════════════════

def cmd_fig6(args: argparse.Namespace) -> int:
    """Run the ring scenario under both SA input modes."""
    table = Table(title="Switch allocator deadlock on a 3-router ring (FBFC-L)", box=box.ROUNDED)
    table.add_column("SA input mode", style="cyan")
    table.add_column("Packets delivered", justify="right")
    table.add_column("Cycles", justify="right")
    table.add_column("Outcome")
    outcomes = {}
    for mode in (SaInputMode.LOCK_UNTIL_TAIL, SaInputMode.DEMOTE_ON_STALL):
        scenario = figure6_scenario(mode)
        report, network = simulate(scenario.config, scenario)
        deadlocked = any(v.kind is ViolationKind.DEADLOCK for v in report.violations)
        outcomes[mode] = (deadlocked, len(network.completions))
        table.add_row(mode.value, f"{len(network.completions)}/7", str(network.cycle),
                      "[red]deadlock[/]" if deadlocked else "[green]drained[/]")
        if deadlocked and args.log_level.upper() in ("DEBUG", "TRACE"):
            print_violations([report])
    console.print(table)
    reproduced = outcomes[SaInputMode.LOCK_UNTIL_TAIL][0] and outcomes[SaInputMode.DEMOTE_ON_STALL] == (False, 7)
    console.print("[green]dichotomy reproduced[/]" if reproduced else "[red]dichotomy NOT reproduced[/]")
    return EXIT_OK if reproduced else EXIT_VIOLATION


def cmd_split_bypass(args: argparse.Namespace) -> int:
    """Run the non-empty VC bypass scenario with and without the unsafe hook."""
    table = Table(title="Multi-flit WH bypass of a non-empty VC (NEBB-WH)", box=box.ROUNDED)
    table.add_column("Bypass rule", style="cyan")
    table.add_column("Cycles", justify="right")
    table.add_column("Outcome")
    interleaved = {}
    for unsafe in (False, True):
        scenario = split_bypass_scenario(unsafe)
        report, network = simulate(scenario.config, scenario)
        interleaved[unsafe] = any(v.kind is ViolationKind.INTERLEAVING for v in report.violations)
        table.add_row("occupancy ignored" if unsafe else "empty VC only", str(network.cycle),
                      "[red]interleaved[/]" if interleaved[unsafe] else "[green]clean[/]")
        if report.violations and args.log_level.upper() in ("DEBUG", "TRACE"):
            print_violations([report])
    console.print(table)
    reproduced = interleaved[True] and not interleaved[False]
    console.print("[green]interleaving reproduced[/]" if reproduced else "[red]interleaving NOT reproduced[/]")
    return EXIT_OK if reproduced else EXIT_VIOLATION


def cmd_zero_load(args: argparse.Namespace, config: SimConfig) -> int:
    dst = args.dst if args.dst is not None else config.shape.nodes - 1
    latency, hops = zero_load_probe(config, args.src, dst, args.size)
    table = Table(show_header=False, box=box.SIMPLE, padding=(0, 2))
    table.add_column("Key", style="cyan")
    table.add_column("Value", style="green")
    table.add_row("Network", config.shape.describe())
    table.add_row("Mechanism", config.mechanism.value)
    table.add_row("Packet", f"{args.src} -> {dst}, {args.size} flit(s)")
    table.add_row("Latency", f"{latency} cycles")
    for name, count in hops.items():
        table.add_row(f"  {name} hops", str(count))
    console.print(Panel(table, title="[bold cyan]Zero-load probe[/]", border_style="cyan"))
    return EXIT_OK


def cmd_single(args: argparse.Namespace, config: SimConfig) -> int:
    with console.status(f"[cyan]{config.mechanism.value} @ {config.load:g}[/] on {config.shape.describe()}"):
        report = run(config)
    console.print(report_table([report], "Run"))
    console.print(f"[dim]zero-load estimate {_fmt(report.zero_load_latency)} cycles, "
                  f"{report.packets_measured} packets measured, log digest {report.log_digest[:16]}[/]")
    if config.out:
        export_sweep_csv([report], config.out)
    if args.json:
        export_report_json(report, args.json)
    print_violations([report])
    return EXIT_VIOLATION if report.aborted else EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: SimConfig, loads: List[float],
              mechanisms: List[Mechanism]) -> int:
    total = len(loads) * len(mechanisms)
    with Progress(SpinnerColumn(), TextColumn("[progress.description]{task.description}"),
                  BarColumn(), MofNCompleteColumn(), console=console) as progress:
        task = progress.add_task("sweep", total=total)

        def advance(report: SimReport) -> None:
            progress.update(task, advance=1, description=f"{report.mechanism} @ {report.load:g}")

        reports = sweep(config, loads, mechanisms, jobs=args.jobs, progress=advance)
    console.print(report_table(reports, f"Sweep on {config.shape.describe()}"))
    if config.out:
        path = export_sweep_csv(reports, config.out)
        console.print(f"[dim]wrote {path}[/]")
    print_violations(reports)
    return EXIT_VIOLATION if any(r.aborted for r in reports) else EXIT_OK


def cmd_version() -> None:
    from nebbsim import __version__

    console.print(f"[cyan]nebbsim[/] [bold]{__version__}[/]")


# ═══════════════════════════════════════════════════════════════════════════════
# MAIN
# ═══════════════════════════════════════════════════════════════════════════════

def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point."""
    args = build_parser().parse_args(argv)
    if args.version:
        cmd_version()
        return EXIT_OK

    try:
        try:
            level = LogLevel.parse(args.log_level)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None
        init_logging(LogConfig(min_level=level, file_output=args.log_file))
        if args.scenario and args.scenario.lower() in ("fig6", "figure6"):
            return cmd_fig6(args)
        if args.scenario and args.scenario.lower() == "split-bypass":
            return cmd_split_bypass(args)
        config, loads, mechanisms = resolve_config(args)
        if args.scenario:
            if args.scenario.lower() != "zero-load":
                raise ConfigurationError(f"unknown scenario {args.scenario!r} (fig6, split-bypass or zero-load)")
            return cmd_zero_load(args, config)
        if len(loads) == 1 and len(mechanisms) == 1:
            return cmd_single(args, config)
        return cmd_sweep(args, config, loads, mechanisms)
    except ConfigurationError as exc:
        err_console.print(f"[bold red]configuration error:[/] {escape(str(exc))}", markup=True, highlight=False)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
