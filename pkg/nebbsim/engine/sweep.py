"""
NEBBSIM Engine - Load sweeps and saturation search.

A sweep runs every (mechanism, load) cell of a grid. The seed of a cell
depends only on the base seed and the load's position, so mechanisms are
compared on the same traffic. Cells are independent and may run in worker
processes; results are always returned in cell order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from nebbsim.analysis.metrics import SimReport
from nebbsim.core.errors import ConfigurationError
from nebbsim.core.mechanism import Mechanism
from nebbsim.engine.config import SimConfig
from nebbsim.engine.simulation import run
from nebbsim.logging import get_logger


@dataclass(frozen=True)
class SweepCell:
    index: int
    mechanism: Mechanism
    load: float
    config: SimConfig


def cell_seed(base_seed: int, load_index: int) -> int:
    """Seed of the cells at one load position."""
    sequence = np.random.SeedSequence(entropy=base_seed, spawn_key=(load_index,))
    return int(sequence.generate_state(1)[0])


def sweep_cells(base: SimConfig, loads: Sequence[float], mechanisms: Sequence[Mechanism]) -> List[SweepCell]:
    if not loads:
        raise ConfigurationError("a sweep needs at least one load")
    if any(b <= a for a, b in zip(loads, loads[1:])):
        raise ConfigurationError(f"sweep loads must be strictly ascending, got {list(loads)}")
    cells = []
    for mechanism in mechanisms:
        for load_index, load in enumerate(loads):
            config = base.with_overrides(mechanism=mechanism, load=float(load),
                                         seed=cell_seed(base.seed, load_index))
            cells.append(SweepCell(len(cells), mechanism, float(load), config))
    for cell in cells:
        cell.config.validate()
    return cells


def _run_cell(config: SimConfig) -> SimReport:
    return run(config)


def sweep(
    base: SimConfig,
    loads: Sequence[float],
    mechanisms: Sequence[Mechanism],
    jobs: int = 1,
    progress: Optional[Callable[[SimReport], None]] = None,
) -> List[SimReport]:
    """
    Run the grid; saturated and aborted cells are kept and the sweep goes on.

    Returns one report per cell, mechanism-major then by load.
    """
    cells = sweep_cells(base, loads, mechanisms)
    log = get_logger("sweep")
    log.info("sweep_start", cells=len(cells), jobs=jobs)
    configs = [cell.config for cell in cells]
    reports: List[SimReport] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for report in pool.map(_run_cell, configs):
                reports.append(report)
                if progress is not None:
                    progress(report)
    else:
        for config in configs:
            report = _run_cell(config)
            reports.append(report)
            if progress is not None:
                progress(report)
    for report in reports:
        if report.aborted:
            log.warning("cell_aborted", mechanism=report.mechanism, load=report.load,
                        violations=len(report.violations))
    return reports


def find_saturation(
    config: SimConfig,
    loads: Sequence[float],
    progress: Optional[Callable[[SimReport], None]] = None,
) -> Optional[float]:
    """Highest load, scanning upward, before the first saturated or aborted run."""
    best: Optional[float] = None
    for cell in sweep_cells(config, loads, [config.mechanism]):
        report = run(cell.config)
        if progress is not None:
            progress(report)
        if report.saturated or report.aborted:
            break
        best = cell.load
    return best
