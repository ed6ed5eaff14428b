"""Refinement sweeps estimating the norm of f ↦ 1_{t≥0}·f over grids of (s, p, γ, N).

Each cell of a sweep is the largest ratio ‖1_{t≥0} f‖ / ‖f‖ over a family of test
functions. Cells are independent and run as asyncio tasks on a process pool; rows are
sorted canonically before they are emitted, so the output does not depend on the worker
count.
"""
from __future__ import annotations

import asyncio
import csv
import io
import json
import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from lpmult import _utils
from lpmult.dyadic import DyadicFamily, build_family
from lpmult.exceptions import ParameterError
from lpmult.grid import FamilyKind, GridSpec, SampledField, sample_family
from lpmult.lptyping import JSONDict
from lpmult.multiplier import (
    Stability,
    admissible_range,
    classify_slope,
    growth_slope,
    multiplier_ratio,
)
from lpmult.norms import SpaceKind, SpaceSpec
from lpmult.weights import in_ap

_logger = logging.getLogger(__name__)

LADDER = "ladder"
"""The scale ladder: bumps of width 2^{−j} on the hyperplane, lifted for s < 0."""

CSV_HEADER = ("s", "p", "gamma", "N", "family", "space", "ratio", "admissible")
MULTIPLIER_SPACES = (SpaceKind.BESSEL, SpaceKind.BESOV, SpaceKind.TRIEBEL_LIZORKIN)


@dataclass(frozen=True)
class SweepConfig:
    s_values: Tuple[float, ...]
    p_values: Tuple[float, ...] = (2.0,)
    gamma_values: Tuple[float, ...] = (0.0,)
    Ns: Tuple[int, ...] = (256, 512, 1024, 2048)
    families: Tuple[str, ...] = (LADDER,)
    spaces: Tuple[str, ...] = ("H",)
    d: int = 1
    L: float = 16.0
    K: Optional[int] = None
    """Dyadic truncation; the largest admissible level of each grid when unset."""

    seed: int = 7
    ladder_depth: int = 3
    """The ladder uses widths 2^{−j} for j = 0, …, ladder_depth."""

    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("s_values", "p_values", "gamma_values", "Ns", "families", "spaces"):
            if len(getattr(self, name)) == 0:
                raise ParameterError(f"{name} must not be empty")
        for p in self.p_values:
            if not 1 < p < np.inf:
                raise ParameterError(f"p must lie in (1, ∞), got {p}")
        for gamma in self.gamma_values:
            if not gamma > -1:
                raise ParameterError(f"weight not locally integrable: gamma={gamma}")
        for label in self.families:
            if label != LADDER:
                FamilyKind.from_label(label)
        if LADDER not in self.families:
            raise ParameterError(f"families must include '{LADDER}', got {', '.join(self.families)}")
        for token in self.spaces:
            if SpaceSpec.from_token(token).kind not in MULTIPLIER_SPACES:
                raise ParameterError(f"sweeps support H, B and F spaces, got '{token}'")
        if self.ladder_depth < 0:
            raise ParameterError(f"ladder depth must be nonnegative, got {self.ladder_depth}")
        if self.workers < 1:
            raise ParameterError(f"workers must be positive, got {self.workers}")
        for N in self.Ns:
            GridSpec(self.d, self.L, N)

    def cells(self) -> List[SweepCell]:
        return [
            SweepCell(
                s, p, gamma, N, family, space, self.d, self.L, self.K, self.seed, self.ladder_depth
            )
            for s in self.s_values
            for p in self.p_values
            for gamma in self.gamma_values
            for N in self.Ns
            for family in self.families
            for space in self.spaces
        ]


@dataclass(frozen=True)
class SweepCell:
    s: float
    p: float
    gamma: float
    N: int
    family: str
    space: str
    d: int
    L: float
    K: Optional[int]
    seed: int
    ladder_depth: int


@dataclass(frozen=True, order=True)
class SweepRow:
    s: float
    p: float
    gamma: float
    N: int
    family: str
    space: str
    ratio: float = field(compare=False)
    admissible: bool = field(compare=False)

    def to_dict(self) -> JSONDict:
        return asdict(self)


@dataclass
class SweepReport:
    rows: List[SweepRow]
    seed: int
    d: int
    L: float
    K: Optional[int]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(
                [
                    repr(row.s),
                    repr(row.p),
                    repr(row.gamma),
                    row.N,
                    row.family,
                    row.space,
                    repr(row.ratio),
                    str(row.admissible).lower(),
                ]
            )
        return buffer.getvalue()

    def to_json(self) -> str:
        return json.dumps([row.to_dict() for row in self.rows], indent=2) + "\n"

    def series(self) -> Dict[Tuple[float, float, float, str, str], List[SweepRow]]:
        """Rows grouped by (s, p, γ, family, space), each group ordered by N."""
        groups: Dict[Tuple[float, float, float, str, str], List[SweepRow]] = {}
        for row in self.rows:
            groups.setdefault((row.s, row.p, row.gamma, row.family, row.space), []).append(row)
        return groups


@lru_cache(maxsize=16)
def _family(grid: GridSpec, K: Optional[int]) -> DyadicFamily:
    return build_family(grid, K)


def family_members(
    label: str, s: float, grid: GridSpec, seed: int, ladder_depth: int
) -> List[SampledField]:
    """Test functions of one family.

    The ladder gives ladder_depth + 1 members of shrinking width. Any other family
    contributes a single member sampled at its default parameters.
    """
    if label != LADDER:
        return [sample_family(label, None, grid, seed)]
    if s >= 0:
        return [
            sample_family(FamilyKind.CONCENTRATED_NEAR_HYPERPLANE, {"scale": 2.0**-j}, grid)
            for j in range(ladder_depth + 1)
        ]
    return [
        sample_family(FamilyKind.DUAL_JUMP, {"scale": 2.0**-j, "order": -2.0 * s}, grid)
        for j in range(ladder_depth + 1)
    ]


def is_admissible(s: float, p: float, gamma: float) -> bool:
    if not in_ap(p, gamma):
        return False
    return admissible_range(p, gamma).contains(s)


def evaluate_cell(cell: SweepCell) -> SweepRow:
    """Largest multiplier ratio over the family of one sweep cell."""
    grid = GridSpec(cell.d, cell.L, cell.N)
    fam = _family(grid, cell.K)
    space = SpaceSpec.from_token(cell.space, cell.s, cell.p, cell.gamma)
    m = sample_family(FamilyKind.INDICATOR_HALFSPACE, None, grid)
    members = family_members(cell.family, cell.s, grid, cell.seed, cell.ladder_depth)
    ratio = max(multiplier_ratio(m, f, space, fam) for f in members)
    return SweepRow(
        cell.s,
        cell.p,
        cell.gamma,
        cell.N,
        cell.family,
        cell.space,
        float(ratio),
        is_admissible(cell.s, cell.p, cell.gamma),
    )


async def _evaluate_in(executor: Executor, cell: SweepCell) -> SweepRow:
    loop = asyncio.get_running_loop()
    return await loop.run_in_executor(executor, evaluate_cell, cell)


async def run_sweep(config: SweepConfig) -> SweepReport:
    cells = config.cells()
    _logger.info(f"Running {len(cells)} sweep cells on {config.workers} worker(s)")
    if config.workers == 1:
        rows = [evaluate_cell(cell) for cell in cells]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            tasks = [
                _utils.create_task(_evaluate_in(executor, cell), name=f"cell-{i}")
                for i, cell in enumerate(cells)
            ]
            rows = list(await asyncio.gather(*tasks))
    rows.sort()
    _logger.info(f"Sweep finished with {len(rows)} rows")
    return SweepReport(rows, config.seed, config.d, config.L, config.K)


def operator_norm_sweep(config: SweepConfig) -> SweepReport:
    """Run a sweep to completion from synchronous code."""
    return asyncio.run(run_sweep(config))


@dataclass(frozen=True)
class StabilityRow:
    s: float
    p: float
    gamma: float
    family: str
    space: str
    slope: float
    stability: Optional[Stability]
    """`None` when s sits exactly on the boundary of the admissible range."""

    admissible: bool


def classify_sweep(report: SweepReport, *, finest_pair: bool = False) -> List[StabilityRow]:
    """Refinement slope and stability class of every (s, p, γ, family, space) series.

    With `finest_pair` the slope uses only the two largest N.
    """
    out = []
    for (s, p, gamma, family, space), rows in sorted(report.series().items()):
        series = rows[-2:] if finest_pair else rows
        slope = growth_slope([r.N for r in series], [r.ratio for r in series])
        on_boundary = in_ap(p, gamma) and any(
            np.isclose(s, edge, rtol=0.0, atol=1e-12)
            for edge in (admissible_range(p, gamma).s_lo, admissible_range(p, gamma).s_hi)
        )
        stability = None if on_boundary else classify_slope(slope)
        out.append(StabilityRow(s, p, gamma, family, space, slope, stability, rows[0].admissible))
    return out


def stability_boundary(
    p: float,
    gamma: float,
    s_values: Sequence[float],
    Ns: Sequence[int] = (256, 512, 1024, 2048),
    *,
    space: str = "H",
    L: float = 16.0,
    ladder_depth: int = 3,
    workers: int = 1,
) -> Optional[float]:
    """Largest s of the ascending grid up to which every s is classified STABLE."""
    config = SweepConfig(
        tuple(sorted(s_values)),
        (p,),
        (gamma,),
        tuple(Ns),
        spaces=(space,),
        L=L,
        ladder_depth=ladder_depth,
        workers=workers,
    )
    boundary = None
    for row in classify_sweep(operator_norm_sweep(config)):
        if row.stability is not Stability.STABLE:
            break
        boundary = row.s
    _logger.info(f"Stability boundary for p={p}, gamma={gamma}: {boundary}")
    return boundary
