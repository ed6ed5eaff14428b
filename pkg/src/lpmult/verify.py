"""Invariant suites run by `lpmult verify`.

Each suite evaluates the defining identities of one part of the package on seeded
fields and returns the checks that exceeded their tolerance. An empty list means the
suite passed.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from enum import Enum, auto
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from lpmult import DEFAULT_L, DEFAULT_SEED
from lpmult.dyadic import DyadicFamily, block, build_family, max_level
from lpmult.exceptions import ParameterError
from lpmult.grid import (
    FamilyKind,
    GridSpec,
    SampledField,
    dft,
    direct_dft,
    idft,
    out_of_band_fraction,
    sample_family,
)
from lpmult.lptyping import JSONDict, LoggerLike, SeedLike
from lpmult.maximal import (
    all_radii_maximal,
    fefferman_stein_check,
    hl_maximal,
    mixed_maximal_check,
)
from lpmult.norms import Randomization, besov_norm, randomized_norm, tl_norm, weight_for
from lpmult.norms.embeddings import embedding_report, standard_pairs
from lpmult.norms.sequence import partial_sum_check
from lpmult.paraproduct import paraproducts, reconstruction_residual, support_audit

_logger = logging.getLogger(__name__)

DFT_TOLERANCE = 1e-9
ROUNDTRIP_TOLERANCE = 1e-10
FAMILY_TOLERANCE = 1e-12
SQUARE_FUNCTION_TOLERANCE = 1e-10
COLLAPSE_TOLERANCE = 1e-12
RECONSTRUCTION_TOLERANCE = 1e-10
REGION_TOLERANCE = 1e-10
DRIFT_TOLERANCE = 0.25


class Suite(Enum):
    GRID = auto()
    DYADIC = auto()
    NORMS = auto()
    PARAPRODUCT = auto()
    MAXIMAL = auto()
    EMBEDDINGS = auto()
    ALL = auto()

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> Suite:
        try:
            return cls[label.strip().upper()]
        except KeyError:
            names = ", ".join(suite.label for suite in cls)
            raise ParameterError(f"unknown suite '{label}', expected one of {names}") from None


@dataclass(frozen=True)
class Failure:
    suite: str
    check: str
    value: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> JSONDict:
        return asdict(self)


class _Recorder:
    def __init__(self, suite: Suite) -> None:
        self.suite = suite
        self.failures: List[Failure] = []

    def at_most(self, check: str, value: float, tolerance: float, detail: str = "") -> None:
        if not value <= tolerance:
            self.failures.append(Failure(self.suite.label, check, float(value), tolerance, detail))

    def fail(self, check: str, value: float, detail: str = "") -> None:
        self.failures.append(Failure(self.suite.label, check, float(value), np.nan, detail))

    def drift(self, check: str, values: Sequence[float], detail: str = "") -> None:
        self.at_most(check, max(values) / min(values) - 1.0, DRIFT_TOLERANCE, detail)


def _random_field(grid: GridSpec, seed: SeedLike) -> SampledField:
    rng = np.random.default_rng(seed)
    shape = grid.shape + (1,)
    return SampledField(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _bandlimited(grid: GridSpec, seed: SeedLike, reach: float = 0.8) -> SampledField:
    params = {"k_lo": 0.0, "k_hi": reach * grid.xi_max}
    return sample_family(FamilyKind.RANDOM_BANDLIMITED, params, grid, seed)


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), np.finfo(np.float64).tiny)


def grid_suite(seed: int, L: float) -> List[Failure]:
    rec = _Recorder(Suite.GRID)
    for d, Ns in ((1, (16, 32, 64)), (2, (8, 16, 32))):
        for N in Ns:
            grid = GridSpec(d, L, N)
            f = _random_field(grid, [seed, d, N])
            spectrum = dft(f)
            detail = f"d={d} N={N}"
            rec.at_most(
                "dft_oracle",
                float(np.max(np.abs(spectrum.values - direct_dft(f).values))),
                DFT_TOLERANCE,
                detail,
            )
            norm = float(np.linalg.norm(f.values))
            back = idft(spectrum).values
            rec.at_most(
                "roundtrip", float(np.linalg.norm(back - f.values)) / norm, ROUNDTRIP_TOLERANCE, detail
            )
            rec.at_most("parseval", _relative(spectrum.energy(), norm**2), ROUNDTRIP_TOLERANCE, detail)
    return rec.failures


def _family_grids(L: float) -> List[GridSpec]:
    # The d = 2 box is shrunk so that its lattice resolves the same levels.
    return [GridSpec(1, L, 1024), GridSpec(2, L / 4, 256)]


def dyadic_suite(seed: int, L: float) -> List[Failure]:
    rec = _Recorder(Suite.DYADIC)
    for grid in _family_grids(L):
        f = _random_field(grid, [seed, grid.d])
        for K in range(min(6, max_level(grid)) + 1):
            fam = DyadicFamily(grid, K)
            detail = f"d={grid.d} N={grid.N} K={K}"
            for name, residual in fam.invariants().items():
                rec.at_most(name, residual, FAMILY_TOLERANCE, detail)
        fam = DyadicFamily(grid, min(6, max_level(grid)))
        for k in range(1, fam.K + 1):
            mass = out_of_band_fraction(block(fam, k, f), 2.0 ** (k - 1), 1.5 * 2.0**k)
            rec.at_most("block_spectrum", mass, FAMILY_TOLERANCE, f"d={grid.d} k={k}")
    return rec.failures


def norms_suite(seed: int, L: float) -> List[Failure]:
    rec = _Recorder(Suite.NORMS)
    grid = GridSpec(1, L, 256)
    fam = build_family(grid)
    for i in range(5):
        f = _bandlimited(grid, [seed, i])
        for s in (-0.5, 0.0, 0.7):
            exact = randomized_norm(f, fam, s, 2.0, mode=Randomization.EXACT_P2)
            rec.at_most(
                "square_function",
                _relative(exact, tl_norm(f, fam, s, 2.0, 2.0)),
                SQUARE_FUNCTION_TOLERANCE,
                f"seed={i} s={s}",
            )
        for p, gamma in ((1.5, 0.0), (3.0, 0.5)):
            w = weight_for(f, gamma)
            rec.at_most(
                "p_equals_q",
                _relative(tl_norm(f, fam, 0.3, p, p, w), besov_norm(f, fam, 0.3, p, p, w)),
                COLLAPSE_TOLERANCE,
                f"seed={i} p={p} gamma={gamma}",
            )
    return rec.failures


def paraproduct_suite(seed: int, L: float) -> List[Failure]:
    rec = _Recorder(Suite.PARAPRODUCT)
    grid = GridSpec(1, L, 256)
    fam = build_family(grid)
    for i in range(10):
        # Factors below half the lattice keep every product free of wrap-around.
        m = _bandlimited(grid, [seed, 2 * i], reach=0.45)
        f = _bandlimited(grid, [seed, 2 * i + 1], reach=0.45)
        for l in range(fam.K + 1):
            triple = paraproducts(m, f, fam, l, retain_terms=i < 3 and l == fam.K)
            rec.at_most(
                "reconstruction",
                reconstruction_residual(triple, m, f, fam),
                RECONSTRUCTION_TOLERANCE,
                f"pair={i} l={l}",
            )
            if triple.terms:
                audit = support_audit(triple, fam)
                rec.at_most("support", audit.worst_region_mass, REGION_TOLERANCE, f"pair={i}")
    return rec.failures


def _gaussians(grid: GridSpec) -> List[SampledField]:
    return [
        sample_family(FamilyKind.GAUSSIAN, {"center": c, "width": width}, grid)
        for c, width in ((-4.0, 0.5), (0.0, 1.0), (3.0, 0.25))
    ]


def maximal_suite(seed: int, L: float) -> List[Failure]:
    rec = _Recorder(Suite.MAXIMAL)
    for d, N in ((1, 64), (1, 128), (2, 32)):
        grid = GridSpec(d, L, N)
        f = _random_field(grid, [seed, d, N])
        ratio = all_radii_maximal(f).value_norm() / hl_maximal(f).value_norm()
        detail = f"d={d} N={N}"
        rec.at_most("oracle_lower", 1.0 - float(np.min(ratio)), 1e-12, detail)
        rec.at_most("oracle_upper", float(np.max(ratio)), 2.0**d * (1 + 1e-12), detail)
    fs = [fefferman_stein_check(_gaussians(GridSpec(1, L, N)), 2.0, 2.0, 0.5) for N in (256, 512, 1024)]
    rec.drift("fefferman_stein", fs, "p=2 q=2 gamma=0.5")
    mixed = [
        mixed_maximal_check(_gaussians(GridSpec(2, L, N)), 2.0, 3.0, 2.0, 0.5) for N in (64, 128)
    ]
    rec.drift("mixed_maximal", mixed, "p=2 r=3 q=2 gamma=0.5")
    return rec.failures


def embeddings_suite(seed: int, L: float) -> List[Failure]:
    rec = _Recorder(Suite.EMBEDDINGS)
    grid = GridSpec(1, L, 256)
    fam = build_family(grid)
    for i in range(5):
        f = _bandlimited(grid, [seed, i])
        for s, p, gamma in ((0.3, 2.0, 0.0), (0.7, 3.0, 0.5), (-0.5, 1.5, -0.5)):
            for row in embedding_report(f, standard_pairs(s, p, gamma), fam):
                detail = f"seed={i} {row.pair}"
                if row.holds is False:
                    rec.at_most("exact_embedding", row.ratio, 1.0, detail)
                elif not (np.isfinite(row.ratio) and row.ratio > 0):
                    rec.fail("bracket_finite", row.ratio, detail)
        check = partial_sum_check(f, fam, -0.5, 2.0, 2.0)
        rec.at_most("partial_sums", check.ratio, check.bound * (1 + 1e-12), f"seed={i}")
    return rec.failures


SUITES: Dict[Suite, Callable[[int, float], List[Failure]]] = {
    Suite.GRID: grid_suite,
    Suite.DYADIC: dyadic_suite,
    Suite.NORMS: norms_suite,
    Suite.PARAPRODUCT: paraproduct_suite,
    Suite.MAXIMAL: maximal_suite,
    Suite.EMBEDDINGS: embeddings_suite,
}


def run_suite(
    suite: Suite | str,
    seed: int = DEFAULT_SEED,
    L: float = DEFAULT_L,
    logger: Optional[LoggerLike] = None,
) -> List[Failure]:
    """Run one suite, or every suite for `Suite.ALL`, and collect the failures."""
    logger = _logger if logger is None else logger
    if isinstance(suite, str):
        suite = Suite.from_label(suite)
    selected = list(SUITES) if suite is Suite.ALL else [suite]
    failures: List[Failure] = []
    for item in selected:
        logger.info(f"Running {item.label} suite")
        found = SUITES[item](seed, L)
        if found:
            logger.warning(f"Suite {item.label} failed {len(found)} check(s)")
        else:
            logger.info(f"Suite {item.label} passed")
        failures.extend(found)
    return failures
