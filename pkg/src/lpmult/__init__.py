"""
.. include:: ../../README.md

lpmult is a numerical workbench for Littlewood-Paley analysis on periodic grids. It samples
test functions, splits them into dyadic frequency blocks, evaluates weighted Bessel-potential,
Besov and Triebel-Lizorkin norms, and measures how multiplication by the indicator of the
half-space {t ≥ 0} acts on these spaces.

## Conventions
 - Fields live on the box [−L, L)^d, d ∈ {1, 2}, sampled with N points per axis. The
   last axis carries the weight coordinate t.
 - Power weights |t|^γ are cell averaged, so singular exponents γ ∈ (−1, 0) are sampled
   without evaluating the weight at t = 0.
 - Norm functions take the dyadic family and the weight explicitly. `Workbench` bundles
   both for a fixed grid.

In any code examples, `wb` will be an instance of `Workbench`.
"""
from __future__ import annotations

import logging
from typing import Dict, List, Mapping, Optional, Tuple, Union

from lpmult.dyadic import DyadicFamily, build_family
from lpmult.grid import FamilyKind, GridSpec, SampledField, make_grid, sample_family
from lpmult.lptyping import LoggerLike, SeedLike
from lpmult.multiplier import multiplier_ratio
from lpmult.norms import SpaceSpec, space_norm
from lpmult.weights import PowerWeight, WeightKind, cell_averaged_weight

__version__ = "0.1.0"

DEFAULT_L = 16.0
DEFAULT_N = 1024
DEFAULT_SEED = 7

_logger = logging.getLogger(__name__)


class Workbench:
    """
    Holds a grid together with the objects that are expensive to rebuild on it.

    The dyadic family and the power weights are created on first use and cached. Create
    one with `Workbench.create`, for example:

    ```python
    wb = Workbench.create(d=1, L=16.0, N=1024)
    f = wb.sample("gaussian", {"width": 0.5})
    wb.norm(f, "F2", s=0.3, p=2.0, gamma=0.5)
    ```
    """

    def __init__(
        self,
        grid: GridSpec,
        K: Optional[int] = None,
        logger: Optional[LoggerLike] = None,
    ) -> None:
        self.logger: LoggerLike = logging.getLogger(__name__) if logger is None else logger
        self._grid = grid
        self._K = K
        self._family: Optional[DyadicFamily] = None
        self._indicator: Optional[SampledField] = None
        self._weights: Dict[Tuple[float, WeightKind], PowerWeight] = {}

    @classmethod
    def create(
        cls,
        d: int = 1,
        L: float = DEFAULT_L,
        N: int = DEFAULT_N,
        K: Optional[int] = None,
        logger: Optional[LoggerLike] = None,
    ) -> Workbench:
        return cls(make_grid(d, L, N), K, logger)

    @property
    def grid(self) -> GridSpec:
        return self._grid

    @property
    def family(self) -> DyadicFamily:
        """The dyadic family truncated at K, the largest admissible level by default."""
        if self._family is None:
            self._family = build_family(self._grid, self._K)
            self.logger.info(f"Built dyadic family with K={self._family.K} on N={self._grid.N}")
        return self._family

    @property
    def indicator(self) -> SampledField:
        """The indicator of the half-space {t ≥ 0}."""
        if self._indicator is None:
            self._indicator = sample_family(FamilyKind.INDICATOR_HALFSPACE, None, self._grid)
        return self._indicator

    def weight(
        self, gamma: float, kind: WeightKind = WeightKind.AXIS_LAST
    ) -> Optional[PowerWeight]:
        """The cell-averaged weight |t|^γ (or |x|^γ), `None` for γ = 0."""
        if gamma == 0:
            return None
        key = (gamma, kind)
        if key not in self._weights:
            self._weights[key] = cell_averaged_weight(self._grid, gamma, kind)
            self.logger.debug(f"Cached {kind.name.lower()} weight gamma={gamma}")
        return self._weights[key]

    def sample(
        self,
        kind: Union[FamilyKind, str],
        params: Optional[Mapping[str, float]] = None,
        seed: SeedLike = DEFAULT_SEED,
        *,
        n: int = 1,
        r_value: float = 2.0,
    ) -> SampledField:
        return sample_family(kind, params, self._grid, seed, n=n, r_value=r_value)

    def norm(
        self,
        f: SampledField,
        space: Union[SpaceSpec, str],
        s: float = 0.0,
        p: float = 2.0,
        gamma: float = 0.0,
    ) -> float:
        """The norm of f in `space`, given as a `SpaceSpec` or a token such as "B2" or "H"."""
        if isinstance(space, str):
            space = SpaceSpec.from_token(space, s, p, gamma)
        return space_norm(f, space, self.family, self.weight(space.gamma))

    def norm_table(
        self,
        f: SampledField,
        tokens: List[str],
        s: float = 0.0,
        p: float = 2.0,
        gamma: float = 0.0,
    ) -> List[Tuple[str, float]]:
        return [(token, self.norm(f, token, s, p, gamma)) for token in tokens]

    def multiplier_ratio(
        self,
        f: SampledField,
        space: Union[SpaceSpec, str],
        s: float = 0.0,
        p: float = 2.0,
        gamma: float = 0.0,
    ) -> float:
        """‖1_{t≥0}·f‖ / ‖f‖ in `space`."""
        if isinstance(space, str):
            space = SpaceSpec.from_token(space, s, p, gamma)
        return multiplier_ratio(self.indicator, f, space, self.family)

    def __repr__(self) -> str:
        return f"Workbench({self._grid})"

