from typing import Callable

import pytest

from lpmult import Workbench
from lpmult.dyadic import DyadicFamily, build_family
from lpmult.grid import FamilyKind, GridSpec, SampledField, sample_family


@pytest.fixture(scope="module")
def grid() -> GridSpec:
    return GridSpec(1, 16.0, 256)


@pytest.fixture(scope="module")
def fam(grid: GridSpec) -> DyadicFamily:
    return build_family(grid)


@pytest.fixture(scope="module")
def grid2() -> GridSpec:
    return GridSpec(2, 8.0, 64)


@pytest.fixture(scope="module")
def fam2(grid2: GridSpec) -> DyadicFamily:
    return build_family(grid2)


@pytest.fixture(scope="module")
def workbench() -> Workbench:
    return Workbench.create(d=1, L=16.0, N=256)


@pytest.fixture(scope="module")
def bandlimited() -> Callable[[GridSpec, int, float], SampledField]:
    def sample(grid: GridSpec, seed: int, reach: float = 0.8) -> SampledField:
        params = {"k_lo": 0.0, "k_hi": reach * grid.xi_max}
        return sample_family(FamilyKind.RANDOM_BANDLIMITED, params, grid, seed)

    return sample
