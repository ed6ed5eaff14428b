from typing import Callable

import numpy as np
import pytest

from lpmult.dyadic import (
    DyadicFamily,
    block,
    block_values,
    blocks,
    build_family,
    generator,
    max_level,
    partial,
)
from lpmult.exceptions import GridMismatchError, ParameterError
from lpmult.grid import FamilyKind, GridSpec, SampledField, out_of_band_fraction, sample_family

Sampler = Callable[[GridSpec, int, float], SampledField]


def test_generator_profile():
    rho = np.array([0.0, 0.5, 1.0, 1.25, 1.5, 3.0])
    phi = generator(rho)
    assert np.array_equal(phi[[0, 1, 2]], [1.0, 1.0, 1.0])
    assert 0.0 < phi[3] < 1.0
    assert np.array_equal(phi[[4, 5]], [0.0, 0.0])


@pytest.mark.parametrize(
    "d,L,N,K", [(1, 16.0, 1024, 6), (1, 16.0, 256, 4), (2, 4.0, 256, 6), (2, 8.0, 64, 3)]
)
def test_max_level(d: int, L: float, N: int, K: int):
    assert max_level(GridSpec(d, L, N)) == K


@pytest.mark.parametrize("d,L,N", [(1, 16.0, 1024), (2, 4.0, 256)])
def test_invariants_hold_at_every_level(d: int, L: float, N: int):
    grid = GridSpec(d, L, N)
    for K in range(max_level(grid) + 1):
        residuals = DyadicFamily(grid, K).invariants()
        assert max(residuals.values()) <= 1e-12, residuals


def test_level_above_lattice(grid: GridSpec):
    top = max_level(grid)
    with pytest.raises(ParameterError, match="exceeds max admissible"):
        build_family(grid, top + 1)
    with pytest.raises(ParameterError, match="nonnegative"):
        build_family(grid, -1)
    assert build_family(grid, top + 1, allow_aliasing=True).K == top + 1


def test_blocks_sum_to_partial(fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler):
    f = bandlimited(grid, 21, 0.8)
    total = np.sum(block_values(fam, f), axis=0)
    assert np.max(np.abs(total - partial(fam, fam.K, f).values)) <= 1e-12
    assert len(blocks(fam, f)) == fam.K + 1


def test_partition_recovers_resolved_fields(fam: DyadicFamily, grid: GridSpec):
    f = sample_family(
        FamilyKind.RANDOM_BANDLIMITED, {"k_lo": 0.0, "k_hi": 2.0**fam.K - 1.0}, grid, 4
    )
    total = np.sum(block_values(fam, f), axis=0)
    assert np.max(np.abs(total - f.values)) <= 1e-12


def test_negative_partial_is_zero(fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler):
    f = bandlimited(grid, 5, 0.8)
    assert np.array_equal(partial(fam, -1, f).values, np.zeros_like(f.values))
    with pytest.raises(ParameterError):
        partial(fam, fam.K + 1, f)


def test_block_spectrum_stays_in_annulus(fam: DyadicFamily, grid: GridSpec):
    rng = np.random.default_rng(8)
    f = SampledField(grid, rng.standard_normal(grid.N))
    assert out_of_band_fraction(block(fam, 0, f), 0.0, 1.5) <= 1e-12
    for k in range(1, fam.K + 1):
        assert out_of_band_fraction(block(fam, k, f), 2.0 ** (k - 1), 1.5 * 2.0**k) <= 1e-12


def test_block_level_bounds(fam: DyadicFamily, grid: GridSpec):
    f = SampledField.zeros(grid)
    with pytest.raises(ParameterError, match="outside"):
        block(fam, fam.K + 1, f)


def test_family_rejects_other_grid(fam: DyadicFamily):
    other = SampledField.zeros(GridSpec(1, 16.0, 512))
    with pytest.raises(GridMismatchError):
        block(fam, 0, other)


def test_two_dimensional_blocks(fam2: DyadicFamily, grid2: GridSpec, bandlimited: Sampler):
    f = bandlimited(grid2, 3, 0.6)
    total = np.sum(block_values(fam2, f), axis=0)
    assert np.max(np.abs(total - partial(fam2, fam2.K, f).values)) <= 1e-12
