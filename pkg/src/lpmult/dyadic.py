"""Littlewood-Paley generator family and the operators S_k and S^l."""
from __future__ import annotations

import logging
from typing import Dict, List, Optional

import numpy as np

from lpmult import _utils
from lpmult.exceptions import GridMismatchError, ParameterError, SupportError
from lpmult.grid import GridSpec, SampledField, SpectralField, dft, fourier_multiply, idft
from lpmult.lptyping import ComplexArray, FloatArray

_logger = logging.getLogger(__name__)

INVARIANT_TOLERANCE = 1e-12


def generator(rho: FloatArray) -> FloatArray:
    """φ̂ as a function of |ξ|: 1 on [0, 1], 0 on [3/2, ∞), C^∞ in between."""
    return _utils.smooth_step(rho, 1.0, 1.5)


def max_level(grid: GridSpec) -> int:
    """Largest K with (3/2)·2^K ≤ ξ_max, or −1 if even the generator does not fit."""
    level = -1
    while 1.5 * 2.0 ** (level + 1) <= grid.xi_max:
        level += 1
    return level


class DyadicFamily:
    """The generator φ̂ and band multipliers φ̂_0, …, φ̂_K sampled on a grid's lattice."""

    def __init__(self, grid: GridSpec, K: int) -> None:
        rho = grid.abs_frequency
        dilated = [generator(rho / 2.0**k) for k in range(K + 1)]
        bands = [dilated[0]] + [dilated[k] - dilated[k - 1] for k in range(1, K + 1)]
        self._grid = grid
        self._K = K
        self._dilated = dilated
        self._bands = bands

    @property
    def grid(self) -> GridSpec:
        return self._grid

    @property
    def K(self) -> int:
        return self._K

    @property
    def hat_phi(self) -> FloatArray:
        return self._bands[0]

    @property
    def bands(self) -> List[FloatArray]:
        return list(self._bands)

    def band(self, k: int) -> FloatArray:
        if not 0 <= k <= self._K:
            raise ParameterError(f"level k={k} outside 0..{self._K}")
        return self._bands[k]

    def partial_symbol(self, l: int) -> FloatArray:
        """φ̂(2^{−l}ξ), the symbol of S^l; zero for l < 0."""
        if l > self._K:
            raise ParameterError(f"level l={l} exceeds K={self._K}")
        if l < 0:
            return np.zeros(self._grid.shape)
        return self._dilated[l]

    def check_grid(self, f: SampledField) -> None:
        if f.grid != self._grid:
            raise GridMismatchError(f"family grid {self._grid} differs from field grid {f.grid}")

    def invariants(self) -> Dict[str, float]:
        """Worst lattice violation of each defining property of the family."""
        rho = self._grid.abs_frequency
        phi = self.hat_phi
        residuals = {
            "range": float(max(0.0, -phi.min(), phi.max() - 1.0)),
            "unit_ball": float(np.max(np.abs(phi[rho <= 1.0] - 1.0), initial=0.0)),
            "outside": float(np.max(np.abs(phi[rho >= 1.5]), initial=0.0)),
        }
        support = 0.0
        for k in range(1, self._K + 1):
            outside = (rho < 2.0 ** (k - 1)) | (rho > 1.5 * 2.0**k)
            support = max(support, float(np.max(np.abs(self._bands[k][outside]), initial=0.0)))
        residuals["band_support"] = support
        total = np.sum(self._bands, axis=0)
        residuals["telescoping"] = float(np.max(np.abs(total - self._dilated[-1])))
        return residuals

    def __repr__(self) -> str:
        return f"DyadicFamily(K={self._K}, grid={self._grid})"


def build_family(
    grid: GridSpec, K: Optional[int] = None, *, allow_aliasing: bool = False
) -> DyadicFamily:
    """Build φ̂_0, …, φ̂_K on the lattice of `grid`.

    K defaults to the largest level whose band fits inside the lattice. Larger K is only
    accepted with `allow_aliasing`.
    """
    top = max_level(grid)
    if K is None:
        K = top
    if K < 0:
        raise ParameterError(f"K must be nonnegative and the grid must resolve |ξ| ≤ 3/2 (max K={top})")
    if K > top:
        if not allow_aliasing:
            raise ParameterError(f"K={K} exceeds max admissible K={top}")
        _logger.warning(f"Top band of K={K} leaves the lattice (max admissible K={top})")
    family = DyadicFamily(grid, K)
    residuals = family.invariants()
    worst = max(residuals.values())
    if worst > INVARIANT_TOLERANCE:
        raise SupportError(f"dyadic family invariants violated: {residuals}")
    _logger.debug(f"Built dyadic family K={K} on N={grid.N}, worst residual {worst:.2e}")
    return family


def block(fam: DyadicFamily, k: int, f: SampledField) -> SampledField:
    """S_k f = ℱ^{−1}(φ̂_k f̂)."""
    fam.check_grid(f)
    return fourier_multiply(fam.band(k), f)


def partial(fam: DyadicFamily, l: int, f: SampledField) -> SampledField:
    """S^l f = ℱ^{−1}(φ̂(2^{−l}·) f̂); S^l = 0 for l < 0."""
    fam.check_grid(f)
    if l < 0:
        return SampledField.zeros(f.grid, f.n, f.r_value)
    return fourier_multiply(fam.partial_symbol(l), f)


def block_values(fam: DyadicFamily, f: SampledField) -> ComplexArray:
    """All blocks S_0 f, …, S_K f stacked along a new leading axis."""
    fam.check_grid(f)
    spectrum = dft(f).values
    out = np.empty((fam.K + 1,) + f.values.shape, dtype=np.complex128)
    for k, band in enumerate(fam.bands):
        out[k] = idft(SpectralField(f.grid, band[..., np.newaxis] * spectrum)).values
    return out


def blocks(fam: DyadicFamily, f: SampledField) -> List[SampledField]:
    return [f.with_values(v) for v in block_values(fam, f)]
