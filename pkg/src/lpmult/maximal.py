"""Hardy-Littlewood maximal operator on the periodic grid and weighted maximal inequalities.

Averages are taken over cell-centred windows of 2R+1 cells per axis, intervals in
d = 1 and cubes in d = 2, with periodic wrap. Window sums come from prefix sums, so one
radius costs O(N^d).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from lpmult import _utils
from lpmult.exceptions import GridMismatchError, ParameterError
from lpmult.grid import GridSpec, SampledField
from lpmult.lptyping import FloatArray
from lpmult.weights import cell_averaged_weight, modulus_norm

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaximalConfig:
    radii: Tuple[int, ...]
    """Window half-widths in cells; the length radius is R·h."""

    include_center: bool = True
    """Whether the pointwise value (R = 0) takes part in the supremum."""

    def __post_init__(self) -> None:
        if not self.radii:
            raise ParameterError("maximal operator needs at least one radius")
        if min(self.radii) < 1:
            raise ParameterError(f"radii must be positive cell counts, got {self.radii}")

    @classmethod
    def dyadic(cls, grid: GridSpec) -> MaximalConfig:
        """Radii 2L·2^{−j} for j = 0, …, log₂N − 1, that is N, N/2, …, 2 cells."""
        count = int(np.log2(grid.N))
        return cls(tuple(grid.N >> j for j in range(count)))

    @classmethod
    def exhaustive(cls, grid: GridSpec) -> MaximalConfig:
        """Every radius from one cell up to a full period."""
        return cls(tuple(range(1, grid.N + 1)))

    def lengths(self, grid: GridSpec) -> FloatArray:
        return np.asarray(self.radii, dtype=np.float64) * grid.h


def window_mean(a: FloatArray, R: int, axis: int) -> FloatArray:
    """Periodic mean over the 2R+1 cells centred at each index along `axis`."""
    n = a.shape[axis]
    width = 2 * R + 1
    if width >= n:
        return np.broadcast_to(np.mean(a, axis=axis, keepdims=True), a.shape).copy()
    head = np.take(a, np.arange(n - R, n), axis=axis)
    tail = np.take(a, np.arange(R), axis=axis)
    extended = np.concatenate([head, a, tail], axis=axis)
    zero = np.zeros_like(np.take(extended, [0], axis=axis))
    prefix = np.concatenate([zero, np.cumsum(extended, axis=axis)], axis=axis)
    upper = np.take(prefix, np.arange(width, width + n), axis=axis)
    lower = np.take(prefix, np.arange(n), axis=axis)
    return (upper - lower) / width


def _maximal_modulus(g: FloatArray, cfg: MaximalConfig) -> FloatArray:
    out = g.copy() if cfg.include_center else np.zeros_like(g)
    for R in cfg.radii:
        avg = g
        for axis in range(g.ndim):
            avg = window_mean(avg, R, axis)
        np.maximum(out, avg, out=out)
    return out


def hl_maximal(f: SampledField, cfg: Optional[MaximalConfig] = None) -> SampledField:
    """Mf(x) = sup over the configured radii of the window average of ‖f‖ around x."""
    if cfg is None:
        cfg = MaximalConfig.dyadic(f.grid)
    return SampledField(f.grid, _maximal_modulus(f.value_norm(), cfg))


def all_radii_maximal(f: SampledField) -> SampledField:
    """The maximal function over every window size, a brute-force reference."""
    return hl_maximal(f, MaximalConfig.exhaustive(f.grid))


def _stack_moduli(fields: Sequence[SampledField]) -> Tuple[GridSpec, FloatArray]:
    if not fields:
        raise ParameterError("need at least one field")
    grid = fields[0].grid
    for f in fields:
        if f.grid != grid:
            raise GridMismatchError(f"fields live on different grids: {grid} vs {f.grid}")
    return grid, np.stack([f.value_norm() for f in fields])


def _inequality_ratio(
    fields: Sequence[SampledField],
    p: float,
    q: float,
    gamma: float,
    r: Optional[float],
    cfg: Optional[MaximalConfig],
) -> float:
    grid, moduli = _stack_moduli(fields)
    cfg = cfg or MaximalConfig.dyadic(grid)
    w = None if gamma == 0 else cell_averaged_weight(grid, gamma)
    if np.isinf(q):
        envelope = np.max(moduli, axis=0)
        left = _maximal_modulus(envelope, cfg)
        right = envelope
    else:
        left = _utils.lq_combine(np.stack([_maximal_modulus(g, cfg) for g in moduli]), q, axis=0)
        right = _utils.lq_combine(moduli, q, axis=0)
    denominator = modulus_norm(right, p, grid, w, r)
    if denominator == 0:
        raise ParameterError("fields vanish identically")
    ratio = modulus_norm(left, p, grid, w, r) / denominator
    _logger.debug(f"Maximal inequality ratio {ratio:.6g} for p={p}, q={q}, gamma={gamma}, N={grid.N}")
    return ratio


def fefferman_stein_check(
    fields: Sequence[SampledField],
    p: float,
    q: float,
    gamma: float,
    cfg: Optional[MaximalConfig] = None,
) -> float:
    """‖(Mf_n)‖_{L^p(w_γ; ℓ^q)} / ‖(f_n)‖_{L^p(w_γ; ℓ^q)}.

    For q = ∞ the left side is replaced by M applied to the envelope sup_n ‖f_n‖,
    which dominates sup_n Mf_n.
    """
    if not 1 < p < np.inf:
        raise ParameterError(f"p must lie in (1, ∞), got {p}")
    return _inequality_ratio(fields, p, q, gamma, None, cfg)


def mixed_maximal_check(
    fields: Sequence[SampledField],
    p: float,
    r: float,
    q: float,
    gamma: float,
    cfg: Optional[MaximalConfig] = None,
) -> float:
    """The same ratio in L^{p(r)}(w_γ; ℓ^q) with the weight on the last axis, d = 2."""
    if fields and fields[0].grid.d != 2:
        raise ParameterError("mixed maximal inequality needs d = 2")
    if not (1 < p < np.inf and 1 < r < np.inf):
        raise ParameterError(f"p and r must lie in (1, ∞), got p={p}, r={r}")
    return _inequality_ratio(fields, p, q, gamma, r, cfg)
