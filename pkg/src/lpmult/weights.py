"""Power weights, cell-exact weighted quadrature and Muckenhoupt A_p estimates.

A sample x_j stands for the cell [x_j, x_j + h)^d. Weights enter every integral through
their exact cell averages, so the singular or degenerate behaviour at t = 0 is
integrated rather than point-sampled.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum, auto
from typing import Optional

import numpy as np
from scipy import integrate, special

from lpmult.exceptions import GridMismatchError, ParameterError, WeightError
from lpmult.grid import GridSpec, SampledField
from lpmult.lptyping import FloatArray

_logger = logging.getLogger(__name__)

_GAUSS_POINTS = 8


class WeightKind(Enum):
    AXIS_LAST = auto()
    """w_γ(x′, t) = |t|^γ."""
    RADIAL = auto()
    """v_γ(x) = |x|^γ."""

    def threshold(self, d: int) -> float:
        """Local integrability requires γ above this value."""
        match self:
            case WeightKind.AXIS_LAST:
                return -1.0
            case WeightKind.RADIAL:
                return -float(d)


class PowerWeight:
    """A power weight sampled by its exact per-cell averages."""

    def __init__(
        self, grid: GridSpec, gamma: float, kind: WeightKind, cell_avg: FloatArray
    ) -> None:
        self._grid = grid
        self._gamma = gamma
        self._kind = kind
        cell_avg.setflags(write=False)
        self._cell_avg = cell_avg

    @property
    def grid(self) -> GridSpec:
        return self._grid

    @property
    def gamma(self) -> float:
        return self._gamma

    @property
    def kind(self) -> WeightKind:
        return self._kind

    @property
    def cell_avg(self) -> FloatArray:
        """Averages of the weight over each grid cell, shape `grid.shape`."""
        return self._cell_avg

    def axis_profile(self) -> FloatArray:
        """Cell averages along the last axis (axis-last weights only)."""
        if self._kind is not WeightKind.AXIS_LAST:
            raise ParameterError("axis profile is only defined for axis-last weights")
        return self._cell_avg[(0,) * (self._grid.d - 1)]

    def __repr__(self) -> str:
        return f"PowerWeight(gamma={self._gamma}, kind={self._kind.name}, grid={self._grid})"


@dataclass(frozen=True)
class DualExponents:
    p_prime: float
    """p′ = p/(p−1)."""

    gamma_prime: float
    """γ′ = −γ/(p−1)."""

    p: float
    gamma: float

    @property
    def identity_residual(self) -> float:
        """(1+γ′)/p′ + (1+γ)/p − 1, zero up to roundoff."""
        return (1 + self.gamma_prime) / self.p_prime + (1 + self.gamma) / self.p - 1


def dual_exponents(p: float, gamma: float) -> DualExponents:
    if not 1 < p < np.inf:
        raise ParameterError(f"p must lie in (1, ∞), got {p}")
    return DualExponents(p / (p - 1), -gamma / (p - 1), p, gamma)


def in_ap(p: float, gamma: float, kind: WeightKind = WeightKind.AXIS_LAST, d: int = 1) -> bool:
    """Whether the power weight of exponent γ lies in A_p.

    Axis weights need γ ∈ (−1, p−1); radial weights in dimension d need γ ∈ (−d, d(p−1)).
    """
    if not 1 < p < np.inf:
        raise ParameterError(f"p must lie in (1, ∞), got {p}")
    dim = 1 if kind is WeightKind.AXIS_LAST else d
    return -dim < gamma < dim * (p - 1)


def interval_average(a: FloatArray, b: FloatArray, gamma: float) -> FloatArray:
    """Exact average of |t|^γ over [a, b], any sign of a and b, γ > −1."""
    if gamma == 0:
        return np.ones_like(np.asarray(a, dtype=np.float64))
    upper = _antiderivative(np.asarray(b, dtype=np.float64), gamma)
    lower = _antiderivative(np.asarray(a, dtype=np.float64), gamma)
    return (upper - lower) / (np.asarray(b) - np.asarray(a))


def _antiderivative(t: FloatArray, gamma: float) -> FloatArray:
    return np.sign(t) * np.abs(t) ** (gamma + 1) / (gamma + 1)


def cell_averaged_weight(
    grid: GridSpec,
    gamma: float,
    kind: WeightKind = WeightKind.AXIS_LAST,
    *,
    clamp: bool = False,
) -> PowerWeight:
    """Build the cell-averaged power weight of exponent γ on `grid`.

    With `clamp`, exponents at or below the integrability threshold are accepted and the
    cells touching the singularity take the average of their outer neighbour.
    """
    threshold = kind.threshold(grid.d)
    if not np.isfinite(gamma):
        raise ParameterError(f"gamma must be finite, got {gamma}")
    singular = gamma <= threshold
    if singular and not clamp:
        raise WeightError(
            f"weight not locally integrable: gamma={gamma} must exceed {threshold}"
        )
    if kind is WeightKind.RADIAL and grid.d == 2:
        avg = _radial_averages(grid, gamma, singular)
    else:
        avg = _axis_averages(grid, gamma, singular)
    if singular:
        _logger.warning(f"Clamped cells touching the singularity of |.|^{gamma}")
    return PowerWeight(grid, gamma, kind, avg)


def _axis_averages(grid: GridSpec, gamma: float, singular: bool) -> FloatArray:
    left = grid.axis
    if singular:
        profile = np.empty(grid.N)
        regular = np.ones(grid.N, dtype=bool)
        mid = grid.N // 2
        regular[[mid - 1, mid]] = False
        profile[regular] = _far_average(left[regular], left[regular] + grid.h, gamma)
        profile[mid - 1] = profile[mid - 2]
        profile[mid] = profile[mid + 1]
    else:
        profile = interval_average(left, left + grid.h, gamma)
    if grid.d == 1:
        return profile
    return np.broadcast_to(profile, grid.shape).copy()


def _far_average(a: FloatArray, b: FloatArray, gamma: float) -> FloatArray:
    # cells bounded away from 0; valid for every real gamma
    if gamma == -1:
        return np.abs(np.log(np.abs(b)) - np.log(np.abs(a))) / (b - a)
    return interval_average(a, b, gamma)


def _radial_averages(grid: GridSpec, gamma: float, singular: bool) -> FloatArray:
    nodes, weights = special.roots_legendre(_GAUSS_POINTS)
    h = grid.h
    offsets = 0.5 * h * (nodes + 1.0)
    x0, x1 = grid.coordinates
    acc = np.zeros(grid.shape)
    for a, wa in zip(offsets, weights):
        for b, wb in zip(offsets, weights):
            acc += wa * wb * np.hypot(x0 + a, x1 + b) ** gamma
    avg = acc / 4.0
    mid = grid.N // 2
    corner = [(mid - 1, mid - 1), (mid - 1, mid), (mid, mid - 1), (mid, mid)]
    if singular:
        for i, j in corner:
            ni = i + (1 if i == mid else -1)
            avg[i, j] = avg[ni, j]
    else:
        exact = _origin_cell_average(h, gamma)
        for i, j in corner:
            avg[i, j] = exact
    return avg


def _origin_cell_average(h: float, gamma: float) -> float:
    """Average of |x|^γ over a square [0, h]² with a corner at the origin, γ > −2."""
    angular, _ = integrate.quad(lambda th: np.cos(th) ** (-(gamma + 2)), 0.0, np.pi / 4)
    return 2.0 * h**gamma * angular / (gamma + 2)


def check_weight(f: SampledField, w: Optional[PowerWeight]) -> None:
    if w is not None and w.grid != f.grid:
        raise GridMismatchError(f"weight grid {w.grid} differs from field grid {f.grid}")


def modulus_norm(
    g: FloatArray,
    p: float,
    grid: GridSpec,
    w: Optional[PowerWeight] = None,
    r: Optional[float] = None,
) -> float:
    """L^p(w) norm of a nonnegative array on `grid`, or L^{p(r)}(w) when r is given.

    The mixed norm takes the weighted L^r norm over the last axis first and the
    unweighted L^p norm over x′ second.
    """
    if r is not None:
        if grid.d != 2:
            raise ParameterError("mixed norm L^{p(r)} needs d = 2")
        if w is not None and w.kind is not WeightKind.AXIS_LAST:
            raise ParameterError("mixed norm needs an axis-last weight")
        inner = _axis_norms(g, r, grid, w)
        return _axis_norms(inner, p, grid, None, axis=0).item()
    if np.isinf(p):
        return float(np.max(g))
    if p < 1:
        raise ParameterError(f"p must be at least 1, got {p}")
    top = float(np.max(g))
    if top == 0:
        return 0.0
    density = (g / top) ** p
    if w is not None:
        density = density * w.cell_avg
    return top * float(np.sum(density) * grid.h**grid.d) ** (1.0 / p)


def _axis_norms(
    g: FloatArray,
    p: float,
    grid: GridSpec,
    w: Optional[PowerWeight],
    axis: int = -1,
) -> FloatArray:
    if np.isinf(p):
        return np.max(g, axis=axis)
    top = np.max(g, axis=axis, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    density = (g / safe) ** p
    if w is not None:
        density = density * w.cell_avg
    total = np.sum(density, axis=axis, keepdims=True) * grid.h
    return np.squeeze(top * total ** (1.0 / p), axis=axis)


def weighted_lp_norm(f: SampledField, p: float, w: Optional[PowerWeight] = None) -> float:
    """‖f‖_{L^p(w)} = (∫ ‖f(x)‖^p w(x) dx)^{1/p}; p = ∞ is the grid maximum and ignores w."""
    check_weight(f, w)
    return modulus_norm(f.value_norm(), p, f.grid, w)


def mixed_norm(f: SampledField, p: float, r: float, w: Optional[PowerWeight] = None) -> float:
    """‖f‖_{L^{p(r)}(w)} = ‖ ‖f(x′, ·)‖_{L^r(ℝ, w)} ‖_{L^p(ℝ^{d−1})}, d = 2 only."""
    check_weight(f, w)
    return modulus_norm(f.value_norm(), p, f.grid, w, r=r)


def ap_constant(w: PowerWeight, p: float, *, clamp: bool = False) -> float:
    """Supremum over dyadic cubes Q of avg_Q(w) · avg_Q(w^{1−p′})^{p−1}.

    The dual weight is again a power weight. If it is not locally integrable the result
    is ∞, unless `clamp` replaces the singular cells by their neighbours.
    """
    dual = dual_exponents(p, w.gamma)
    grid = w.grid
    dual_gamma = w.gamma * (1 - dual.p_prime)
    if dual_gamma <= w.kind.threshold(grid.d) and not clamp:
        _logger.debug(f"Dual exponent {dual_gamma:.4g} not integrable, A_{p} constant is inf")
        return np.inf
    sigma = cell_averaged_weight(grid, dual_gamma, w.kind, clamp=True)
    best = 0.0
    size = 1
    while size <= grid.N:
        mean_w = _block_means(w.cell_avg, size, grid.d)
        mean_sigma = _block_means(sigma.cell_avg, size, grid.d)
        best = max(best, float(np.max(mean_w * mean_sigma ** (p - 1))))
        size *= 2
    _logger.debug(f"A_{p} estimate for gamma={w.gamma} on N={grid.N}: {best:.6g}")
    return best


def _block_means(avg: FloatArray, size: int, d: int) -> FloatArray:
    n = avg.shape[0] // size
    if d == 1:
        return avg.reshape(n, size).mean(axis=1)
    return avg.reshape(n, size, n, size).mean(axis=(1, 3))


def ap_constant_exhaustive(w: PowerWeight, p: float) -> float:
    """A_p quotient over every interval of whole cells, d = 1 only."""
    grid = w.grid
    if grid.d != 1:
        raise ParameterError("the exhaustive A_p sweep is implemented for d = 1")
    dual = dual_exponents(p, w.gamma)
    dual_gamma = w.gamma * (1 - dual.p_prime)
    if dual_gamma <= -1:
        return np.inf
    sigma = cell_averaged_weight(grid, dual_gamma, w.kind)
    cw = np.concatenate([[0.0], np.cumsum(w.cell_avg)])
    cs = np.concatenate([[0.0], np.cumsum(sigma.cell_avg)])
    best = 0.0
    for length in range(1, grid.N + 1):
        mean_w = (cw[length:] - cw[:-length]) / length
        mean_s = (cs[length:] - cs[:-length]) / length
        best = max(best, float(np.max(mean_w * mean_s ** (p - 1))))
    return best
