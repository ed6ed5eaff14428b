"""Besov norms through finite differences and the modulus of smoothness.

The integral over t ∈ (0, ∞) with measure dt/t is sampled on the dyadic levels
t_j = 2L·2^{−j}, j = 0, …, log₂N − 1, each carrying the weight ln 2. The average over
|h| ≤ t runs over exact grid offsets: trapezoid weights on the segment in d = 1, equal
weights on the lattice disc in d = 2. Offsets are reduced modulo N, so each distinct
difference Δ_h^m f is formed once and shared by all levels.
"""
from __future__ import annotations

import logging
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy import special

from lpmult import _utils
from lpmult.exceptions import ParameterError
from lpmult.grid import GridSpec, SampledField, value_norm
from lpmult.lptyping import ComplexArray, FloatArray
from lpmult.weights import PowerWeight, check_weight, modulus_norm, weighted_lp_norm

_logger = logging.getLogger(__name__)

Offset = Tuple[int, ...]


def ball_volume(d: int) -> float:
    """Volume of the unit ball of ℝ^d."""
    match d:
        case 1:
            return 2.0
        case 2:
            return float(np.pi)
        case _:
            raise ParameterError(f"d must be 1 or 2, got {d}")


def difference_levels(grid: GridSpec) -> FloatArray:
    """The sample points t_j = 2L·2^{−j}, j = 0, …, log₂N − 1."""
    count = int(np.log2(grid.N))
    return 2.0 * grid.L * 2.0 ** -np.arange(count, dtype=np.float64)


def finite_difference(f: SampledField, offset: Offset, m: int) -> ComplexArray:
    """Δ_h^m f(x) = Σ_l C(m, l) (−1)^l f(x + (m−l)h) for h = offset·(grid spacing)."""
    if m < 1:
        raise ParameterError(f"difference order must be positive, got {m}")
    axes = tuple(range(f.grid.d))
    out = np.zeros_like(f.values)
    for l in range(m + 1):
        shift = tuple(-(m - l) * o for o in offset)
        coeff = special.comb(m, l, exact=True) * (-1) ** l
        out = out + coeff * np.roll(f.values, shift, axis=axes)
    return out


def _level_weights(grid: GridSpec, t: float) -> Dict[Offset, float]:
    """Quadrature weights of t^{−d}∫_{|h|≤t} dh on residues of grid offsets."""
    radius = int(np.floor(t / grid.h + 1e-9))
    weights: Dict[Offset, float] = {}
    if grid.d == 1:
        for o in range(-radius, radius + 1):
            c = 0.5 if abs(o) == radius else 1.0
            key = (o % grid.N,)
            weights[key] = weights.get(key, 0.0) + c * grid.h / t
        return weights
    disc = [
        (a, b)
        for a in range(-radius, radius + 1)
        for b in range(-radius, radius + 1)
        if a * a + b * b <= radius * radius
    ]
    share = ball_volume(2) / len(disc)
    for a, b in disc:
        key = (a % grid.N, b % grid.N)
        weights[key] = weights.get(key, 0.0) + share
    return weights


def _offsets_within(grid: GridSpec, t: float) -> List[Offset]:
    radius = int(np.floor(t / grid.h + 1e-9))
    span = range(-radius, radius + 1)
    if grid.d == 1:
        return sorted({(o % grid.N,) for o in span})
    return sorted(
        {(a % grid.N, b % grid.N) for a in span for b in span if a * a + b * b <= radius * radius}
    )


def _averaged_differences(f: SampledField, m: int) -> Iterator[Tuple[float, FloatArray]]:
    """(t_j, g_j) with g_j(x) = t_j^{−d} ∫_{|h|≤t_j} ‖Δ_h^m f(x)‖ dh."""
    grid = f.grid
    levels = difference_levels(grid)
    tables = [_level_weights(grid, t) for t in levels]
    averages = np.zeros((len(levels),) + grid.shape)
    offsets: set[Offset] = set()
    for table in tables:
        offsets.update(table)
    for offset in sorted(offsets):
        if not any(offset):
            continue
        modulus = value_norm(finite_difference(f, offset, m), f.r_value)
        for j, table in enumerate(tables):
            c = table.get(offset)
            if c is not None:
                averages[j] += c * modulus
    yield from zip(levels, averages)


def _check_order(s: float, m: int) -> None:
    if m < 1:
        raise ParameterError(f"difference order must be positive, got {m}")
    if not 0 < s < m:
        raise ParameterError(f"difference norm needs 0 < s < m, got s={s}, m={m}")


def difference_seminorm(
    f: SampledField,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    m: int = 1,
) -> float:
    """(∫_0^∞ t^{−sq} ‖t^{−d}∫_{|h|≤t} ‖Δ_h^m f‖ dh‖^q_{L^p(w)} dt/t)^{1/q} on the dyadic levels."""
    _check_order(s, m)
    check_weight(f, w)
    terms = [
        t ** (-s) * modulus_norm(g, p, f.grid, w) for t, g in _averaged_differences(f, m)
    ]
    return _level_sum(terms, q)


def difference_besov_norm(
    f: SampledField,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    m: int = 1,
) -> float:
    """‖f‖_{L^p(w)} plus the averaged difference seminorm of order m."""
    return weighted_lp_norm(f, p, w) + difference_seminorm(f, s, p, q, w, m)


def modulus_of_smoothness(
    f: SampledField,
    m: int,
    p: float,
    w: Optional[PowerWeight] = None,
    t: float = 1.0,
) -> float:
    """ω^m_{p,w}(f, t) = sup_{|h|≤t} ‖Δ_h^m f‖_{L^p(w)} over grid offsets h."""
    if m < 1:
        raise ParameterError(f"difference order must be positive, got {m}")
    if t < 0:
        raise ParameterError(f"t must be nonnegative, got {t}")
    check_weight(f, w)
    best = 0.0
    for offset in _offsets_within(f.grid, t):
        if any(offset):
            modulus = value_norm(finite_difference(f, offset, m), f.r_value)
            best = max(best, modulus_norm(modulus, p, f.grid, w))
    return best


def omega_seminorm(
    f: SampledField,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    m: int = 1,
) -> float:
    """(∫_0^∞ (t^{−s} ω^m_{p,w}(f, t))^q dt/t)^{1/q} on the dyadic levels."""
    _check_order(s, m)
    check_weight(f, w)
    grid = f.grid
    levels = difference_levels(grid)
    norms: Dict[Offset, float] = {}
    terms: List[float] = []
    for t in levels:
        best = 0.0
        for offset in _offsets_within(grid, t):
            if not any(offset):
                continue
            if offset not in norms:
                modulus = value_norm(finite_difference(f, offset, m), f.r_value)
                norms[offset] = modulus_norm(modulus, p, grid, w)
            best = max(best, norms[offset])
        terms.append(t ** (-s) * best)
    return _level_sum(terms, q)


def omega_besov_norm(
    f: SampledField,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    m: int = 1,
) -> float:
    """‖f‖_{L^p(w)} plus the seminorm built from the modulus of smoothness."""
    return weighted_lp_norm(f, p, w) + omega_seminorm(f, s, p, q, w, m)


def omega_bound_ratio(
    f: SampledField,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    m: int = 1,
) -> float:
    """Averaged-difference seminorm over ω-seminorm; never exceeds the unit ball volume."""
    denominator = omega_seminorm(f, s, p, q, w, m)
    if denominator == 0:
        return 0.0
    ratio = difference_seminorm(f, s, p, q, w, m) / denominator
    _logger.debug(f"One-sided difference bound ratio {ratio:.6g}")
    return ratio


def _level_sum(terms: List[float], q: float) -> float:
    if np.isinf(q):
        return float(max(terms))
    return float(_utils.lq_combine(terms, q)) * np.log(2.0) ** (1.0 / q)
