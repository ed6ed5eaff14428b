"""Weighted Besov, Triebel-Lizorkin, Bessel-potential, Sobolev and Hölder norms on the grid.

Every norm here works on the Littlewood-Paley blocks of a `lpmult.grid.SampledField`,
or on its spectrum, and integrates against a cell-averaged
`lpmult.weights.PowerWeight`. Passing `w=None` means the unweighted norm.

The difference norms live in `lpmult.norms.difference`, the sequence-space norms in
`lpmult.norms.sequence` and the embedding reports in `lpmult.norms.embeddings`.
"""
from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from enum import Enum, auto
from typing import Iterator, Optional, Tuple

import numpy as np

from lpmult import _utils
from lpmult.dyadic import DyadicFamily, block_values
from lpmult.exceptions import ParameterError
from lpmult.grid import SampledField, fourier_multiply, value_norm
from lpmult.lptyping import FloatArray
from lpmult.weights import (
    PowerWeight,
    WeightKind,
    cell_averaged_weight,
    check_weight,
    modulus_norm,
    weighted_lp_norm,
)

_logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 1024
_SAMPLE_CHUNK = 64


class SpaceKind(Enum):
    LP = auto()
    BESOV = auto()
    TRIEBEL_LIZORKIN = auto()
    BESSEL = auto()
    SOBOLEV = auto()
    MIXED_LP = auto()
    SEQ_LP_A = auto()
    """Sequences normed in L^p_A(w; ℓ^{s,q})."""
    SEQ_LQ_LP_A = auto()
    """Sequences normed in ℓ^{s,q}(L^{p(r)}_A(w))."""

    @property
    def letter(self) -> str:
        match self:
            case SpaceKind.LP | SpaceKind.MIXED_LP:
                return "L"
            case SpaceKind.BESOV:
                return "B"
            case SpaceKind.TRIEBEL_LIZORKIN:
                return "F"
            case SpaceKind.BESSEL:
                return "H"
            case SpaceKind.SOBOLEV:
                return "W"
            case SpaceKind.SEQ_LP_A:
                return "seqF"
            case SpaceKind.SEQ_LQ_LP_A:
                return "seqB"


_TOKEN = re.compile(r"^(?P<letter>[LHWBF])(?P<index>[0-9.]+|inf)?$")


@dataclass(frozen=True)
class SpaceSpec:
    """A function or sequence space together with all its parameters."""

    kind: SpaceKind
    s: float = 0.0
    """Smoothness."""

    p: float = 2.0
    """Integrability, in (1, ∞)."""

    q: float = 2.0
    """Microscopic parameter, in [1, ∞]."""

    gamma: float = 0.0
    """Exponent of the power weight."""

    m: int = 0
    """Integer order of Sobolev and difference norms."""

    r: Optional[float] = None
    """Inner exponent of mixed norms."""

    A: float = 1.0
    """Band constant of sequence spaces."""

    def __post_init__(self) -> None:
        if not 1 < self.p < np.inf:
            raise ParameterError(f"p must lie in (1, ∞), got {self.p}")
        if not self.q >= 1:
            raise ParameterError(f"q must lie in [1, ∞], got {self.q}")
        if self.m < 0 or int(self.m) != self.m:
            raise ParameterError(f"order m must be a nonnegative integer, got {self.m}")
        if self.r is not None and not 1 <= self.r:
            raise ParameterError(f"inner exponent r must be at least 1, got {self.r}")
        if not self.A >= 1:
            raise ParameterError(f"band constant A must be at least 1, got {self.A}")

    @property
    def token(self) -> str:
        """Short name used in reports: `H`, `L`, `W1`, `B2`, `Finf`, …"""
        match self.kind:
            case (
                SpaceKind.BESOV
                | SpaceKind.TRIEBEL_LIZORKIN
                | SpaceKind.SEQ_LP_A
                | SpaceKind.SEQ_LQ_LP_A
            ):
                return f"{self.kind.letter}{self.q:g}"
            case SpaceKind.SOBOLEV:
                return f"W{self.m}"
            case SpaceKind.MIXED_LP:
                return f"L({self.r:g})"
            case _:
                return self.kind.letter

    @classmethod
    def from_token(
        cls, token: str, s: float = 0.0, p: float = 2.0, gamma: float = 0.0
    ) -> SpaceSpec:
        match = _TOKEN.match(token.strip())
        if match is None:
            raise ParameterError(f"unknown space '{token}'")
        letter, index = match["letter"], match["index"]
        if letter in "LH" and index is None:
            kind = SpaceKind.LP if letter == "L" else SpaceKind.BESSEL
            return cls(kind, s=s, p=p, gamma=gamma)
        if letter == "W" and index is not None and index.isdigit():
            return cls(SpaceKind.SOBOLEV, s=float(index), p=p, gamma=gamma, m=int(index))
        if letter in "BF" and index is not None:
            kind = SpaceKind.BESOV if letter == "B" else SpaceKind.TRIEBEL_LIZORKIN
            return cls(kind, s=s, p=p, q=float(index), gamma=gamma)
        raise ParameterError(f"unknown space '{token}'")

    def __str__(self) -> str:
        return f"{self.token}(s={self.s:g}, p={self.p:g}, gamma={self.gamma:g})"


def weight_for(
    field: SampledField, gamma: float, kind: WeightKind = WeightKind.AXIS_LAST
) -> Optional[PowerWeight]:
    """The cell-averaged power weight on the field's grid, `None` for γ = 0."""
    if gamma == 0:
        return None
    return cell_averaged_weight(field.grid, gamma, kind)


def scaled_block_moduli(f: SampledField, fam: DyadicFamily, s: float) -> FloatArray:
    """Pointwise value norms of 2^{sk} S_k f, stacked along a leading level axis."""
    moduli = value_norm(block_values(fam, f), f.r_value)
    factors = 2.0 ** (s * np.arange(fam.K + 1))
    return moduli * factors.reshape((-1,) + (1,) * f.grid.d)


def besov_norm(
    f: SampledField,
    fam: DyadicFamily,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    r: Optional[float] = None,
) -> float:
    """‖(2^{sk} S_k f)_k‖_{ℓ^q(L^p(w))}, or ℓ^q(L^{p(r)}(w)) when r is given."""
    check_weight(f, w)
    moduli = scaled_block_moduli(f, fam, s)
    levels = [modulus_norm(g, p, f.grid, w, r) for g in moduli]
    return float(_utils.lq_combine(levels, q))


def tl_norm(
    f: SampledField,
    fam: DyadicFamily,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    r: Optional[float] = None,
) -> float:
    """‖(2^{sk} S_k f)_k‖_{L^p(w; ℓ^q)}, or L^{p(r)}(w; ℓ^q) when r is given."""
    check_weight(f, w)
    moduli = scaled_block_moduli(f, fam, s)
    return modulus_norm(_utils.lq_combine(moduli, q, axis=0), p, f.grid, w, r)


def bessel_potential(f: SampledField, s: float) -> SampledField:
    """ℱ^{−1}[(1+|ξ|²)^{s/2} f̂]."""
    return fourier_multiply((1.0 + f.grid.abs_frequency**2) ** (s / 2.0), f)


def bessel_norm(f: SampledField, s: float, p: float, w: Optional[PowerWeight] = None) -> float:
    check_weight(f, w)
    if s == 0:
        return weighted_lp_norm(f, p, w)
    return weighted_lp_norm(bessel_potential(f, s), p, w)


def multi_indices(d: int, order: int) -> Iterator[Tuple[int, ...]]:
    """All α ∈ ℕ₀^d with |α| ≤ order, by increasing |α|."""
    for total in range(order + 1):
        for alpha in itertools.product(range(total + 1), repeat=d):
            if sum(alpha) == total:
                yield alpha


def derivative(f: SampledField, alpha: Tuple[int, ...]) -> SampledField:
    """Spectral derivative D^α f with symbol ∏(iξ_j)^{α_j}."""
    if len(alpha) != f.grid.d:
        raise ParameterError(f"multi-index {alpha} does not match d={f.grid.d}")
    if not any(alpha):
        return f
    symbol = np.ones(f.grid.shape, dtype=np.complex128)
    for xi, a in zip(f.grid.frequencies, alpha):
        symbol = symbol * (1j * xi) ** a
    return fourier_multiply(symbol, f)


def sobolev_norm(f: SampledField, m: int, p: float, w: Optional[PowerWeight] = None) -> float:
    """(Σ_{|α|≤m} ‖D^α f‖^p_{L^p(w)})^{1/p}."""
    if m < 0:
        raise ParameterError(f"order m must be nonnegative, got {m}")
    check_weight(f, w)
    parts = [weighted_lp_norm(derivative(f, a), p, w) for a in multi_indices(f.grid.d, m)]
    return float(_utils.lq_combine(parts, p))


def derivative_norm(
    f: SampledField, s: float, p: float, w: Optional[PowerWeight] = None, m: int = 1
) -> float:
    """Σ_{|α|≤m} ‖D^α f‖_{H^{s−m,p}(w)}."""
    if m < 0:
        raise ParameterError(f"order m must be nonnegative, got {m}")
    check_weight(f, w)
    return sum(bessel_norm(derivative(f, a), s - m, p, w) for a in multi_indices(f.grid.d, m))


class Randomization(Enum):
    EXACT_P2 = auto()
    """Closed form E|Σ r_k a_k|² = Σ|a_k|², valid for p = 2 and Hilbertian values."""
    MONTE_CARLO = auto()
    """Average over seeded Rademacher sign vectors."""


def rademacher_signs(seed: int, index: int, size: int) -> FloatArray:
    """The sign vector of sample `index`; depends only on (seed, index)."""
    rng = np.random.default_rng([seed, index])
    return rng.integers(0, 2, size=size).astype(np.float64) * 2.0 - 1.0


def randomized_norm(
    f: SampledField,
    fam: DyadicFamily,
    s: float,
    p: float,
    w: Optional[PowerWeight] = None,
    mode: Randomization = Randomization.MONTE_CARLO,
    *,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> float:
    """‖Σ_k r_k 2^{sk} S_k f‖_{L^p(Ω; L^p(w))} for Rademacher signs r_k."""
    check_weight(f, w)
    match mode:
        case Randomization.EXACT_P2:
            if p != 2:
                raise ParameterError(f"exact randomized norm needs p = 2, got p={p}")
            if f.n > 1 and f.r_value != 2:
                raise ParameterError(
                    f"exact randomized norm needs a Hilbertian value norm, got r_value={f.r_value}"
                )
            moduli = scaled_block_moduli(f, fam, s)
            return modulus_norm(_utils.lq_combine(moduli, 2.0, axis=0), 2.0, f.grid, w)
        case Randomization.MONTE_CARLO:
            return _monte_carlo(f, fam, s, p, w, samples, seed)


def _monte_carlo(
    f: SampledField,
    fam: DyadicFamily,
    s: float,
    p: float,
    w: Optional[PowerWeight],
    samples: int,
    seed: int,
) -> float:
    if samples < 1:
        raise ParameterError(f"sample count must be positive, got {samples}")
    levels = fam.K + 1
    scaled = block_values(fam, f) * (2.0 ** (s * np.arange(levels))).reshape(
        (-1,) + (1,) * (f.grid.d + 1)
    )
    flat = scaled.reshape(levels, -1)
    norms = np.empty(samples)
    for start in range(0, samples, _SAMPLE_CHUNK):
        stop = min(samples, start + _SAMPLE_CHUNK)
        signs = np.stack([rademacher_signs(seed, i, levels) for i in range(start, stop)])
        sums = (signs @ flat).reshape((stop - start,) + f.values.shape)
        moduli = value_norm(sums, f.r_value)
        for i, g in enumerate(moduli):
            norms[start + i] = modulus_norm(g, p, f.grid, w)
    _logger.debug(f"Monte Carlo randomized norm over {samples} sign vectors, seed {seed}")
    return float(_utils.lq_combine(norms, p)) / samples ** (1.0 / p)


def holder_quotient(f: SampledField, exponent: float) -> float:
    """sup_{x≠y} ‖f(x) − f(y)‖ / |x − y|^exponent over grid points, periodic distance."""
    grid = f.grid
    if not 0 < exponent < 1:
        raise ParameterError(f"Hölder exponent must lie in (0, 1), got {exponent}")
    values = f.values
    best = 0.0
    half = grid.N // 2
    if grid.d == 1:
        offsets = [(o,) for o in range(1, half + 1)]
    else:
        offsets = [(a, b) for a in range(grid.N) for b in range(half + 1) if (a, b) != (0, 0)]
    axes = tuple(range(grid.d))
    for offset in offsets:
        shifted = np.roll(values, tuple(-o for o in offset), axis=axes)
        diff = float(np.max(value_norm(values - shifted, f.r_value)))
        distance = grid.h * np.sqrt(sum(min(o, grid.N - o) ** 2 for o in offset))
        best = max(best, diff / distance**exponent)
    return best


def holder_norm(f: SampledField, sigma: float) -> float:
    """BC^σ grid norm: sup norms of D^α f for |α| ≤ ⌊σ⌋ plus the Hölder quotient of the top derivatives."""
    if sigma < 0:
        raise ParameterError(f"Hölder order must be nonnegative, got {sigma}")
    order = int(np.floor(sigma))
    frac = sigma - order
    total = 0.0
    for alpha in multi_indices(f.grid.d, order):
        part = derivative(f, alpha)
        total += float(np.max(part.value_norm()))
        if frac > 0 and sum(alpha) == order:
            total += holder_quotient(part, frac)
    return total


def space_norm(
    f: SampledField,
    space: SpaceSpec,
    fam: Optional[DyadicFamily] = None,
    w: Optional[PowerWeight] = None,
) -> float:
    """Evaluate the norm named by `space`; w defaults to the axis-last weight of `space.gamma`."""
    if w is None:
        w = weight_for(f, space.gamma)
    match space.kind:
        case SpaceKind.LP:
            return weighted_lp_norm(f, space.p, w)
        case SpaceKind.MIXED_LP:
            if space.r is None:
                raise ParameterError("mixed norm needs an inner exponent r")
            check_weight(f, w)
            return modulus_norm(f.value_norm(), space.p, f.grid, w, space.r)
        case SpaceKind.BESSEL:
            return bessel_norm(f, space.s, space.p, w)
        case SpaceKind.SOBOLEV:
            return sobolev_norm(f, space.m, space.p, w)
        case SpaceKind.BESOV | SpaceKind.TRIEBEL_LIZORKIN:
            if fam is None:
                raise ParameterError(f"{space.kind.name} norm needs a dyadic family")
            norm = besov_norm if space.kind is SpaceKind.BESOV else tl_norm
            return norm(f, fam, space.s, space.p, space.q, w, space.r)
        case SpaceKind.SEQ_LP_A | SpaceKind.SEQ_LQ_LP_A:
            raise ParameterError("sequence spaces are normed with lpmult.norms.sequence.seq_norm")
