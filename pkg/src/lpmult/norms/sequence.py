"""Sequence spaces of band-limited fields and the estimates built on them."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum, auto
from typing import List, Optional, Sequence

import numpy as np

from lpmult import _utils
from lpmult.dyadic import DyadicFamily, block_values
from lpmult.exceptions import GridMismatchError, ParameterError, SupportError
from lpmult.grid import (
    FamilyKind,
    GridSpec,
    SampledField,
    out_of_band_fraction,
    sample_family,
    value_norm,
)
from lpmult.lptyping import FloatArray
from lpmult.weights import PowerWeight, modulus_norm

_logger = logging.getLogger(__name__)

SUPPORT_TOLERANCE = 1e-12


class SupportKind(Enum):
    BALL = auto()
    """supp f̂_k ⊆ {|ξ| ≤ A·2^k}."""
    ANNULUS = auto()
    """supp f̂_0 ⊆ {|ξ| ≤ A} and supp f̂_k ⊆ {2^k/A ≤ |ξ| ≤ A·2^k} for k ≥ 1."""

    def band(self, k: int, A: float) -> tuple[float, float]:
        match self:
            case SupportKind.BALL:
                return 0.0, A * 2.0**k
            case SupportKind.ANNULUS:
                return (0.0 if k == 0 else 2.0**k / A), A * 2.0**k


class SequenceOrder(Enum):
    LP_OUTER = auto()
    """L^p(w; ℓ^{s,q}): ℓ^q pointwise, then L^p."""
    LQ_OUTER = auto()
    """ℓ^{s,q}(L^p(w)): L^p per member, then ℓ^q."""
    MIXED = auto()
    """ℓ^{s,q}(L^{p(r)}(w)); in d = 1 this is ℓ^{s,q}(L^r(w))."""


class BandedSequence:
    """Fields f_0, …, f_K on one grid whose spectra obey a declared support condition.

    The condition is checked at construction: the share of spectral energy outside the
    band must not exceed `SUPPORT_TOLERANCE`.
    """

    def __init__(
        self,
        fields: Sequence[SampledField],
        A: float,
        support: SupportKind = SupportKind.ANNULUS,
    ) -> None:
        if len(fields) == 0:
            raise ParameterError("a banded sequence needs at least one member")
        if not A >= 1:
            raise ParameterError(f"band constant A must be at least 1, got {A}")
        grid = fields[0].grid
        for f in fields:
            if f.grid != grid:
                raise GridMismatchError(f"members live on different grids: {grid} vs {f.grid}")
            if f.n != fields[0].n:
                raise GridMismatchError("members have different value dimensions")
        self._fields = list(fields)
        self._A = A
        self._support = support
        for k, f in enumerate(self._fields):
            leak = out_of_band_fraction(f, *support.band(k, A))
            if leak > SUPPORT_TOLERANCE:
                raise SupportError(
                    f"member {k} leaves its band {support.name.lower()} with A={A}: "
                    f"relative mass {leak:.3e} outside"
                )

    @property
    def fields(self) -> List[SampledField]:
        return list(self._fields)

    @property
    def K(self) -> int:
        return len(self._fields) - 1

    @property
    def A(self) -> float:
        return self._A

    @property
    def support(self) -> SupportKind:
        return self._support

    @property
    def grid(self) -> GridSpec:
        return self._fields[0].grid

    def total(self) -> SampledField:
        """Σ_k f_k."""
        values = np.sum([f.values for f in self._fields], axis=0)
        return self._fields[0].with_values(values)

    def __len__(self) -> int:
        return len(self._fields)

    def __repr__(self) -> str:
        return f"BandedSequence(K={self.K}, A={self._A}, support={self._support.name})"


def banded_from_blocks(f: SampledField, fam: DyadicFamily) -> BandedSequence:
    """The Littlewood-Paley blocks (S_k f)_k as an annular sequence with A = 2."""
    return BandedSequence(
        [f.with_values(v) for v in block_values(fam, f)], 2.0, SupportKind.ANNULUS
    )


def random_banded_sequence(
    grid: GridSpec,
    K: int,
    A: float = 2.0,
    support: SupportKind = SupportKind.ANNULUS,
    seed: int = 0,
    *,
    n: int = 1,
    r_value: float = 2.0,
) -> BandedSequence:
    """Independent random band-limited members filling the band of each level."""
    if A * 2.0**K > grid.xi_max:
        raise ParameterError(f"band A·2^K={A * 2.0**K:.6g} exceeds xi_max={grid.xi_max:.6g}")
    fields = []
    for k in range(K + 1):
        lo, hi = support.band(k, A)
        fields.append(
            sample_family(
                FamilyKind.RANDOM_BANDLIMITED,
                {"k_lo": lo, "k_hi": hi},
                grid,
                [seed, k],
                n=n,
                r_value=r_value,
            )
        )
    return BandedSequence(fields, A, support)


def _member_norm(
    g: FloatArray, p: float, grid: GridSpec, w: Optional[PowerWeight], r: Optional[float]
) -> float:
    if r is not None and grid.d == 1:
        return modulus_norm(g, r, grid, w)
    return modulus_norm(g, p, grid, w, r)


def _scaled_moduli(fields: Sequence[SampledField], s: float) -> FloatArray:
    return np.stack([2.0 ** (s * k) * f.value_norm() for k, f in enumerate(fields)])


def _sequence_norm(
    moduli: FloatArray,
    grid: GridSpec,
    p: float,
    q: float,
    w: Optional[PowerWeight],
    order: SequenceOrder,
    r: Optional[float],
) -> float:
    match order:
        case SequenceOrder.LP_OUTER:
            return _member_norm(_utils.lq_combine(moduli, q, axis=0), p, grid, w, r)
        case SequenceOrder.LQ_OUTER:
            return float(_utils.lq_combine([modulus_norm(g, p, grid, w) for g in moduli], q))
        case SequenceOrder.MIXED:
            if r is None:
                raise ParameterError("mixed sequence norm needs an inner exponent r")
            return float(_utils.lq_combine([_member_norm(g, p, grid, w, r) for g in moduli], q))


def seq_norm(
    seq: BandedSequence,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    order: SequenceOrder = SequenceOrder.LP_OUTER,
    r: Optional[float] = None,
) -> float:
    """Norm of (2^{sk} f_k)_k in the sequence space selected by `order`."""
    if w is not None and w.grid != seq.grid:
        raise GridMismatchError(f"weight grid {w.grid} differs from sequence grid {seq.grid}")
    return _sequence_norm(_scaled_moduli(seq.fields, s), seq.grid, p, q, w, order, r)


def synthesis_check(
    seq: BandedSequence,
    fam: DyadicFamily,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    order: SequenceOrder = SequenceOrder.LP_OUTER,
    r: Optional[float] = None,
) -> float:
    """‖(2^{sn} S_n Σ_k f_k)_n‖ / ‖(2^{sk} f_k)_k‖ in the same sequence norm.

    Ball-supported sequences only synthesize for s > 0.
    """
    if seq.support is SupportKind.BALL and not s > 0:
        raise ParameterError(f"ball-supported synthesis needs s > 0, got s={s}")
    denominator = seq_norm(seq, s, p, q, w, order, r)
    if denominator == 0:
        raise ParameterError("sequence has zero norm")
    total = seq.total()
    fam.check_grid(total)
    moduli = value_norm(block_values(fam, total), total.r_value)
    moduli = moduli * (2.0 ** (s * np.arange(fam.K + 1))).reshape((-1,) + (1,) * seq.grid.d)
    return _sequence_norm(moduli, seq.grid, p, q, w, order, r) / denominator


@dataclass(frozen=True)
class PartialSumCheck:
    ratio: float
    """‖(2^{sl} S^l f)_l‖ / ‖(2^{sk} S_k f)_k‖."""

    bound: float
    """Σ_{l≥0} 2^{sl} = 1/(1 − 2^s)."""

    @property
    def holds(self) -> bool:
        return self.ratio <= self.bound * (1 + 1e-12)


def partial_sum_check(
    f: SampledField,
    fam: DyadicFamily,
    s: float,
    p: float,
    q: float,
    w: Optional[PowerWeight] = None,
    r: Optional[float] = None,
) -> PartialSumCheck:
    """Compare the partial sums S^l f against the blocks S_k f in ℓ^{s,q}(L^{p(r)}(w)), s < 0."""
    if not s < 0:
        raise ParameterError(f"partial sum estimate needs s < 0, got s={s}")
    blocks = block_values(fam, f)
    partials = np.cumsum(blocks, axis=0)
    scale = (2.0 ** (s * np.arange(fam.K + 1))).reshape((-1,) + (1,) * f.grid.d)
    order = SequenceOrder.MIXED if r is not None else SequenceOrder.LQ_OUTER
    top = _sequence_norm(value_norm(partials, f.r_value) * scale, f.grid, p, q, w, order, r)
    bottom = _sequence_norm(value_norm(blocks, f.r_value) * scale, f.grid, p, q, w, order, r)
    if bottom == 0:
        raise ParameterError("field has no Littlewood-Paley content")
    check = PartialSumCheck(top / bottom, 1.0 / (1.0 - 2.0**s))
    _logger.debug(f"Partial sum ratio {check.ratio:.6g} against bound {check.bound:.6g}")
    return check
