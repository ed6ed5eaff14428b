"""Norm-ratio reports for embeddings between function and sequence spaces."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum, auto
from typing import List, Optional, Sequence, Union

import numpy as np

from lpmult.dyadic import DyadicFamily
from lpmult.exceptions import ParameterError
from lpmult.grid import GridSpec, SampledField
from lpmult.norms import SpaceKind, SpaceSpec, space_norm
from lpmult.norms.sequence import BandedSequence, SequenceOrder, seq_norm
from lpmult.weights import PowerWeight, cell_averaged_weight

_logger = logging.getLogger(__name__)

EXACT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class EmbeddingPair:
    source: SpaceSpec
    target: SpaceSpec
    exact: bool = False
    """Whether the embedding holds with constant 1 on the grid as well."""

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"


@dataclass(frozen=True)
class EmbeddingRow:
    pair: EmbeddingPair
    source_norm: float
    target_norm: float

    @property
    def ratio(self) -> float:
        """‖·‖_target / ‖·‖_source; ∞ for a zero source norm with nonzero target."""
        if self.source_norm == 0:
            return 0.0 if self.target_norm == 0 else np.inf
        return self.target_norm / self.source_norm

    @property
    def holds(self) -> Optional[bool]:
        """For exact pairs, whether the ratio stays at most 1; `None` otherwise."""
        if not self.pair.exact:
            return None
        return self.ratio <= 1.0 + EXACT_TOLERANCE


def _weight(grid: GridSpec, gamma: float) -> Optional[PowerWeight]:
    return None if gamma == 0 else cell_averaged_weight(grid, gamma)


def _norm(
    subject: Union[SampledField, BandedSequence],
    space: SpaceSpec,
    fam: Optional[DyadicFamily],
) -> float:
    w = _weight(subject.grid, space.gamma)
    if isinstance(subject, SampledField):
        return space_norm(subject, space, fam, w)
    match space.kind:
        case SpaceKind.SEQ_LP_A:
            return seq_norm(subject, space.s, space.p, space.q, w, SequenceOrder.LP_OUTER, space.r)
        case SpaceKind.SEQ_LQ_LP_A:
            order = SequenceOrder.LQ_OUTER if space.r is None else SequenceOrder.MIXED
            return seq_norm(subject, space.s, space.p, space.q, w, order, space.r)
        case _:
            raise ParameterError(f"{space.kind.name} is not a sequence space")


def embedding_report(
    subject: Union[SampledField, BandedSequence],
    pairs: Sequence[EmbeddingPair],
    fam: Optional[DyadicFamily] = None,
) -> List[EmbeddingRow]:
    """Evaluate both norms of every pair on `subject`; each space carries its own weight."""
    rows = []
    for pair in pairs:
        row = EmbeddingRow(pair, _norm(subject, pair.source, fam), _norm(subject, pair.target, fam))
        if row.holds is False:
            _logger.warning(f"Exact embedding {pair} violated with ratio {row.ratio:.15g}")
        rows.append(row)
    return rows


def standard_pairs(
    s: float, p: float, gamma: float = 0.0, m: Optional[int] = None
) -> List[EmbeddingPair]:
    """The elementary embeddings between B, F, H and W at smoothness s.

    ℓ^q monotonicity and the B-F sandwich hold with constant 1 on the grid. The
    comparison of F_{p,1}, H and F_{p,∞} holds up to constants, as does its W^{m,p}
    version when m is given.
    """
    def B(q: float) -> SpaceSpec:
        return SpaceSpec(SpaceKind.BESOV, s=s, p=p, q=q, gamma=gamma)

    def F(q: float, smoothness: float = s) -> SpaceSpec:
        return SpaceSpec(SpaceKind.TRIEBEL_LIZORKIN, s=smoothness, p=p, q=q, gamma=gamma)

    pairs = [
        EmbeddingPair(B(1.0), B(2.0), exact=True),
        EmbeddingPair(B(2.0), B(np.inf), exact=True),
        EmbeddingPair(F(1.0), F(2.0), exact=True),
        EmbeddingPair(F(2.0), F(np.inf), exact=True),
    ]
    for q in (1.0, 2.0, np.inf):
        pairs.append(EmbeddingPair(B(min(p, q)), F(q), exact=True))
        pairs.append(EmbeddingPair(F(q), B(max(p, q)), exact=True))
    H = SpaceSpec(SpaceKind.BESSEL, s=s, p=p, gamma=gamma)
    pairs.append(EmbeddingPair(F(1.0), H))
    pairs.append(EmbeddingPair(H, F(np.inf)))
    if m is not None:
        W = SpaceSpec(SpaceKind.SOBOLEV, s=m, p=p, gamma=gamma, m=m)
        pairs.append(EmbeddingPair(F(1.0, m), W))
        pairs.append(EmbeddingPair(W, F(np.inf, m)))
    return pairs


class JawerthFrankeDirection(Enum):
    B_TO_F = auto()
    """ℓ^{s0,p1}(L^{p1(p0)}(w_γ0)) ↪ L^{p1}(w_γ1; ℓ^{s1,q})."""
    F_TO_B = auto()
    """L^{p0}(w_γ0; ℓ^{s0,q}) ↪ ℓ^{s1,p0}(L^{p0(p1)}(w_γ1))."""


@dataclass(frozen=True)
class JawerthFrankeParams:
    s0: float
    p0: float
    gamma0: float
    s1: float
    p1: float
    gamma1: float

    @property
    def admissible(self) -> bool:
        return jawerth_franke_admissible(self)


def jawerth_franke_admissible(params: JawerthFrankeParams) -> bool:
    """s0 > s1, 1 < p0 < p1 < ∞, both weights A_p, γ0/p0 ≥ γ1/p1 and s0 − (1+γ0)/p0 ≥ s1 − (1+γ1)/p1."""
    pr = params
    if not (-1 < pr.gamma0 < pr.p0 - 1 and -1 < pr.gamma1 < pr.p1 - 1):
        return False
    return (
        pr.s0 > pr.s1
        and 1 < pr.p0 < pr.p1 < np.inf
        and pr.gamma0 / pr.p0 >= pr.gamma1 / pr.p1
        and pr.s0 - (1 + pr.gamma0) / pr.p0 >= pr.s1 - (1 + pr.gamma1) / pr.p1
    )


def jawerth_franke_ratio(
    seq: BandedSequence,
    params: JawerthFrankeParams,
    direction: JawerthFrankeDirection,
    q: float = 2.0,
) -> float:
    """Target over source norm of `seq` for one direction of the embedding."""
    if not params.admissible:
        raise ParameterError(f"parameters are not admissible for the embedding: {params}")
    pr = params
    w0 = _weight(seq.grid, pr.gamma0)
    w1 = _weight(seq.grid, pr.gamma1)
    match direction:
        case JawerthFrankeDirection.B_TO_F:
            source = seq_norm(seq, pr.s0, pr.p1, pr.p1, w0, SequenceOrder.MIXED, pr.p0)
            target = seq_norm(seq, pr.s1, pr.p1, q, w1, SequenceOrder.LP_OUTER)
        case JawerthFrankeDirection.F_TO_B:
            source = seq_norm(seq, pr.s0, pr.p0, q, w0, SequenceOrder.LP_OUTER)
            target = seq_norm(seq, pr.s1, pr.p0, pr.p0, w1, SequenceOrder.MIXED, pr.p1)
    if source == 0:
        raise ParameterError("sequence has zero norm")
    return target / source
