"""Pointwise multipliers: admissible smoothness ranges, auxiliary exponents and norm ratios.

The central multiplier is the indicator of the half-space {t ≥ 0}. The functions here
estimate ‖m·f‖ / ‖f‖ in weighted Bessel-potential, Besov and Triebel-Lizorkin norms and
audit the regularity of the indicator itself. Parameter sweeps over whole grids of
(s, p, γ, N) live in `lpmult.multiplier.sweep`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum, auto
from typing import Optional, Sequence, Tuple

import numpy as np

from lpmult.dyadic import DyadicFamily, block_values
from lpmult.exceptions import ParameterError, WeightError
from lpmult.grid import FamilyKind, SampledField, pointwise_multiply, sample_family, value_norm
from lpmult.lptyping import FloatArray
from lpmult.norms import (
    SpaceKind,
    SpaceSpec,
    bessel_norm,
    besov_norm,
    holder_norm,
    space_norm,
    tl_norm,
    weight_for,
)
from lpmult.weights import dual_exponents, in_ap, modulus_norm

_logger = logging.getLogger(__name__)

STABLE_SLOPE = 0.1
GROWTH_SLOPE = 0.3


@dataclass(frozen=True)
class AdmissibleRange:
    """The open interval −(1+γ′)/p′ < s < (1+γ)/p."""

    s_lo: float
    s_hi: float

    @property
    def width(self) -> float:
        return self.s_hi - self.s_lo

    def contains(self, s: float) -> bool:
        return self.s_lo < s < self.s_hi

    def distance(self, s: float) -> float:
        """Signed distance of s to the boundary, positive inside."""
        return min(s - self.s_lo, self.s_hi - s)


def admissible_range(p: float, gamma: float) -> AdmissibleRange:
    if not in_ap(p, gamma):
        raise WeightError(f"weight not A_p: gamma={gamma} must lie in (-1, {p - 1:g}) for p={p}")
    dual = dual_exponents(p, gamma)
    return AdmissibleRange(-(1 + dual.gamma_prime) / dual.p_prime, (1 + gamma) / p)


def admissible(s: float, p: float, gamma: float) -> Tuple[AdmissibleRange, bool]:
    """The admissible range for (p, γ) and whether s lies strictly inside it."""
    rng = admissible_range(p, gamma)
    return rng, rng.contains(s)


class SelectionRule(Enum):
    HALFSPACE = auto()
    """Three regimes for the half-space multiplier: middle, upper and lower."""
    PI2 = auto()
    """Exponents for the comparable-frequency paraproduct."""
    PI3 = auto()
    """Exponents for the high-m low-f paraproduct."""


@dataclass(frozen=True)
class ParamSelection:
    r: float
    """Auxiliary integrability exponent."""

    mu: float
    """Exponent of the auxiliary weight w_μ on the last axis."""

    eps: float
    case: str
    """Which regime produced the selection."""

    @property
    def sigma(self) -> float:
        """(1 + μ)/r, the smoothness at which m is measured."""
        return (1 + self.mu) / self.r


def _midpoint_r(s: float) -> float:
    # any r in (1, 1/|s|) works
    return 2.0 if s == 0 else (1.0 + 1.0 / abs(s)) / 2.0


def select_r_mu(
    s: float,
    p: float,
    gamma: float,
    eps: float = 0.05,
    rule: SelectionRule = SelectionRule.HALFSPACE,
) -> ParamSelection:
    """Choose the auxiliary pair (r, μ) for (s, p, γ) by the regime s falls into."""
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    rng, inside = admissible(s, p, gamma)
    if not inside:
        raise ParameterError(f"s={s} outside the admissible range ({rng.s_lo:g}, {rng.s_hi:g})")
    dual = dual_exponents(p, gamma)
    inv_p, inv_pp = 1.0 / p, 1.0 / dual.p_prime
    match rule:
        case SelectionRule.HALFSPACE:
            if -inv_pp < s < inv_p:
                selection = ParamSelection(_midpoint_r(s), 0.0, eps, "middle")
            elif s >= inv_p:
                r = p - eps if p - eps > 1 else (1 + p) / 2
                selection = ParamSelection(r, r * (s - inv_p + eps), eps, "upper")
            else:
                r = dual.p_prime - eps if dual.p_prime - eps > 1 else (1 + dual.p_prime) / 2
                selection = ParamSelection(r, r * (-s - inv_pp + eps), eps, "lower")
        case SelectionRule.PI2:
            if s >= 0:
                selection = ParamSelection(2.0, 0.0, eps, "nonnegative")
            elif s > -inv_pp:
                selection = ParamSelection(_midpoint_r(s), 0.0, eps, "middle")
            else:
                r = dual.p_prime - eps if dual.p_prime - eps > 1 else (1 + dual.p_prime) / 2
                selection = ParamSelection(r, r * (-s - inv_pp + eps), eps, "lower")
        case SelectionRule.PI3:
            if s >= inv_p:
                selection = ParamSelection(p, p * (s - inv_p + eps), eps, "upper")
            elif s > 0:
                selection = ParamSelection(_midpoint_r(s), 0.0, eps, "middle")
            else:
                selection = ParamSelection(2.0, 0.0, eps, "nonpositive")
    if not -1 < selection.mu < selection.r - 1:
        raise ParameterError(
            f"no admissible r for eps={eps}: mu={selection.mu:.6g} must lie in "
            f"(-1, r-1) with r={selection.r:.6g}"
        )
    _logger.debug(f"Selected {selection} for s={s}, p={p}, gamma={gamma}")
    return selection


@dataclass(frozen=True)
class IndicatorAudit:
    levels: FloatArray
    """a_k = 2^{k(1+γ)/p} ‖S_k m‖_{L^p(w_γ)} for k = 0, …, K."""

    p: float
    gamma: float

    @property
    def sup(self) -> float:
        return float(np.max(self.levels))

    def log_increments(self) -> FloatArray:
        """log₂(a_{k+1}/a_k) for k = 0, …, K−1."""
        return np.diff(np.log2(self.levels))

    def flatness(self, top: int = 3) -> float:
        """Largest |Δ log₂ a_k| among the `top` highest levels."""
        if top < 2 or top > len(self.levels):
            raise ParameterError(f"need 2 ≤ top ≤ {len(self.levels)}, got {top}")
        return float(np.max(np.abs(self.log_increments()[-(top - 1) :])))


def indicator_besov_audit(
    p: float, gamma: float, fam: DyadicFamily, *, smooth: bool = False
) -> IndicatorAudit:
    """Profile of the critical Besov seminorm of 1_{t≥0}·φ level by level.

    With `smooth`, a Gaussian replaces the cut-off indicator.
    """
    if not in_ap(p, gamma):
        raise WeightError(f"weight not A_p: gamma={gamma} must lie in (-1, {p - 1:g}) for p={p}")
    grid = fam.grid
    if smooth:
        m = sample_family(FamilyKind.GAUSSIAN, {"width": 1.0}, grid)
    else:
        cutoff = sample_family(FamilyKind.SMOOTH_CUTOFF, {"scale": 1.0}, grid)
        m = pointwise_multiply(sample_family(FamilyKind.INDICATOR_HALFSPACE, None, grid), cutoff)
    w = weight_for(m, gamma)
    moduli = value_norm(block_values(fam, m), m.r_value)
    sigma = (1 + gamma) / p
    levels = np.array(
        [2.0 ** (k * sigma) * modulus_norm(g, p, grid, w) for k, g in enumerate(moduli)]
    )
    audit = IndicatorAudit(levels, p, gamma)
    _logger.debug(f"Indicator audit p={p} gamma={gamma}: {np.array2string(levels, precision=4)}")
    return audit


def multiplier_ratio(
    m: SampledField, f: SampledField, space: SpaceSpec, fam: Optional[DyadicFamily] = None
) -> float:
    """‖m·f‖ / ‖f‖ in a Bessel-potential, Besov or Triebel-Lizorkin space."""
    if space.kind not in (SpaceKind.BESSEL, SpaceKind.BESOV, SpaceKind.TRIEBEL_LIZORKIN):
        raise ParameterError(f"multiplier ratio is defined for H, B and F, got {space.token}")
    denominator = space_norm(f, space, fam)
    if denominator == 0:
        raise ParameterError("zero denominator: f has zero norm")
    return space_norm(pointwise_multiply(m, f), space, fam) / denominator


@dataclass(frozen=True)
class NormRatios:
    bessel: float
    besov: float
    triebel_lizorkin: float

    def max(self) -> float:
        return max(self.bessel, self.besov, self.triebel_lizorkin)


def _all_ratios(
    numerator: SampledField,
    f: SampledField,
    fam: DyadicFamily,
    s: float,
    p: float,
    q: float,
    gamma: float,
    scale: float,
) -> NormRatios:
    w = weight_for(f, gamma)
    pairs = (
        (bessel_norm(numerator, s, p, w), bessel_norm(f, s, p, w)),
        (besov_norm(numerator, fam, s, p, q, w), besov_norm(f, fam, s, p, q, w)),
        (tl_norm(numerator, fam, s, p, q, w), tl_norm(f, fam, s, p, q, w)),
    )
    if any(bottom * scale == 0 for _, bottom in pairs):
        raise ParameterError("zero denominator: m or f vanishes")
    return NormRatios(*(top / (scale * bottom) for top, bottom in pairs))


def holder_multiplier_check(
    m: SampledField,
    f: SampledField,
    fam: DyadicFamily,
    s: float,
    p: float,
    gamma: float,
    sigma: float,
    q: float = 2.0,
) -> NormRatios:
    """‖m f‖ / (‖m‖_{BC^σ} ‖f‖) in H^{s,p}, B^s_{p,q} and F^s_{p,q}, all with weight w_γ."""
    if not sigma > abs(s):
        raise ParameterError(f"Hölder multipliers need sigma > |s|, got sigma={sigma}, s={s}")
    return _all_ratios(pointwise_multiply(m, f), f, fam, s, p, q, gamma, holder_norm(m, sigma))


def algebra_check(
    m: SampledField,
    f: SampledField,
    s: float,
    p: float,
    gamma: float,
    fam: Optional[DyadicFamily] = None,
    space: SpaceKind = SpaceKind.BESSEL,
    q: float = 2.0,
) -> float:
    """‖mf‖ / (‖m‖_∞ ‖f‖ + ‖m‖ ‖f‖_∞) in H^{s,p}(w_γ), or in B or F with q."""
    if not s > 0:
        raise ParameterError(f"algebra estimate needs s > 0, got s={s}")
    if m.n != 1:
        raise ParameterError("algebra estimate needs a scalar multiplier")
    if f.n > 1 and f.r_value != 2:
        raise ParameterError(f"algebra estimate needs r_value = 2, got {f.r_value}")
    spec = SpaceSpec(space, s=s, p=p, q=q, gamma=gamma)
    m_sup = float(np.max(m.value_norm()))
    f_sup = float(np.max(f.value_norm()))
    denominator = m_sup * space_norm(f, spec, fam) + space_norm(m, spec, fam) * f_sup
    if denominator == 0:
        raise ParameterError("zero denominator: m or f vanishes")
    return space_norm(pointwise_multiply(m, f), spec, fam) / denominator


@dataclass(frozen=True)
class TypeEmbedding:
    tau: float
    """min(2, r_value)."""

    q: float
    """max(2, r_value)."""

    tl_tau: float
    bessel: float
    tl_q: float

    @property
    def lower_ratio(self) -> float:
        """‖f‖_H / ‖f‖_{F_{p,τ}}."""
        return self.bessel / self.tl_tau

    @property
    def upper_ratio(self) -> float:
        """‖f‖_{F_{p,q}} / ‖f‖_H."""
        return self.tl_q / self.bessel


def type_embedding_check(
    f: SampledField, fam: DyadicFamily, s: float, p: float, gamma: float
) -> TypeEmbedding:
    """F^s_{p,τ} ↪ H^{s,p} ↪ F^s_{p,q} with τ and q set by the value norm exponent."""
    tau, q = min(2.0, f.r_value), max(2.0, f.r_value)
    w = weight_for(f, gamma)
    report = TypeEmbedding(
        tau,
        q,
        tl_norm(f, fam, s, p, tau, w),
        bessel_norm(f, s, p, w),
        tl_norm(f, fam, s, p, q, w),
    )
    if report.tl_tau == 0 or report.bessel == 0:
        raise ParameterError("field has zero norm")
    return report


class Stability(Enum):
    STABLE = auto()
    GROWTH = auto()
    INCONCLUSIVE = auto()


def classify_slope(slope: float) -> Stability:
    """STABLE at or below 0.1, GROWTH at or above 0.3, INCONCLUSIVE between."""
    if slope <= STABLE_SLOPE:
        return Stability.STABLE
    if slope >= GROWTH_SLOPE:
        return Stability.GROWTH
    _logger.warning(f"Refinement slope {slope:.3f} is inconclusive")
    return Stability.INCONCLUSIVE


def growth_slope(Ns: Sequence[int], ratios: Sequence[float]) -> float:
    """Exponent a in ratio ∝ N^a, fitted by least squares in log-log coordinates."""
    if len(Ns) != len(ratios) or len(Ns) < 2:
        raise ParameterError("need at least two (N, ratio) pairs of equal length")
    values = np.asarray(ratios, dtype=np.float64)
    if not np.all(values > 0) or not np.all(np.isfinite(values)):
        raise ParameterError(f"ratios must be positive and finite, got {list(ratios)}")
    slope, _ = np.polyfit(np.log(np.asarray(Ns, dtype=np.float64)), np.log(values), 1)
    return float(slope)
