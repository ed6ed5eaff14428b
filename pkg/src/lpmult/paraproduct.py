"""Bony paraproducts at finite truncation level and their estimates.

For a truncation level l ≤ K the product S^l m · S^l f is the double sum of
(S_a m)(S_b f) over 0 ≤ a, b ≤ l. The three paraproducts split this sum by a − b:

    Π₁: a ≤ b − 2,   Π₂: |a − b| ≤ 1,   Π₃: a ≥ b + 2,

so Π₁ + Π₂ + Π₃ reproduces the product up to floating point roundoff.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from typing import List, Optional, Tuple

import numpy as np

from lpmult.dyadic import DyadicFamily, block_values, build_family
from lpmult.exceptions import GridMismatchError, ParameterError
from lpmult.grid import (
    GridSpec,
    SampledField,
    fourier_multiply,
    out_of_band_fraction,
    outside_lattice_fraction,
    padded_product_spectrum,
    pointwise_multiply,
)
from lpmult.lptyping import ComplexArray
from lpmult.norms import bessel_norm, besov_norm, tl_norm, weight_for
from lpmult.weights import cell_averaged_weight

_logger = logging.getLogger(__name__)

REGION_TOLERANCE = 1e-10
ALIASING_TOLERANCE = 1e-10


class ParaproductKind(IntEnum):
    PI1 = 1
    """Low frequencies of m against high frequencies of f."""
    PI2 = 2
    """Comparable frequencies."""
    PI3 = 3
    """High frequencies of m against low frequencies of f."""


@dataclass(frozen=True)
class ParaproductTerm:
    """A single summand of a paraproduct and the frequency region it must live in."""

    kind: ParaproductKind
    k: int
    """Level of the f factor (of the m factor for Π₃)."""

    j: int
    """Level offset of the m factor in Π₂, zero otherwise."""

    product: SampledField
    region: Tuple[float, float]
    """lo ≤ |ξ| ≤ hi."""

    factors: Tuple[SampledField, SampledField]

    def __str__(self) -> str:
        return f"Pi{int(self.kind)}(k={self.k}, j={self.j})"


@dataclass
class ParaproductTriple:
    pi1: SampledField
    pi2: SampledField
    pi3: SampledField
    level: int
    """Truncation level l."""

    terms: List[ParaproductTerm] = field(default_factory=list)
    """Individual summands, kept only when requested."""

    def total(self) -> SampledField:
        return self.pi1 + self.pi2 + self.pi3

    def part(self, kind: ParaproductKind) -> SampledField:
        match kind:
            case ParaproductKind.PI1:
                return self.pi1
            case ParaproductKind.PI2:
                return self.pi2
            case ParaproductKind.PI3:
                return self.pi3


def outer_region(k: int) -> Tuple[float, float]:
    """2^{k−3} ≤ |ξ| ≤ 2^{k+1}, the home of the Π₁ and Π₃ summands of level k."""
    return 2.0 ** (k - 3), 2.0 ** (k + 1)


def diagonal_region(k: int) -> Tuple[float, float]:
    """|ξ| ≤ 5·2^k, the home of the Π₂ summands of level k."""
    return 0.0, 5.0 * 2.0**k


def _check_multiplier(m: SampledField, f: SampledField) -> None:
    if m.grid != f.grid:
        raise GridMismatchError(f"grids differ: {m.grid} vs {f.grid}")
    if m.n not in (1, f.n):
        raise GridMismatchError(f"multiplier must be scalar or diagonal of size {f.n}, got n={m.n}")


def paraproducts(
    m: SampledField,
    f: SampledField,
    fam: DyadicFamily,
    l: Optional[int] = None,
    *,
    retain_terms: bool = False,
) -> ParaproductTriple:
    """Π₁, Π₂, Π₃ of (m, f) truncated at level l (default K)."""
    _check_multiplier(m, f)
    fam.check_grid(f)
    level = fam.K if l is None else l
    if level > fam.K:
        raise ParameterError(f"level l={level} exceeds K={fam.K}")
    if level < 0:
        raise ParameterError(f"level l must be nonnegative, got {level}")
    mb = block_values(fam, m)
    fb = block_values(fam, f)
    mp = np.cumsum(mb, axis=0)
    fp = np.cumsum(fb, axis=0)
    shape = f.values.shape
    pi1 = np.zeros(shape, dtype=np.complex128)
    pi2 = np.zeros(shape, dtype=np.complex128)
    pi3 = np.zeros(shape, dtype=np.complex128)
    terms: List[ParaproductTerm] = []

    def keep(
        kind: ParaproductKind,
        k: int,
        j: int,
        a: ComplexArray,
        b: ComplexArray,
        region: Tuple[float, float],
    ) -> None:
        if retain_terms:
            factors = (m.with_values(a), f.with_values(b))
            terms.append(ParaproductTerm(kind, k, j, f.with_values(a * b), region, factors))

    for k in range(2, level + 1):
        pi1 += mp[k - 2] * fb[k]
        keep(ParaproductKind.PI1, k, 0, mp[k - 2], fb[k], outer_region(k))
    for k in range(level + 1):
        for j in (-1, 0, 1):
            if 0 <= k + j <= level:
                pi2 += mb[k + j] * fb[k]
                keep(ParaproductKind.PI2, k, j, mb[k + j], fb[k], diagonal_region(k))
    for k in range(2, level + 1):
        pi3 += mb[k] * fp[k - 2]
        keep(ParaproductKind.PI3, k, 0, mb[k], fp[k - 2], outer_region(k))
    _logger.debug(f"Paraproducts at level {level}: {len(terms)} retained terms")
    return ParaproductTriple(
        f.with_values(pi1), f.with_values(pi2), f.with_values(pi3), level, terms
    )


def reconstruction_residual(
    triple: ParaproductTriple, m: SampledField, f: SampledField, fam: DyadicFamily
) -> float:
    """‖Π₁ + Π₂ + Π₃ − S^l m · S^l f‖_∞ / (‖m‖_∞ ‖f‖_∞)."""
    symbol = fam.partial_symbol(triple.level)
    product = pointwise_multiply(fourier_multiply(symbol, m), fourier_multiply(symbol, f))
    scale = multiplier_sup(m) * float(np.max(np.abs(f.values)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(triple.total().values - product.values))) / scale


def multiplier_sup(m: SampledField) -> float:
    """sup_x of the operator norm of a scalar or diagonal multiplier."""
    return float(np.max(np.abs(m.values)))


@dataclass(frozen=True)
class TermAudit:
    term: str
    region_mass: float
    """Relative spectral mass outside the declared region."""

    aliasing_mass: float
    """Relative spectral mass of the exact product beyond the lattice."""

    @property
    def passed(self) -> bool:
        return self.region_mass <= REGION_TOLERANCE

    @property
    def aliased(self) -> bool:
        return self.aliasing_mass > ALIASING_TOLERANCE


@dataclass
class SupportAudit:
    rows: List[TermAudit]

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    @property
    def aliased(self) -> List[str]:
        return [row.term for row in self.rows if row.aliased]

    @property
    def worst_region_mass(self) -> float:
        return max((row.region_mass for row in self.rows), default=0.0)


def support_audit(triple: ParaproductTriple, fam: DyadicFamily) -> SupportAudit:
    """Check every retained summand against its frequency region and flag aliasing."""
    if not triple.terms:
        raise ParameterError("support audit needs paraproducts computed with retain_terms=True")
    rows = []
    for term in triple.terms:
        fam.check_grid(term.product)
        region_mass = out_of_band_fraction(term.product, *term.region)
        grid = term.product.grid
        aliasing_mass = outside_lattice_fraction(padded_product_spectrum(*term.factors), grid)
        rows.append(TermAudit(str(term), region_mass, aliasing_mass))
    audit = SupportAudit(rows)
    if audit.aliased:
        _logger.warning(f"Aliased paraproduct terms: {', '.join(audit.aliased)}")
    return audit


@dataclass(frozen=True)
class Pi1Bound:
    bessel: float
    """‖Π₁‖_{H^{s,p}(w)} / (‖m‖_∞ ‖f‖_{H^{s,p}(w)})."""

    triebel_lizorkin: float
    """‖Π₁‖_{F^s_{p,q}(w)} / (‖m‖_∞ ‖f‖_{F^s_{p,q}(w)})."""


def pi1_bound_check(
    m: SampledField,
    f: SampledField,
    fam: DyadicFamily,
    s: float,
    p: float,
    gamma: float,
    q: float = 2.0,
) -> Pi1Bound:
    w = weight_for(f, gamma)
    pi1 = paraproducts(m, f, fam).pi1
    sup = multiplier_sup(m)
    denominators = (sup * bessel_norm(f, s, p, w), sup * tl_norm(f, fam, s, p, q, w))
    if min(denominators) == 0:
        raise ParameterError("zero denominator: m or f vanishes")
    return Pi1Bound(
        bessel_norm(pi1, s, p, w) / denominators[0],
        tl_norm(pi1, fam, s, p, q, w) / denominators[1],
    )


def axis_restriction(m: SampledField) -> SampledField:
    """m along the last axis through x′ = 0, as a field on the 1-D grid."""
    grid = m.grid
    if grid.d == 1:
        return m
    line = GridSpec(1, grid.L, grid.N)
    return SampledField(line, m.values[grid.N // 2], m.r_value)


def multiplier_besov_factor(m: SampledField, K: int, r: float, mu: float) -> float:
    """‖m‖_{B^{(1+μ)/r}_{r,∞}(ℝ, w_μ)} of the last-axis profile of m."""
    line = axis_restriction(m)
    fam = build_family(line.grid, K)
    w = None if mu == 0 else cell_averaged_weight(line.grid, mu)
    return besov_norm(line, fam, (1 + mu) / r, r, np.inf, w)


@dataclass(frozen=True)
class Pi23Bound:
    pi2: float
    pi3: float
    m_factor: float
    """The Besov factor of m on the last axis."""


def pi23_bound_check(
    m: SampledField,
    f: SampledField,
    fam: DyadicFamily,
    s: float,
    p: float,
    gamma: float,
    r: float,
    mu: float,
) -> Pi23Bound:
    """‖Π_i‖_{F^s_{p,1}(w_γ)} / (‖m‖_{B^{(1+μ)/r}_{r,∞}(w_μ)} ‖f‖_{F^s_{p,∞}(w_γ)}), i = 2, 3."""
    if not 1 < r < np.inf:
        raise ParameterError(f"r must lie in (1, ∞), got {r}")
    if not -1 < mu < r - 1:
        raise ParameterError(f"mu must lie in (-1, r-1), got mu={mu}, r={r}")
    w = weight_for(f, gamma)
    triple = paraproducts(m, f, fam)
    factor = multiplier_besov_factor(m, fam.K, r, mu)
    denominator = factor * tl_norm(f, fam, s, p, np.inf, w)
    if denominator == 0:
        raise ParameterError("zero denominator: m or f vanishes")
    return Pi23Bound(
        tl_norm(triple.pi2, fam, s, p, 1.0, w) / denominator,
        tl_norm(triple.pi3, fam, s, p, 1.0, w) / denominator,
        factor,
    )
