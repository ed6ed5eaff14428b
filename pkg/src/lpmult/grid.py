"""Periodic grids, unitary discrete Fourier transforms and seeded test-function families.

ℝ^d is approximated by the torus [−L, L)^d sampled at x_j = −L + j·h, h = 2L/N. The
frequency lattice is ξ_j = πj/L for j ∈ [−N/2, N/2), stored in FFT order. The last axis
carries the weight coordinate t; in d = 2 the first axis is x′.

The transform is normalized so that

    f̂(ξ_k) = N^{−d/2} Σ_j f(x_j) e^{−iξ_k·x_j},

which makes Parseval an exact identity and gives a Kronecker delta at the origin a
constant spectrum.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum, auto
from functools import cached_property
from typing import Mapping, Optional, Tuple, Union

import numpy as np

from lpmult import _utils
from lpmult.exceptions import GridMismatchError, ParameterError
from lpmult.lptyping import (
    ComplexArray,
    FloatArray,
    Frequencies,
    IntArray,
    SeedLike,
    Symbol,
)

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """A periodic sampling grid on the box [−L, L)^d with N points per axis."""

    d: int
    """Spatial dimension, 1 or 2."""

    L: float
    """Box half-width."""

    N: int
    """Samples per axis, a power of two."""

    def __post_init__(self) -> None:
        if self.d not in (1, 2):
            raise ParameterError(f"d must be 1 or 2, got {self.d}")
        if not isinstance(self.N, (int, np.integer)) or not _utils.is_power_of_two(
            int(self.N)
        ):
            raise ParameterError(f"N must be power of two, got {self.N}")
        if self.N < 8:
            raise ParameterError(f"N must be at least 8, got {self.N}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ParameterError(f"L must be positive and finite, got {self.L}")

    @property
    def h(self) -> float:
        """Grid spacing 2L/N."""
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def xi_max(self) -> float:
        """Largest lattice frequency modulus along an axis, πN/(2L)."""
        return np.pi * self.N / (2.0 * self.L)

    @property
    def origin_index(self) -> Tuple[int, ...]:
        """Index of the grid point x = 0."""
        return (self.N // 2,) * self.d

    @cached_property
    def axis(self) -> FloatArray:
        """Sample positions along one axis."""
        return -self.L + self.h * np.arange(self.N, dtype=np.float64)

    @cached_property
    def wavenumbers(self) -> IntArray:
        """Integer wavenumbers j along one axis in FFT order."""
        return np.rint(np.fft.fftfreq(self.N, 1.0 / self.N)).astype(np.int64)

    @cached_property
    def axis_frequencies(self) -> FloatArray:
        return np.pi * self.wavenumbers.astype(np.float64) / self.L

    @cached_property
    def coordinates(self) -> Tuple[FloatArray, ...]:
        return tuple(np.meshgrid(*([self.axis] * self.d), indexing="ij"))

    @cached_property
    def frequencies(self) -> Frequencies:
        return tuple(np.meshgrid(*([self.axis_frequencies] * self.d), indexing="ij"))

    @cached_property
    def abs_frequency(self) -> FloatArray:
        """|ξ| on the lattice."""
        return np.sqrt(sum(xi**2 for xi in self.frequencies))

    @cached_property
    def phase(self) -> FloatArray:
        """(−1)^{j_1+…+j_d}, relating the FFT to samples starting at −L."""
        total = sum(np.meshgrid(*([self.wavenumbers] * self.d), indexing="ij"))
        return np.where(total % 2 == 0, 1.0, -1.0)

    @property
    def t(self) -> FloatArray:
        """The weight coordinate (last axis) on the grid."""
        return self.coordinates[-1]

    def refined(self, factor: int = 2) -> GridSpec:
        return GridSpec(self.d, self.L, self.N * factor)


class SampledField:
    """A function ℝ^d → ℂ^n sampled on a periodic grid.

    Values are normed pointwise by the ℓ^{r_value} norm of ℂ^n; n = 1 is the scalar case.
    Instances are immutable.
    """

    def __init__(self, grid: GridSpec, values: object, r_value: float = 2.0) -> None:
        arr = np.array(values, dtype=np.complex128)
        if arr.shape == grid.shape:
            arr = arr[..., np.newaxis]
        if arr.ndim != grid.d + 1 or arr.shape[:-1] != grid.shape:
            raise GridMismatchError(
                f"values of shape {arr.shape} do not fit a grid of shape {grid.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ParameterError("field values must be finite")
        if not r_value >= 1:
            raise ParameterError(f"value norm exponent must be in [1, ∞], got {r_value}")
        arr.setflags(write=False)
        self._grid = grid
        self._values: ComplexArray = arr
        self._r_value = float(r_value)

    @classmethod
    def zeros(cls, grid: GridSpec, n: int = 1, r_value: float = 2.0) -> SampledField:
        return cls(grid, np.zeros(grid.shape + (n,)), r_value)

    @property
    def grid(self) -> GridSpec:
        return self._grid

    @property
    def values(self) -> ComplexArray:
        """Samples of shape `grid.shape + (n,)`."""
        return self._values

    @property
    def r_value(self) -> float:
        return self._r_value

    @property
    def n(self) -> int:
        return self._values.shape[-1]

    @property
    def flat(self) -> ComplexArray:
        """Samples as an (N^d, n) array."""
        return self._values.reshape(-1, self.n)

    def value_norm(self) -> FloatArray:
        """Pointwise ℓ^{r_value} norm, an array of shape `grid.shape`."""
        return value_norm(self._values, self._r_value)

    def with_values(self, values: object) -> SampledField:
        return SampledField(self._grid, values, self._r_value)

    def component(self, i: int) -> SampledField:
        return SampledField(self._grid, self._values[..., i], self._r_value)

    def _check_compatible(self, other: SampledField) -> None:
        if other.grid != self._grid:
            raise GridMismatchError(f"grids differ: {self._grid} vs {other.grid}")
        if other.n != self.n:
            raise GridMismatchError(f"value dimensions differ: {self.n} vs {other.n}")

    def __add__(self, other: SampledField) -> SampledField:
        self._check_compatible(other)
        return self.with_values(self._values + other.values)

    def __sub__(self, other: SampledField) -> SampledField:
        self._check_compatible(other)
        return self.with_values(self._values - other.values)

    def __mul__(self, alpha: complex) -> SampledField:
        return self.with_values(alpha * self._values)

    __rmul__ = __mul__

    def __neg__(self) -> SampledField:
        return self.with_values(-self._values)

    def __repr__(self) -> str:
        return f"SampledField(grid={self._grid}, n={self.n}, r_value={self._r_value})"


class SpectralField:
    """Coefficients of a `SampledField` on the frequency lattice, in FFT order."""

    def __init__(self, grid: GridSpec, values: ComplexArray, r_value: float = 2.0) -> None:
        self._grid = grid
        self._values = values
        self._r_value = r_value

    @property
    def grid(self) -> GridSpec:
        return self._grid

    @property
    def values(self) -> ComplexArray:
        return self._values

    @property
    def r_value(self) -> float:
        return self._r_value

    @property
    def n(self) -> int:
        return self._values.shape[-1]

    def energy(self) -> float:
        """Spectral ℓ² energy Σ|f̂|², equal to the spatial Σ|f|² by Parseval."""
        return float(np.sum(np.abs(self._values) ** 2))


def value_norm(values: ComplexArray, r_value: float) -> FloatArray:
    """ℓ^r norm over the trailing value axis."""
    if values.shape[-1] == 1:
        return np.abs(values[..., 0])
    return np.linalg.norm(values, ord=r_value, axis=-1)


def make_grid(d: int, L: float, N: int) -> GridSpec:
    grid = GridSpec(d, float(L), N)
    _logger.debug(f"Grid d={d} L={L} N={N}, xi_max={grid.xi_max:.4g}")
    return grid


def dft(f: SampledField) -> SpectralField:
    grid = f.grid
    axes = tuple(range(grid.d))
    spectrum = np.fft.fftn(f.values, axes=axes, norm="ortho") * grid.phase[..., np.newaxis]
    return SpectralField(grid, spectrum, f.r_value)


def idft(spectrum: SpectralField) -> SampledField:
    grid = spectrum.grid
    axes = tuple(range(grid.d))
    values = np.fft.ifftn(
        spectrum.values * grid.phase[..., np.newaxis], axes=axes, norm="ortho"
    )
    return SampledField(grid, values, spectrum.r_value)


def direct_dft(f: SampledField) -> SpectralField:
    """The transform by explicit O(N^{2d}) summation, an oracle for `dft`."""
    grid = f.grid
    kernel = np.exp(-1j * np.outer(grid.axis_frequencies, grid.axis)) / np.sqrt(grid.N)
    out = f.values
    for axis in range(grid.d):
        out = np.moveaxis(np.tensordot(kernel, out, axes=([1], [axis])), 0, axis)
    return SpectralField(grid, out, f.r_value)


def evaluate_symbol(symbol: Symbol, grid: GridSpec, n: int = 1) -> ComplexArray:
    """Sample a symbol on the lattice as an array broadcastable against `grid.shape + (n,)`.

    Scalar symbols come back with a trailing axis of length 1, diagonal symbols with length n.
    """
    raw = symbol(grid.frequencies) if callable(symbol) else symbol
    sym = np.asarray(raw, dtype=np.complex128)
    if sym.ndim == 0:
        sym = np.full(grid.shape + (1,), sym)
    elif sym.shape == grid.shape:
        sym = sym[..., np.newaxis]
    elif sym.shape != grid.shape + (n,):
        raise GridMismatchError(
            f"symbol of shape {sym.shape} fits neither {grid.shape} nor {grid.shape + (n,)}"
        )
    if not np.all(np.isfinite(sym)):
        raise ParameterError("symbol must be finite on the frequency lattice")
    return sym


def fourier_multiply(symbol: Symbol, f: SampledField) -> SampledField:
    """T_m f = ℱ^{−1}(m f̂) for a scalar or diagonal symbol m."""
    spectrum = dft(f)
    sym = evaluate_symbol(symbol, f.grid, f.n)
    return idft(SpectralField(f.grid, sym * spectrum.values, f.r_value))


def pointwise_multiply(m: SampledField, f: SampledField) -> SampledField:
    """Valuewise product of a scalar (n = 1) or diagonal multiplier with f."""
    if m.grid != f.grid:
        raise GridMismatchError(f"grids differ: {m.grid} vs {f.grid}")
    if m.n not in (1, f.n):
        raise GridMismatchError(
            f"multiplier must be scalar or diagonal of size {f.n}, got n={m.n}"
        )
    return f.with_values(m.values * f.values)


def refine(f: SampledField, factor: int = 2) -> SampledField:
    """Trigonometric interpolation of f onto a grid with `factor` times more points.

    The lattice spacing π/L is unchanged, so the spectrum is copied and zero padded.
    """
    if not _utils.is_power_of_two(factor):
        raise ParameterError(f"refinement factor must be a power of two, got {factor}")
    grid = f.grid
    fine = grid.refined(factor)
    coarse = dft(f).values
    padded = np.zeros(fine.shape + (f.n,), dtype=np.complex128)
    index = np.mod(grid.wavenumbers, fine.N)
    padded[np.ix_(*([index] * grid.d))] = coarse * factor ** (grid.d / 2)
    return idft(SpectralField(fine, padded, f.r_value))


class FamilyKind(Enum):
    """Test-function families for `sample_family`."""

    GAUSSIAN = auto()
    """e^{−|x − c e_t|²/(2 width²)}; params `center`, `width`."""
    MODULATED_GAUSSIAN = auto()
    """Gaussian times e^{i freq t}; params `center`, `width`, `freq`."""
    RANDOM_BANDLIMITED = auto()
    """Seeded trigonometric polynomial with spectrum in k_lo ≤ |ξ| ≤ k_hi; params `k_lo`, `k_hi`, `complex`."""
    INDICATOR_HALFSPACE = auto()
    """1 for t ≥ 0."""
    SMOOTH_CUTOFF = auto()
    """φ(|x|/scale) with φ = 1 on [0, 1] and 0 on [2, ∞); param `scale`."""
    CONCENTRATED_NEAR_HYPERPLANE = auto()
    """Plateau bump φ(|t|/scale), times φ(|x′|) in d = 2; param `scale`."""
    DUAL_JUMP = auto()
    """ℱ^{−1}[(1+|ξ|²)^{order/2} ℱ(1_{t≥0} · bump_scale)]; params `scale`, `order`."""
    CONSTANT = auto()
    """The constant `c`."""
    DELTA = auto()
    """Kronecker spike of height 1 at the origin."""
    SINGLE_MODE = auto()
    """Plane wave e^{i(freq t + freq_x x′)}; params `freq`, `freq_x`."""

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> FamilyKind:
        try:
            return cls[label.strip().upper()]
        except KeyError:
            raise ParameterError(f"unknown family kind '{label}'") from None


def sample_family(
    kind: Union[FamilyKind, str],
    params: Optional[Mapping[str, float]],
    grid: GridSpec,
    seed: SeedLike = 0,
    *,
    n: int = 1,
    r_value: float = 2.0,
) -> SampledField:
    """Sample a member of a test-function family on `grid`.

    Deterministic kinds are replicated across the n value components; random kinds draw
    independent components. The result is bit-deterministic in (kind, params, grid, seed).
    """
    if isinstance(kind, str):
        kind = FamilyKind.from_label(kind)
    p: Mapping[str, float] = {} if params is None else params
    if n < 1:
        raise ParameterError(f"value dimension must be positive, got {n}")
    t = grid.t
    match kind:
        case FamilyKind.GAUSSIAN | FamilyKind.MODULATED_GAUSSIAN:
            center = p.get("center", 0.0)
            width = p.get("width", 1.0)
            if width <= 0:
                raise ParameterError(f"width must be positive, got {width}")
            r2 = (t - center) ** 2
            if grid.d == 2:
                r2 = r2 + grid.coordinates[0] ** 2
            scalar = np.exp(-r2 / (2.0 * width**2)).astype(np.complex128)
            if kind is FamilyKind.MODULATED_GAUSSIAN:
                scalar = scalar * np.exp(1j * p.get("freq", 0.0) * t)
        case FamilyKind.RANDOM_BANDLIMITED:
            values = _random_bandlimited(p, grid, seed, n)
            return SampledField(grid, values, r_value)
        case FamilyKind.INDICATOR_HALFSPACE:
            scalar = (t >= 0).astype(np.complex128)
        case FamilyKind.SMOOTH_CUTOFF:
            scale = _positive(p.get("scale", 1.0), "scale")
            scalar = _utils.smooth_step(np.abs(t) / scale, 1.0, 2.0).astype(np.complex128)
        case FamilyKind.CONCENTRATED_NEAR_HYPERPLANE:
            scalar = _plateau_bump(grid, p.get("scale", 1.0)).astype(np.complex128)
        case FamilyKind.DUAL_JUMP:
            scale = p.get("scale", 1.0)
            order = p.get("order", 0.0)
            jump = SampledField(grid, (t >= 0) * _plateau_bump(grid, scale))
            lifted = fourier_multiply(
                (1.0 + grid.abs_frequency**2) ** (order / 2.0), jump
            )
            scalar = lifted.values[..., 0]
        case FamilyKind.CONSTANT:
            scalar = np.full(grid.shape, complex(p.get("c", 1.0)))
        case FamilyKind.DELTA:
            scalar = np.zeros(grid.shape, dtype=np.complex128)
            scalar[grid.origin_index] = 1.0
        case FamilyKind.SINGLE_MODE:
            phase = p.get("freq", 0.0) * t
            if grid.d == 2:
                phase = phase + p.get("freq_x", 0.0) * grid.coordinates[0]
            scalar = np.exp(1j * phase)
    values = np.repeat(scalar[..., np.newaxis], n, axis=-1)
    return SampledField(grid, values, r_value)


def _positive(value: float, name: str) -> float:
    if not value > 0:
        raise ParameterError(f"{name} must be positive, got {value}")
    return value


def _plateau_bump(grid: GridSpec, scale: float) -> FloatArray:
    bump = _utils.smooth_step(np.abs(grid.t) / _positive(scale, "scale"), 1.0, 2.0)
    if grid.d == 2:
        bump = bump * _utils.smooth_step(np.abs(grid.coordinates[0]), 1.0, 2.0)
    return bump


def band_lattice_points(grid: GridSpec, k_lo: float, k_hi: float) -> IntArray:
    """Integer lattice points j with k_lo ≤ π|j|/L ≤ k_hi, in lexicographic order.

    The list depends only on L and the band, not on N.
    """
    reach = int(np.floor(k_hi * grid.L / np.pi + 1e-9))
    ints = np.arange(-reach, reach + 1)
    points = np.stack(
        [axis.ravel() for axis in np.meshgrid(*([ints] * grid.d), indexing="ij")],
        axis=-1,
    )
    modulus = np.pi * np.sqrt(np.sum(points.astype(np.float64) ** 2, axis=-1)) / grid.L
    tol = 1e-12 * max(k_hi, 1.0)
    keep = (modulus >= k_lo - tol) & (modulus <= k_hi + tol)
    return points[keep]


def _random_bandlimited(
    params: Mapping[str, float], grid: GridSpec, seed: SeedLike, n: int
) -> ComplexArray:
    k_lo = params.get("k_lo", 0.0)
    k_hi = params.get("k_hi", 1.0)
    if k_lo < 0 or k_hi < k_lo:
        raise ParameterError(f"band needs 0 ≤ k_lo ≤ k_hi, got [{k_lo}, {k_hi}]")
    if k_hi > grid.xi_max:
        raise ParameterError(f"k_hi={k_hi} exceeds xi_max={grid.xi_max:.6g}")
    points = band_lattice_points(grid, k_lo, k_hi)
    if len(points) == 0:
        raise ParameterError(f"no lattice frequencies in band [{k_lo}, {k_hi}]")
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((len(points), n)) + 1j * rng.standard_normal(
        (len(points), n)
    )
    coeffs /= np.sqrt(np.sum(np.abs(coeffs) ** 2))
    spectrum = np.zeros(grid.shape + (n,), dtype=np.complex128)
    index = tuple(np.mod(points[:, axis], grid.N) for axis in range(grid.d))
    np.add.at(spectrum, index, coeffs * grid.N ** (grid.d / 2))
    values = idft(SpectralField(grid, spectrum)).values
    if params.get("complex", 0.0):
        return values
    return values.real.astype(np.complex128)


def padded_product_spectrum(a: SampledField, b: SampledField) -> SpectralField:
    """Spectrum of the valuewise product a·b computed on the doubled lattice.

    Both factors are interpolated first, so the product is free of wrap-around and its
    spectrum may extend past the original lattice.
    """
    return dft(pointwise_multiply(refine(a), refine(b)))


def outside_lattice_fraction(spectrum: SpectralField, grid: GridSpec) -> float:
    """Fraction of spectral energy that a field on `grid` cannot represent."""
    inside = np.ones(spectrum.grid.shape, dtype=bool)
    wn = spectrum.grid.wavenumbers
    half = grid.N // 2
    for ax in range(grid.d):
        shape = [1] * grid.d
        shape[ax] = spectrum.grid.N
        inside = inside & ((wn >= -half) & (wn < half)).reshape(shape)
    energy = np.sum(np.abs(spectrum.values) ** 2, axis=-1)
    total = float(np.sum(energy))
    if total == 0:
        return 0.0
    return float(np.sum(energy[~inside])) / total


def out_of_band_fraction(f: SampledField, lo: float, hi: float) -> float:
    """Share of the spectral energy of f outside lo ≤ |ξ| ≤ hi."""
    rho = f.grid.abs_frequency
    slack = 1e-9 * max(hi, 1.0)
    energy = np.sum(np.abs(dft(f).values) ** 2, axis=-1)
    total = float(np.sum(energy))
    if total == 0:
        return 0.0
    outside = (rho < lo - slack) | (rho > hi + slack)
    return float(np.sum(energy[outside])) / total
