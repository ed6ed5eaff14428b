import numpy as np
import pytest

from lpmult.exceptions import GridMismatchError, ParameterError, WeightError
from lpmult.grid import GridSpec, SampledField
from lpmult.weights import (
    WeightKind,
    ap_constant,
    ap_constant_exhaustive,
    cell_averaged_weight,
    dual_exponents,
    in_ap,
    interval_average,
    mixed_norm,
    weighted_lp_norm,
)


def test_in_ap():
    assert in_ap(2.0, 0.5)
    assert in_ap(2.0, -0.5)
    assert not in_ap(2.0, 1.2)
    assert not in_ap(2.0, -1.0)
    assert in_ap(2.0, -1.5, WeightKind.RADIAL, d=2)
    assert not in_ap(2.0, 2.5, WeightKind.RADIAL, d=2)
    with pytest.raises(ParameterError):
        in_ap(1.0, 0.0)


@pytest.mark.parametrize("p,gamma", [(1.5, -0.5), (2.0, 0.5), (3.0, 1.7)])
def test_dual_exponents(p: float, gamma: float):
    dual = dual_exponents(p, gamma)
    assert dual.p_prime == pytest.approx(p / (p - 1))
    assert abs(dual.identity_residual) < 1e-14


@pytest.mark.parametrize("gamma", [-0.5, 0.0, 0.5, 2.0])
def test_interval_average(gamma: float):
    a = np.array([0.0, -1.0])
    b = np.array([1.0, 1.0])
    assert np.allclose(interval_average(a, b, gamma), 1.0 / (gamma + 1))


def test_non_integrable_weight(grid: GridSpec):
    with pytest.raises(WeightError, match="not locally integrable"):
        cell_averaged_weight(grid, -1.2)
    clamped = cell_averaged_weight(grid, -1.2, clamp=True)
    assert np.all(np.isfinite(clamped.cell_avg))


@pytest.mark.parametrize("gamma,p", [(0.5, 2.0), (-0.5, 1.5), (1.5, 3.0)])
def test_weighted_norm_of_constant(grid: GridSpec, gamma: float, p: float):
    one = SampledField(grid, np.ones(grid.N))
    w = cell_averaged_weight(grid, gamma)
    integral = 2.0 * grid.L ** (gamma + 1) / (gamma + 1)
    assert weighted_lp_norm(one, p, w) == pytest.approx(integral ** (1 / p), rel=1e-12)
    assert weighted_lp_norm(one, p) == pytest.approx((2 * grid.L) ** (1 / p), rel=1e-12)


@pytest.mark.parametrize("gamma,p", [(0.0, 1.0), (0.5, 2.0), (-0.5, 1.5), (1.5, 4.0), (0.5, np.inf)])
def test_weighted_norm_is_a_norm(grid: GridSpec, gamma: float, p: float):
    rng = np.random.default_rng(17)
    shape = (grid.N, 2)
    f, g = (SampledField(grid, rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) for _ in range(2))
    w = cell_averaged_weight(grid, gamma)
    norm_f = weighted_lp_norm(f, p, w)
    assert weighted_lp_norm(3.0j * f, p, w) == pytest.approx(3.0 * norm_f, rel=1e-12)
    assert weighted_lp_norm(f + g, p, w) <= (norm_f + weighted_lp_norm(g, p, w)) * (1 + 1e-12)


def test_radial_origin_cell():
    grid = GridSpec(2, 4.0, 16)
    w = cell_averaged_weight(grid, 1.0, WeightKind.RADIAL)
    mid = grid.N // 2
    exact = grid.h * (np.sqrt(2) + np.arcsinh(1.0)) / 3
    assert w.cell_avg[mid, mid] == pytest.approx(exact, rel=1e-10)
    flat = cell_averaged_weight(grid, 0.0, WeightKind.RADIAL)
    assert np.allclose(flat.cell_avg, 1.0)


def test_weight_on_other_grid(grid: GridSpec):
    f = SampledField(grid, np.ones(grid.N))
    w = cell_averaged_weight(GridSpec(1, grid.L, 2 * grid.N), 0.5)
    with pytest.raises(GridMismatchError):
        weighted_lp_norm(f, 2.0, w)


def test_mixed_norm_needs_two_dimensions(grid: GridSpec):
    with pytest.raises(ParameterError, match="d = 2"):
        mixed_norm(SampledField(grid, np.ones(grid.N)), 2.0, 3.0)


def test_mixed_norm_of_constant(grid2: GridSpec):
    one = SampledField(grid2, np.ones(grid2.shape))
    inner = (2 * grid2.L) ** (1 / 3)
    assert mixed_norm(one, 2.0, 3.0) == pytest.approx(inner * (2 * grid2.L) ** 0.5, rel=1e-12)


class TestApConstant:
    @staticmethod
    @pytest.mark.parametrize("p,gamma", [(2.0, 0.5), (2.0, -0.5), (3.0, 1.5)])
    def test_finite_and_stable_inside(p: float, gamma: float):
        values = [
            ap_constant(cell_averaged_weight(GridSpec(1, 16.0, N), gamma), p) for N in (256, 1024)
        ]
        assert all(np.isfinite(values))
        assert values[1] == pytest.approx(values[0], rel=0.1)

    @staticmethod
    def test_dual_not_integrable_is_infinite():
        w = cell_averaged_weight(GridSpec(1, 16.0, 256), 1.2)
        assert ap_constant(w, 2.0) == np.inf

    @staticmethod
    @pytest.mark.parametrize("gamma", [1.2, -1.2])
    def test_clamped_estimate_grows(gamma: float):
        values = [
            ap_constant(cell_averaged_weight(GridSpec(1, 16.0, N), gamma, clamp=True), 2.0, clamp=True)
            for N in (256, 1024)
        ]
        assert values[1] >= 1.25 * values[0]

    @staticmethod
    @pytest.mark.parametrize("p,gamma", [(2.0, 0.5), (2.0, -0.5), (3.0, 1.5)])
    def test_dyadic_within_factor_of_exhaustive(p: float, gamma: float):
        w = cell_averaged_weight(GridSpec(1, 16.0, 256), gamma)
        dyadic = ap_constant(w, p)
        exhaustive = ap_constant_exhaustive(w, p)
        assert dyadic <= exhaustive * (1 + 1e-12)
        assert exhaustive <= 4 * dyadic
