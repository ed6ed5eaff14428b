from typing import Callable

import numpy as np
import pytest

from lpmult.dyadic import DyadicFamily, build_family
from lpmult.exceptions import ParameterError
from lpmult.grid import FamilyKind, GridSpec, SampledField, sample_family
from lpmult.norms import (
    Randomization,
    SpaceKind,
    SpaceSpec,
    besov_norm,
    bessel_norm,
    derivative_norm,
    holder_norm,
    multi_indices,
    randomized_norm,
    sobolev_norm,
    space_norm,
    tl_norm,
    weight_for,
)
from lpmult.weights import weighted_lp_norm

Sampler = Callable[[GridSpec, int, float], SampledField]


class TestSquareFunction:
    @staticmethod
    @pytest.mark.parametrize("s", [-0.5, 0.0, 0.7])
    def test_exact_randomization_matches_triebel_lizorkin(
        fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler, s: float
    ):
        for seed in range(20):
            f = bandlimited(grid, seed, 0.8)
            exact = randomized_norm(f, fam, s, 2.0, mode=Randomization.EXACT_P2)
            assert exact == pytest.approx(tl_norm(f, fam, s, 2.0, 2.0), rel=1e-10)

    @staticmethod
    def test_monte_carlo_approaches_exact(fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler):
        f = bandlimited(grid, 30, 0.8)
        exact = randomized_norm(f, fam, 0.3, 2.0, mode=Randomization.EXACT_P2)
        sampled = randomized_norm(f, fam, 0.3, 2.0, samples=4096, seed=1)
        assert sampled == pytest.approx(exact, rel=0.03)

    @staticmethod
    def test_monte_carlo_is_seeded(fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler):
        f = bandlimited(grid, 31, 0.8)
        a = randomized_norm(f, fam, 0.3, 3.0, samples=64, seed=2)
        b = randomized_norm(f, fam, 0.3, 3.0, samples=64, seed=2)
        assert a == b

    @staticmethod
    @pytest.mark.parametrize("s,p,gamma", [(0.3, 3.0, 0.0), (0.5, 2.0, 0.5), (-0.3, 1.5, -0.5)])
    def test_monte_carlo_brackets_bessel(
        fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler, s: float, p: float, gamma: float
    ):
        f = bandlimited(grid, 32, 0.8)
        w = weight_for(f, gamma)
        ratio = randomized_norm(f, fam, s, p, w, samples=256) / bessel_norm(f, s, p, w)
        assert 1 / 3 <= ratio <= 3

    @staticmethod
    def test_exact_mode_needs_p2(fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler):
        with pytest.raises(ParameterError, match="p = 2"):
            randomized_norm(bandlimited(grid, 1, 0.8), fam, 0.0, 3.0, mode=Randomization.EXACT_P2)


@pytest.mark.parametrize("p,gamma", [(1.5, 0.0), (3.0, 0.5), (2.0, -0.5)])
def test_p_equals_q_collapse(
    fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler, p: float, gamma: float
):
    for seed in range(5):
        f = bandlimited(grid, seed, 0.8)
        w = weight_for(f, gamma)
        assert tl_norm(f, fam, 0.3, p, p, w) == pytest.approx(
            besov_norm(f, fam, 0.3, p, p, w), rel=1e-10
        )


@pytest.mark.parametrize("p,q,gamma", [(2.0, 1.0, 0.0), (2.0, 4.0, 0.5), (3.0, 1.5, -0.5), (1.5, np.inf, 0.0)])
def test_besov_brackets_triebel_lizorkin(
    fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler, p: float, q: float, gamma: float
):
    for seed in range(5):
        f = bandlimited(grid, 40 + seed, 0.8)
        w = weight_for(f, gamma)
        tl = tl_norm(f, fam, 0.3, p, q, w)
        assert besov_norm(f, fam, 0.3, p, min(p, q), w) >= tl * (1 - 1e-12)
        assert tl >= besov_norm(f, fam, 0.3, p, max(p, q), w) * (1 - 1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 4.0])
def test_lp_norm_of_one(grid: GridSpec, p: float):
    one = sample_family(FamilyKind.CONSTANT, {"c": 1.0}, grid)
    assert space_norm(one, SpaceSpec(SpaceKind.LP, p=p)) == pytest.approx(
        (2 * grid.L) ** (1 / p), rel=1e-12
    )


class TestSingleMode:
    xi = np.pi / 4

    @staticmethod
    def mode(grid: GridSpec) -> SampledField:
        return sample_family(FamilyKind.SINGLE_MODE, {"freq": TestSingleMode.xi}, grid)

    @staticmethod
    @pytest.mark.parametrize("s,p", [(0.5, 2.0), (-1.0, 3.0), (2.0, 1.5)])
    def test_bessel(grid: GridSpec, s: float, p: float):
        expected = (1 + TestSingleMode.xi**2) ** (s / 2) * (2 * grid.L) ** (1 / p)
        f = TestSingleMode.mode(grid)
        assert bessel_norm(f, s, p) == pytest.approx(expected, rel=1e-10)

    @staticmethod
    @pytest.mark.parametrize("p", [2.0, 3.0])
    def test_sobolev(grid: GridSpec, p: float):
        expected = ((1 + TestSingleMode.xi**p) * 2 * grid.L) ** (1 / p)
        f = TestSingleMode.mode(grid)
        assert sobolev_norm(f, 1, p) == pytest.approx(expected, rel=1e-10)
        assert sobolev_norm(f, 0, p) == pytest.approx(weighted_lp_norm(f, p), rel=1e-12)

    @staticmethod
    def test_derivative_norm(grid: GridSpec):
        f = TestSingleMode.mode(grid)
        xi = TestSingleMode.xi
        expected = (1 + xi) * (1 + xi**2) ** -0.5 * (2 * grid.L) ** 0.5
        assert derivative_norm(f, 0.0, 2.0) == pytest.approx(expected, rel=1e-10)


def test_multi_indices():
    assert list(multi_indices(1, 2)) == [(0,), (1,), (2,)]
    assert len(list(multi_indices(2, 2))) == 6


def test_holder_norm_of_constant(grid: GridSpec):
    one = sample_family(FamilyKind.CONSTANT, {"c": 1.0}, grid)
    assert holder_norm(one, 0.5) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ParameterError):
        holder_norm(one, -0.5)


class TestSpaceSpec:
    @staticmethod
    @pytest.mark.parametrize(
        "token,kind", [("L", SpaceKind.LP), ("H", SpaceKind.BESSEL), ("B2", SpaceKind.BESOV), ("F1", SpaceKind.TRIEBEL_LIZORKIN), ("W1", SpaceKind.SOBOLEV)]
    )
    def test_tokens(token: str, kind: SpaceKind):
        space = SpaceSpec.from_token(token, 0.3, 2.0, 0.5)
        assert space.kind is kind
        assert space.token == token

    @staticmethod
    def test_infinite_q():
        space = SpaceSpec.from_token("Finf")
        assert space.q == np.inf
        assert space.token == "Finf"

    @staticmethod
    @pytest.mark.parametrize("token", ["X", "B", "Hx", "W0.5"])
    def test_unknown_tokens(token: str):
        with pytest.raises(ParameterError, match="unknown space"):
            SpaceSpec.from_token(token)

    @staticmethod
    def test_parameter_ranges():
        with pytest.raises(ParameterError, match="p must"):
            SpaceSpec(SpaceKind.LP, p=1.0)
        with pytest.raises(ParameterError, match="q must"):
            SpaceSpec(SpaceKind.BESOV, q=0.5)
        with pytest.raises(ParameterError, match="band constant"):
            SpaceSpec(SpaceKind.SEQ_LP_A, A=0.5)

    @staticmethod
    def test_besov_needs_family(grid: GridSpec):
        with pytest.raises(ParameterError, match="dyadic family"):
            space_norm(SampledField.zeros(grid), SpaceSpec(SpaceKind.BESOV))


@pytest.mark.parametrize("token", ["L", "H", "W1", "B2", "Binf", "F1", "Finf"])
@pytest.mark.parametrize("p,gamma", [(1.5, -0.5), (3.0, 0.5)])
def test_norm_axioms(fam: DyadicFamily, grid: GridSpec, bandlimited: Sampler, token: str, p: float, gamma: float):
    space = SpaceSpec.from_token(token, 0.3, p, gamma)
    f = bandlimited(grid, 50, 0.8)
    g = bandlimited(grid, 51, 0.8)
    norm_f = space_norm(f, space, fam)
    assert space_norm(-2.5j * f, space, fam) == pytest.approx(2.5 * norm_f, rel=1e-12)
    assert space_norm(f + g, space, fam) <= (norm_f + space_norm(g, space, fam)) * (1 + 1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_monte_carlo_bracket_is_stable_under_refinement(p: float):
    ratios = []
    for N in (512, 2048):
        grid = GridSpec(1, 16.0, N)
        f = sample_family(FamilyKind.RANDOM_BANDLIMITED, {"k_lo": 0.0, "k_hi": 12.0}, grid, 21)
        w = weight_for(f, 0.5)
        ratios.append(randomized_norm(f, build_family(grid), 0.3, p, w, samples=256) / bessel_norm(f, 0.3, p, w))
    assert all(1 / 3 <= ratio <= 3 for ratio in ratios)
    assert ratios[1] == pytest.approx(ratios[0], rel=0.25)
