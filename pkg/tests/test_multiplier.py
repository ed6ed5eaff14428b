import numpy as np
import pytest

from lpmult import Workbench
from lpmult.dyadic import DyadicFamily, build_family, max_level
from lpmult.exceptions import ParameterError, WeightError
from lpmult.grid import FamilyKind, GridSpec, sample_family
from lpmult.multiplier import (
    SelectionRule,
    Stability,
    admissible,
    admissible_range,
    algebra_check,
    classify_slope,
    growth_slope,
    holder_multiplier_check,
    indicator_besov_audit,
    multiplier_ratio,
    select_r_mu,
    type_embedding_check,
)
from lpmult.norms import SpaceKind, SpaceSpec


class TestAdmissible:
    @staticmethod
    @pytest.mark.parametrize(
        "s,p,gamma,lo,hi,inside",
        [(0.3, 2.0, 0.0, -0.5, 0.5, True), (0.6, 2.0, 0.5, -0.25, 0.75, True), (0.5, 2.0, 0.0, -0.5, 0.5, False)],
    )
    def test_examples(s: float, p: float, gamma: float, lo: float, hi: float, inside: bool):
        rng, ok = admissible(s, p, gamma)
        assert rng.s_lo == pytest.approx(lo)
        assert rng.s_hi == pytest.approx(hi)
        assert ok is inside

    @staticmethod
    @pytest.mark.parametrize("p,gamma", [(1.5, -0.5), (2.0, 0.9), (3.0, 1.5), (4.0, -0.9)])
    def test_width_is_one(p: float, gamma: float):
        rng = admissible_range(p, gamma)
        assert rng.width == pytest.approx(1.0, abs=1e-14)
        assert rng.s_lo < 0 < rng.s_hi
        assert rng.distance(0.0) > 0

    @staticmethod
    def test_weight_outside_ap():
        with pytest.raises(WeightError, match="weight not A_p"):
            admissible(0.3, 2.0, 1.5)


class TestSelection:
    @staticmethod
    def test_middle_case():
        sel = select_r_mu(0.3, 2.0, 0.0)
        assert sel.case == "middle"
        assert 1 < sel.r < 10 / 3
        assert sel.mu == 0.0
        assert select_r_mu(0.0, 2.0, 0.0).mu == 0.0

    @staticmethod
    def test_upper_case():
        sel = select_r_mu(0.6, 2.0, 0.5, 0.05)
        assert sel.case == "upper"
        assert sel.r == pytest.approx(1.95)
        assert sel.mu / sel.r == pytest.approx(0.15)
        assert sel.sigma == pytest.approx((1 + sel.mu) / sel.r)

    @staticmethod
    def test_lower_case():
        sel = select_r_mu(-0.6, 2.0, -0.5, 0.05)
        assert sel.case == "lower"
        assert -1 < sel.mu < sel.r - 1

    @staticmethod
    @pytest.mark.parametrize("rule", list(SelectionRule))
    def test_rules_keep_mu_in_range(rule: SelectionRule):
        for s in (-0.6, -0.2, 0.0, 0.2, 0.6):
            sel = select_r_mu(s, 2.0, 0.5 if s > 0 else -0.5, rule=rule)
            assert -1 < sel.mu < sel.r - 1

    @staticmethod
    def test_rejections():
        with pytest.raises(ParameterError, match="outside the admissible range"):
            select_r_mu(0.6, 2.0, 0.0)
        with pytest.raises(ParameterError, match="eps"):
            select_r_mu(0.3, 2.0, 0.0, eps=0.0)


class TestIndicatorAudit:
    grid = GridSpec(1, 16.0, 1024)

    @staticmethod
    @pytest.mark.parametrize(
        "p,gamma",
        [(p, gamma) for p in (1.5, 2.0, 3.0) for gamma in (-0.5, 0.0, 0.5) if gamma < p - 1],
    )
    def test_indicator_plateaus(p: float, gamma: float):
        grid = TestIndicatorAudit.grid
        fam = build_family(grid, max_level(grid) - 1)
        audit = indicator_besov_audit(p, gamma, fam)
        assert len(audit.levels) == fam.K + 1
        assert audit.flatness(3) <= 0.2
        assert np.isfinite(audit.sup)

    @staticmethod
    @pytest.mark.parametrize("p,gamma", [(2.0, 0.0), (2.0, 0.5), (3.0, -0.5)])
    def test_gaussian_decays(p: float, gamma: float):
        fam = build_family(TestIndicatorAudit.grid, 4)
        audit = indicator_besov_audit(p, gamma, fam, smooth=True)
        assert np.all(audit.log_increments()[1:4] <= -1.0)

    @staticmethod
    def test_audit_checks(fam: DyadicFamily):
        with pytest.raises(WeightError):
            indicator_besov_audit(2.0, 1.5, fam)
        with pytest.raises(ParameterError):
            indicator_besov_audit(2.0, 0.0, fam).flatness(1)


class TestMultiplierRatio:
    @staticmethod
    @pytest.mark.parametrize("token", ["H", "B2", "F1", "Finf"])
    def test_unit_multiplier(fam: DyadicFamily, grid: GridSpec, token: str):
        one = sample_family(FamilyKind.CONSTANT, {"c": 1.0}, grid)
        f = sample_family(FamilyKind.GAUSSIAN, {"width": 0.7}, grid)
        space = SpaceSpec.from_token(token, 0.3, 2.0, 0.5)
        assert multiplier_ratio(one, f, space, fam) == 1.0

    @staticmethod
    @pytest.mark.parametrize("token", ["H", "B2", "F2"])
    def test_away_from_jump(workbench: Workbench, token: str):
        f = workbench.sample("gaussian", {"center": 2.0, "width": 0.5})
        assert workbench.multiplier_ratio(f, token, s=0.3, p=2.0) == pytest.approx(1.0, rel=0.1)

    @staticmethod
    def test_concentrated_at_jump_is_finite(workbench: Workbench):
        f = workbench.sample("concentrated_near_hyperplane", {"scale": 0.5})
        ratio = workbench.multiplier_ratio(f, "H", s=0.3)
        assert np.isfinite(ratio) and 0 < ratio < 10

    @staticmethod
    def test_rejections(fam: DyadicFamily, grid: GridSpec):
        f = sample_family(FamilyKind.GAUSSIAN, None, grid)
        with pytest.raises(ParameterError, match="H, B and F"):
            multiplier_ratio(f, f, SpaceSpec(SpaceKind.LP), fam)
        with pytest.raises(ParameterError, match="zero denominator"):
            multiplier_ratio(f, f.with_values(np.zeros_like(f.values)), SpaceSpec(SpaceKind.BESSEL))


class TestMultiplierEstimates:
    @staticmethod
    @pytest.mark.parametrize("s", [0.3, -0.3])
    def test_holder_unit_multiplier(fam: DyadicFamily, grid: GridSpec, s: float):
        one = sample_family(FamilyKind.CONSTANT, {"c": 1.0}, grid)
        f = sample_family(FamilyKind.GAUSSIAN, {"width": 0.7}, grid)
        ratios = holder_multiplier_check(one, f, fam, s, 2.0, 0.5, 0.5)
        assert ratios.bessel == pytest.approx(1.0, rel=1e-12)
        assert ratios.max() == pytest.approx(1.0, rel=1e-12)

    @staticmethod
    def test_holder_gaussian_bounded(fam: DyadicFamily, grid: GridSpec):
        m = sample_family(FamilyKind.GAUSSIAN, {"width": 2.0}, grid)
        f = sample_family(FamilyKind.GAUSSIAN, {"center": 1.0, "width": 0.7}, grid)
        ratios = holder_multiplier_check(m, f, fam, 0.3, 2.0, 0.0, 0.5)
        assert 0 < ratios.max() < 5
        with pytest.raises(ParameterError, match="sigma > \\|s\\|"):
            holder_multiplier_check(m, f, fam, 0.6, 2.0, 0.0, 0.5)

    @staticmethod
    def test_algebra(grid: GridSpec):
        g = sample_family(FamilyKind.GAUSSIAN, {"width": 0.7}, grid)
        one = sample_family(FamilyKind.CONSTANT, {"c": 1.0}, grid)
        assert 0 < algebra_check(g, g, 0.5, 2.0, 0.0) < 5
        assert algebra_check(one, g, 0.5, 2.0, 0.0) < 1
        with pytest.raises(ParameterError, match="s > 0"):
            algebra_check(g, g, 0.0, 2.0, 0.0)

    @staticmethod
    def test_type_embedding_single_block(fam: DyadicFamily, grid: GridSpec):
        # ξ = π sits where only the second-level band equals one.
        f = sample_family(FamilyKind.SINGLE_MODE, {"freq": np.pi}, grid)
        report = type_embedding_check(f, fam, 0.0, 2.0, 0.0)
        assert report.tl_tau == pytest.approx(report.bessel, rel=1e-12)
        assert report.tl_q == pytest.approx(report.bessel, rel=1e-12)

    @staticmethod
    def test_type_embedding_vector_values(fam: DyadicFamily, grid: GridSpec):
        params = {"k_lo": 0.0, "k_hi": 20.0}
        f = sample_family(FamilyKind.RANDOM_BANDLIMITED, params, grid, 3, n=3, r_value=4.0)
        report = type_embedding_check(f, fam, 0.3, 2.0, 0.0)
        assert (report.tau, report.q) == (2.0, 4.0)
        assert report.tl_tau >= report.tl_q
        assert np.isfinite(report.lower_ratio) and np.isfinite(report.upper_ratio)


class TestSlopes:
    @staticmethod
    def test_classification():
        assert classify_slope(0.05) is Stability.STABLE
        assert classify_slope(0.35) is Stability.GROWTH
        assert classify_slope(0.2) is Stability.INCONCLUSIVE

    @staticmethod
    def test_growth_slope():
        Ns = [256, 512, 1024]
        assert growth_slope(Ns, [n**0.5 for n in Ns]) == pytest.approx(0.5)
        with pytest.raises(ParameterError, match="at least two"):
            growth_slope([256], [1.0])
        with pytest.raises(ParameterError, match="positive"):
            growth_slope(Ns, [1.0, 0.0, 1.0])
