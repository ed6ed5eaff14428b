import csv
import io
import json
from typing import List, Optional

import pytest

from lpmult.exceptions import ParameterError
from lpmult.grid import GridSpec
from lpmult.multiplier import Stability
from lpmult.multiplier.sweep import (
    CSV_HEADER,
    LADDER,
    SweepConfig,
    SweepReport,
    SweepRow,
    classify_sweep,
    evaluate_cell,
    family_members,
    is_admissible,
    operator_norm_sweep,
    run_sweep,
    stability_boundary,
)
from tests.helpers import LPMULT_SLOW

SMALL = SweepConfig(
    s_values=(0.3, -0.3),
    p_values=(2.0,),
    gamma_values=(0.0, 0.5),
    Ns=(128, 256),
    spaces=("H", "F2"),
    ladder_depth=1,
)


@pytest.fixture(scope="module")
def small_report() -> SweepReport:
    return operator_norm_sweep(SMALL)


def fake_report(s: float, ratios: List[float], Ns: Optional[List[int]] = None) -> SweepReport:
    Ns = Ns or [256, 512, 1024, 2048][: len(ratios)]
    rows = [
        SweepRow(s, 2.0, 0.0, N, LADDER, "H", ratio, is_admissible(s, 2.0, 0.0))
        for N, ratio in zip(Ns, ratios)
    ]
    return SweepReport(rows, 7, 1, 16.0, None)


class TestSweepConfig:
    @staticmethod
    def test_cells():
        assert len(SMALL.cells()) == 2 * 1 * 2 * 2 * 1 * 2

    @staticmethod
    @pytest.mark.parametrize(
        "kwargs,message",
        [
            ({"s_values": ()}, "s_values must not be empty"),
            ({"s_values": (0.3,), "p_values": (1.0,)}, "p must"),
            ({"s_values": (0.3,), "gamma_values": (-1.0,)}, "not locally integrable"),
            ({"s_values": (0.3,), "spaces": ("L",)}, "H, B and F"),
            ({"s_values": (0.3,), "families": ("sawtooth",)}, "unknown family"),
            ({"s_values": (0.3,), "families": ("gaussian",)}, "must include 'ladder'"),
            ({"s_values": (0.3,), "Ns": (100,)}, "power of two"),
            ({"s_values": (0.3,), "workers": 0}, "workers"),
        ],
    )
    def test_validation(kwargs: dict, message: str):
        with pytest.raises(ParameterError, match=message):
            SweepConfig(**kwargs)


def test_ladder_members():
    grid = GridSpec(1, 16.0, 256)
    assert len(family_members(LADDER, 0.3, grid, 0, 3)) == 4
    assert len(family_members(LADDER, -0.3, grid, 0, 2)) == 3
    assert len(family_members("gaussian", 0.3, grid, 0, 3)) == 1


def test_admissibility_flag():
    assert is_admissible(0.3, 2.0, 0.0)
    assert not is_admissible(0.6, 2.0, 0.0)
    assert is_admissible(0.6, 2.0, 0.5)
    assert not is_admissible(0.3, 2.0, 1.5)


def test_rows_are_sorted(small_report: SweepReport):
    rows = small_report.rows
    assert rows == sorted(rows)
    assert len(rows) == len(SMALL.cells())
    assert all(row.ratio > 0 for row in rows)
    assert rows[0].s == -0.3


def test_single_cell_matches_sweep(small_report: SweepReport):
    cell = SMALL.cells()[0]
    row = evaluate_cell(cell)
    assert row in small_report.rows
    assert row.ratio == next(r.ratio for r in small_report.rows if r == row)


def test_worker_count_does_not_change_bytes(small_report: SweepReport):
    parallel = operator_norm_sweep(
        SweepConfig(
            SMALL.s_values,
            SMALL.p_values,
            SMALL.gamma_values,
            SMALL.Ns,
            spaces=SMALL.spaces,
            ladder_depth=SMALL.ladder_depth,
            workers=2,
        )
    )
    assert parallel.to_csv() == small_report.to_csv()
    assert parallel.to_json() == small_report.to_json()


def test_csv_and_json_hold_the_same_records(small_report: SweepReport):
    table = list(csv.reader(io.StringIO(small_report.to_csv())))
    assert tuple(table[0]) == CSV_HEADER
    records = json.loads(small_report.to_json())
    assert len(records) == len(table) - 1
    for line, record in zip(table[1:], records):
        assert float(line[0]) == record["s"]
        assert int(line[3]) == record["N"]
        assert line[5] == record["space"]
        assert float(line[6]) == record["ratio"]
        assert line[7] == str(record["admissible"]).lower()


class TestClassification:
    @staticmethod
    def test_slopes():
        stable = classify_sweep(fake_report(0.3, [1.0, 1.01, 1.02, 1.02]))[0]
        assert stable.stability is Stability.STABLE
        assert stable.admissible
        growing = classify_sweep(fake_report(0.6, [1.0, 1.5, 2.2, 3.3]))[0]
        assert growing.stability is Stability.GROWTH
        assert not growing.admissible

    @staticmethod
    def test_finest_pair():
        report = fake_report(0.6, [1.0, 1.0, 1.0, 2.0])
        assert classify_sweep(report, finest_pair=True)[0].slope == pytest.approx(1.0)
        assert classify_sweep(report)[0].slope < 1.0

    @staticmethod
    def test_endpoint_is_not_classified():
        row = classify_sweep(fake_report(0.5, [1.0, 2.0]))[0]
        assert row.stability is None


@pytest.mark.skipif(not LPMULT_SLOW, reason="refinement sweeps up to N = 2048 take minutes")
class TestSharpness:
    Ns = (256, 512, 1024, 2048)

    @staticmethod
    @pytest.mark.parametrize("space", ["H", "F1", "F2", "Finf"])
    def test_inside_range_is_stable(space: str):
        config = SweepConfig(
            (0.3, 0.6), (2.0,), (0.0, 0.5), TestSharpness.Ns, spaces=(space,), workers=4
        )
        rows = {(row.s, row.gamma): row for row in classify_sweep(operator_norm_sweep(config))}
        for key in ((0.3, 0.0), (0.6, 0.5)):
            assert rows[key].slope <= 0.1, key

    @staticmethod
    @pytest.mark.parametrize("space", ["H", "F2"])
    def test_outside_range_grows(space: str):
        config = SweepConfig((-0.9, 0.9), (2.0,), (0.0,), TestSharpness.Ns, spaces=(space,), workers=4)
        for row in classify_sweep(operator_norm_sweep(config), finest_pair=True):
            assert row.stability is Stability.GROWTH, row

    @staticmethod
    def test_boundary_moves_with_weight():
        s_values = (0.1, 0.3, 0.5, 0.7, 0.9)
        boundaries = [
            stability_boundary(2.0, gamma, s_values, TestSharpness.Ns, workers=4)
            for gamma in (-0.5, 0.0, 0.5)
        ]
        levels = [-1.0 if b is None else b for b in boundaries]
        assert levels == sorted(levels)


async def test_run_sweep_in_event_loop(small_report: SweepReport):
    report = await run_sweep(SMALL)
    assert report.to_csv() == small_report.to_csv()
