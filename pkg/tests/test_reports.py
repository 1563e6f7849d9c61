import json
from fractions import Fraction

import pandas as pd
import pytest
from openpyxl import load_workbook

from renormlab.numerics import CertReal
from renormlab.reports import Report, Verdict, merge_verdicts, summary_frame, to_jsonable, write_summary_workbook


class TestMergeVerdicts:  # noqa: D101
    @pytest.mark.parametrize(
        "verdicts, expected",
        [
            ([Verdict.PASS, Verdict.PASS], Verdict.PASS),
            ([Verdict.PASS, Verdict.INCONCLUSIVE], Verdict.INCONCLUSIVE),
            ([Verdict.INCONCLUSIVE, Verdict.FAIL], Verdict.FAIL),
            ([Verdict.VALID, Verdict.PASS], Verdict.VALID),
            ([Verdict.VALID, Verdict.INVALID], Verdict.INVALID),
            ([], Verdict.PASS),
        ],
    )
    def test_merge_verdicts(self, verdicts, expected):
        assert merge_verdicts(verdicts) is expected


class TestReport:  # noqa: D101
    def test_record_keeps_only_failing_witnesses(self):
        report = Report(check="invariance", instance="demo")
        report.record(Verdict.PASS, CertReal(Fraction(1), Fraction(1, 8)))
        report.record(Verdict.FAIL, CertReal.exact(2), refinements=2, vector=(1, 2))
        assert report.trials == 2
        assert report.verdict is Verdict.FAIL
        assert report.max_radius == Fraction(1, 8)
        assert report.refinements == 2
        assert report.witnesses == [{"vector": (1, 2), "verdict": Verdict.FAIL}]

    def test_to_json_is_deterministic(self):
        def build():
            report = Report(check="equivalence", instance="demo", seed=7)
            report.record(Verdict.FAIL, norm=CertReal.exact(Fraction(3, 2)), bound=Fraction(5, 4))
            return report.to_json()

        text = build()
        assert text == build()
        payload = json.loads(text)
        assert payload["verdict"] == "FAIL"
        assert payload["witnesses"][0]["bound"] == "5/4"
        assert payload["witnesses"][0]["norm"] == {"midpoint": "3/2", "radius": "0"}
        assert list(payload) == sorted(payload)

    def test_to_frame(self):
        report = Report(check="strict-convexity", instance="demo")
        report.record(Verdict.FAIL, x=(1, 0), y=(0, 1))
        frame = report.to_frame()
        assert isinstance(frame, pd.DataFrame)
        assert set(frame.columns) == {"x", "y", "verdict"}
        assert frame.loc[0, "verdict"] == '"FAIL"'

    def test_to_jsonable(self):
        assert to_jsonable({"q": Fraction(1, 3), "t": (1, Fraction(2))}) == {"q": "1/3", "t": [1, "2"]}
        assert to_jsonable(frozenset({2, 1})) == [1, 2]


class TestSummary:  # noqa: D101
    @pytest.fixture
    def results(self):
        return [
            {
                "scenario": "demo",
                "paper_result": "a theorem",
                "verdicts": {"certificate": Verdict.VALID, "control": Verdict.INVALID},
                "expected": {"certificate": Verdict.VALID, "control": Verdict.INVALID},
                "met": True,
            }
        ]

    def test_summary_frame(self, results):
        frame = summary_frame(results)
        assert list(frame.columns) == ["scenario", "paper_result", "check", "verdict", "expected", "met"]
        assert len(frame) == 2
        assert frame["verdict"].tolist() == ["VALID", "INVALID"]
        assert frame["met"].all()

    def test_summary_frame_empty(self):
        assert summary_frame([]).empty

    def test_write_summary_workbook(self, results, tmp_path):
        path = write_summary_workbook(summary_frame(results), tmp_path / "summary.xlsx")
        ws = load_workbook(path)["summary"]
        rows = list(ws.values)
        assert rows[0] == ("scenario", "paper_result", "check", "verdict", "expected", "met")
        assert rows[1][:4] == ("demo", "a theorem", "certificate", "VALID")

    def test_write_summary_workbook_unwritable(self, results, tmp_path):
        with pytest.raises(RuntimeError, match="Failed to save"):
            write_summary_workbook(summary_frame(results), tmp_path / "missing" / "summary.xlsx")
