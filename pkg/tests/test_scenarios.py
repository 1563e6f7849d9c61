import json
from fractions import Fraction

import pytest

from renormlab.l1space import StepFn, step_to_json
from renormlab.numerics import PrecisionExhaustedError
from renormlab.reports import Report, Verdict
from renormlab.scenarios import SCENARIOS, Scenario, ScenarioConfig, run_scenario, write_result

SMALL = dict(trials=4, dim=4, window=4, depth=4)


@pytest.fixture
def stuck_scenario(monkeypatch):
    """A scenario whose only check stays undecided."""

    def runner(cfg):
        report = Report(check="demo", instance="stuck")
        report.record(Verdict.INCONCLUSIVE)
        return {"demo": report}

    monkeypatch.setitem(SCENARIOS, "stuck", Scenario("stuck", "none", "Never decides.", runner, {"demo": Verdict.PASS}))
    return "stuck"


class TestScenarioConfig:  # noqa: D101
    def test_defaults(self):
        cfg = ScenarioConfig("find-np")
        assert cfg.seed == 42
        assert cfg.precision == Fraction(1, 2**64)
        assert cfg.trials_or(7) == 7
        assert ScenarioConfig("find-np", trials=3).trials_or(7) == 3

    def test_precision_from_text(self):
        assert ScenarioConfig("find-np", precision="1/1024").precision == Fraction(1, 1024)

    @pytest.mark.parametrize(
        "settings, match",
        [
            ({"seed": -1}, "seed"),
            ({"seed": 2**64}, "seed"),
            ({"trials": 0}, "trials"),
            ({"precision": 1}, "precision"),
            ({"precision": 0}, "precision"),
            ({"dim": 65}, "dim"),
            ({"window": 129}, "window"),
            ({"window": 1}, "at least 2"),
            ({"depth": 0}, "depth"),
            ({"function": "not json"}, "Invalid step function JSON"),
            ({"function": '{"breakpoints": ["0", "1"], "values": ["0"]}'}, "vanish"),
        ],
    )
    def test_out_of_range(self, settings, match):
        with pytest.raises(ValueError, match=match):
            ScenarioConfig("find-np", **settings)


class TestCatalog:  # noqa: D101
    def test_every_scenario_has_expectations(self):
        assert len(SCENARIOS) == 17
        for name, scenario in SCENARIOS.items():
            assert scenario.name == name
            assert scenario.expected
            assert scenario.paper_result

    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    def test_scenario_meets_expectations(self, name):
        result = run_scenario(ScenarioConfig(name, **SMALL))
        assert result.met
        assert set(result.expected) <= set(result.verdicts)


class TestRunScenario:  # noqa: D101
    def test_unknown_scenario(self):
        with pytest.raises(ValueError, match="Unknown scenario"):
            run_scenario(ScenarioConfig("no-such-scenario"))

    def test_subshift_obstruction(self):
        result = run_scenario(ScenarioConfig("subshift-obstruction"))
        assert result.verdicts == {
            "certificate": Verdict.VALID,
            "shift power 2": Verdict.INVALID,
            "x = y": Verdict.INVALID,
        }
        assert result.verdict is Verdict.INVALID
        assert all(r.paper_result == result.paper_result for r in result.reports.values())

    def test_c_renorm_audit_reports_the_discrepancy(self):
        result = run_scenario(ScenarioConfig("c-renorm-audit", **SMALL))
        assert result.met
        invariance = result.reports["invariance"]
        assert invariance.witnesses[0]["n_x"].midpoint == 2
        assert any("1 + √10" in note for note in invariance.notes)

    def test_fd_l1_renorm(self):
        result = run_scenario(ScenarioConfig("fd-l1-renorm", trials=6))
        assert result.met
        assert result.reports["invariance"].trials == 6 * 7
        assert result.reports["invariance"].max_radius == 0
        assert result.reports["l1-strict-convexity"].verdict is Verdict.FAIL

    def test_find_np_on_supplied_function(self):
        text = step_to_json(StepFn.indicator(0, Fraction(1, 4)))
        result = run_scenario(ScenarioConfig("find-np", function=text))
        assert result.met
        assert result.reports["search"].trials == 1
        assert result.config["function"] == text

    def test_output_is_deterministic(self, tmp_path):
        paths = []
        for k in range(2):
            out = tmp_path / f"run{k}.json"
            run_scenario(ScenarioConfig("c-renorm-audit", out=out, **SMALL))
            paths.append(out)
        assert paths[0].read_text(encoding="utf-8") == paths[1].read_text(encoding="utf-8")
        payload = json.loads(paths[0].read_text(encoding="utf-8"))
        assert payload["scenario"] == "c-renorm-audit"
        assert payload["met"] is True
        assert payload["config"]["seed"] == 42
        assert payload["reports"]["equivariance"]["verdict"] == "FAIL"

    def test_summary(self):
        summary = run_scenario(ScenarioConfig("subshift-obstruction")).summary()
        assert set(summary) == {"scenario", "paper_result", "verdicts", "expected", "met"}
        assert summary["met"] is True

    def test_precision_exhausted(self, stuck_scenario):
        with pytest.raises(PrecisionExhaustedError, match="demo"):
            run_scenario(ScenarioConfig(stuck_scenario))

    def test_write_result_failure(self, tmp_path):
        result = run_scenario(ScenarioConfig("subshift-obstruction"))
        with pytest.raises(RuntimeError, match="Failed to write"):
            write_result(result, tmp_path / "missing" / "out.json")
