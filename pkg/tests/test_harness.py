import io
import json
import logging
import math
import sys

import numpy as np
import pytest
from pydantic import ValidationError

from adacube.config.configfile import Config
from adacube.exceptions import ConfigError, EvaluationError, InvalidInputError, ProtocolError
from adacube.gp import Dataset, condition
from adacube.harness.cli import main
from adacube.harness.external import ExternalIntegrand, format_request, parse_response
from adacube.harness.metrics import bump_density_ratio, covers, mean_and_se, mse_bound, relative_error
from adacube.harness.records import RunRecord, canonical_json, config_hash, read_csv, read_json, write_csv
from adacube.harness.reparam import gaussian_reparam
from adacube.harness.runners import run_avgcase_validation, run_illustration, run_robot_analogue, run_synthetic_assessment, unit_grid
from adacube.harness.schema import ExperimentConfig, IntegrandConfig, ModelConfig, StopConfig, StudyConfig, load_config
from adacube.harness.surrogate_server import serve
from adacube.harness.surrogates import LINKS, REST_ANGLES, SURROGATES, end_effector
from adacube.kernels import ProductKernelSpec
from adacube.logger import resolve_level
from adacube.synthetic import SyntheticParams, sample_params
from adacube.synthetic.integrand import fixture


def script(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(body, encoding="utf-8")
    return [sys.executable, str(path)]


SUM_SERVER = """
import sys
for line in sys.stdin:
    print(repr(sum(float(t) for t in line.split(" "))), flush=True)
"""

CRASH_ONCE_SERVER = """
import os, sys
marker = sys.argv[1]
if not os.path.exists(marker):
    open(marker, "w").close()
    sys.stdin.readline()
    sys.exit(1)
for line in sys.stdin:
    print("2.5", flush=True)
"""

SLOW_SERVER = """
import sys, time
for line in sys.stdin:
    time.sleep(30)
"""

CHATTY_SERVER = """
import sys
for line in sys.stdin:
    print("1.0 2.0", flush=True)
"""

NAN_SERVER = """
import sys
for line in sys.stdin:
    print("nan", flush=True)
"""


class TestWireFormat:
    def test_request(self):
        assert format_request([0.1, 0.5]) == "0.10000000000000001 0.5\n"
        assert format_request(0.25) == "0.25\n"

    def test_response(self):
        assert parse_response("-1.5e-3\n") == -1.5e-3

    @pytest.mark.parametrize("line", ["1.0", "\n", "1.0 2.0\n", " 1.0\n", "one\n"])
    def test_bad_responses(self, line):
        with pytest.raises(ProtocolError):
            parse_response(line)


class TestExternalIntegrand:
    def test_round_trips_are_cached(self, tmp_path):
        with ExternalIntegrand(script(tmp_path, "sum.py", SUM_SERVER), timeout=20) as f:
            assert f([0.25, 0.5]) == 0.75
            assert f([0.25, 0.5]) == 0.75
            assert f(np.array([0.125, 0.125])) == 0.25
            assert f.round_trips == 2

    def test_restarts_after_a_crash(self, tmp_path):
        command = script(tmp_path, "crash.py", CRASH_ONCE_SERVER) + [str(tmp_path / "crashed")]
        with ExternalIntegrand(command, timeout=20, retries=2) as f:
            assert f([0.3]) == 2.5
            assert f.restarts == 1

    def test_gives_up_after_the_retries(self, tmp_path):
        dead = script(tmp_path, "dead.py", "import sys\nsys.exit(3)\n")
        with ExternalIntegrand(dead, timeout=20, retries=1) as f:
            with pytest.raises(EvaluationError) as info:
                f([0.3])
            assert f.restarts == 1
            assert info.value.abscissa == "0.29999999999999999"

    def test_timeout(self, tmp_path):
        with ExternalIntegrand(script(tmp_path, "slow.py", SLOW_SERVER), timeout=0.5) as f:
            with pytest.raises(EvaluationError):
                f([0.5])

    def test_protocol_violation(self, tmp_path):
        with ExternalIntegrand(script(tmp_path, "chatty.py", CHATTY_SERVER), timeout=20) as f:
            with pytest.raises(ProtocolError):
                f([0.5])

    def test_non_finite_answer(self, tmp_path):
        with ExternalIntegrand(script(tmp_path, "nan.py", NAN_SERVER), timeout=20) as f:
            with pytest.raises(EvaluationError):
                f([0.5])

    def test_empty_command(self):
        with pytest.raises(InvalidInputError):
            ExternalIntegrand([])


class TestSurrogates:
    def test_rest_pose(self):
        angles = np.cumsum(REST_ANGLES)
        tip = end_effector(np.zeros(3))
        assert tip[0] == pytest.approx(np.sum(np.array(LINKS) * np.cos(angles)), rel=1e-14)
        assert SURROGATES["z2_sq"](np.zeros(3)) == pytest.approx(tip[1] ** 2, rel=1e-14)

    def test_server_answers_each_line(self):
        out = io.StringIO()
        assert serve("z1", io.StringIO("0 0 0\n0.5 -1 2\n"), out) == 0
        lines = out.getvalue().splitlines(keepends=True)
        assert len(lines) == 2
        assert parse_response(lines[1]) == SURROGATES["z1"](np.array([0.5, -1.0, 2.0]))


class TestReparam:
    def test_centre_maps_to_zero(self):
        g = gaussian_reparam(lambda x: x)
        assert np.allclose(g([0.5, 0.5]), 0.0)
        assert np.all(np.isfinite(g([0.0, 1.0])))

    def test_uniform_average_is_a_gaussian_expectation(self, rng):
        g = gaussian_reparam(lambda x: x[..., 0] ** 2)
        values = g(rng.random((20_000, 3)))
        assert values.mean() == pytest.approx(1.0, abs=0.05)


class TestMetrics:
    def test_covers(self):
        assert covers(0.0, 1.0, 1.95)
        assert not covers(0.0, 1.0, 1.97)
        assert covers(0.0, 1.0, 0.6, level=0.5)

    def test_relative_error(self):
        assert relative_error(1.1, 1.0) == pytest.approx(0.1)
        assert relative_error(-0.9, -1.0) == pytest.approx(0.1)

    def test_mean_and_se(self):
        assert all(math.isnan(v) for v in mean_and_se([]))
        assert mean_and_se([2.0]) == (2.0, 0.0)
        mean, se = mean_and_se([1.0, 2.0, 3.0])
        assert mean == 2.0 and se == pytest.approx(1 / math.sqrt(3))

    def test_mse_bound_vanishes_on_the_training_points(self):
        data = Dataset.from_1d([0.1, 0.4, 0.8], [1.0, -1.0, 0.5])
        gp = condition(ProductKernelSpec.default(1), data)
        mean, se = mse_bound(gp, data.X, data.y)
        assert mean == pytest.approx(0.0, abs=1e-6)
        assert se >= 0.0
        with pytest.raises(InvalidInputError):
            mse_bound(gp, data.X[:2], data.y)

    def test_bump_density_ratio(self):
        params = SyntheticParams.one_dimensional(C=0.5, R=0.1, H=1.0, F=1.0, P=0)
        assert bump_density_ratio([0.45, 0.5, 0.55, 0.1, 0.9], params) == pytest.approx(6.0)
        assert bump_density_ratio([0.45, 0.55], params) == math.inf
        assert math.isnan(bump_density_ratio([], params))
        edge = SyntheticParams.one_dimensional(C=0.05, R=0.1, H=1.0, F=1.0, P=0)
        assert bump_density_ratio([0.0, 0.1, 0.5, 0.9], edge) == pytest.approx((2 / 0.15) / (2 / 0.85))


class TestRecords:
    def test_csv_layout(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", [{"a": 0.1, "b": [1, 2]}, {"a": None, "b": "x"}])
        assert path.read_bytes() == b'a,b\r\n0.1,"[1,2]"\r\n,x\r\n'
        assert read_csv(path) == [{"a": "0.1", "b": "[1,2]"}, {"a": "", "b": "x"}]

    def test_explicit_columns(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", [{"a": 1, "b": 2}], columns=["b", "a", "c"])
        assert path.read_text(encoding="utf-8").splitlines()[0] == "b,a,c"

    def test_canonical_json(self):
        text = canonical_json({"b": 1, "a": [1.5, float("inf")]})
        assert text == '{\n  "a": [\n    1.5,\n    "inf"\n  ],\n  "b": 1\n}\n'

    def test_config_hash(self):
        assert config_hash({"a": 1.0, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": np.float64(1.0)})
        assert config_hash({"a": 1.0}) != config_hash({"a": 2.0})

    def test_run_record_leaves_out_timing(self, tmp_path):
        record = RunRecord("demo", "abc", [{"n": 1}], {"mu": 0.5}, timing={"seconds": 1.0})
        csv_path, json_path = record.save(tmp_path)
        assert csv_path.name == "demo.csv"
        assert "timing" not in read_json(json_path)
        assert record.to_dict(include_timing=True)["timing"] == {"seconds": 1.0}


class TestSchema:
    def test_defaults(self):
        cfg = load_config(None)
        assert cfg == ExperimentConfig()
        assert cfg.stop.budget == 40 and cfg.stop.tau is None
        assert cfg.integrand.fixture == "illustration"
        assert cfg.trap.taus == [0.06, 0.04, 0.02]

    def test_unknown_keys_are_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"seed": 1, "sede": 2})
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"model": {"nu": 1.5, "lengthscale": 0.2}})

    @pytest.mark.parametrize(
        "payload",
        [{}, {"fixture": "illustration", "random_d": 2}, {"fixture": "nope"}, {"random_d": 0}],
    )
    def test_integrand_needs_exactly_one_source(self, payload):
        with pytest.raises(ValidationError):
            IntegrandConfig.model_validate(payload)

    def test_random_integrands_follow_the_seed(self):
        params = IntegrandConfig(random_d=2).params(5)
        expected = sample_params(2, np.random.default_rng(5))
        assert np.array_equal(params.C, expected.C)
        assert IntegrandConfig(command=["x"]).params(5) is None

    def test_load_config_errors(self, tmp_path):
        broken = tmp_path / "broken.json"
        broken.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(broken)
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")

    def test_load_config_reads_a_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"method": "StdBC", "stop": {"tau": 0.01}, "model": {"field_kind": "Constant"}}), encoding="utf-8")
        cfg = load_config(path)
        assert cfg.method == "StdBC"
        assert cfg.stop.tau == 0.01 and cfg.stop.budget is None
        assert cfg.model.field_kind.value == "Constant"

    def test_penalties(self):
        model = ModelConfig()
        assert model.penalties(1) == (30.0, 1.0, 0.0)
        assert model.penalties(2) == (9.0, 0.9, 2.0)
        assert model.penalties(3, robot=True) == (10.0, 0.8, 2.0)
        assert ModelConfig(lambda1=5.0).penalties(2) == (5.0, 0.9, 2.0)

    def test_bc_settings(self):
        cfg = ExperimentConfig(seed=7)
        assert cfg.bc_settings(1).grid is None
        settings = cfg.bc_settings(2, M=3)
        assert len(settings.grid) == 2 and len(settings.grid[0]) == 41
        assert settings.M == 3 and settings.seed == 7
        assert settings.lambda1 == 9.0

    def test_overrides(self):
        cfg = ExperimentConfig()
        changed = cfg.with_overrides(seed=3, budget=12)
        assert changed.seed == 3 and changed.stop.budget == 12 and changed.stop.tau is None
        assert cfg.seed == 0 and cfg.stop.budget == 40
        assert cfg.with_overrides(tau=0.1).stop.tau == 0.1


class TestCommandLine:
    def test_adaptrap_outputs_are_reproducible(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["adaptrap", "--out", str(out)]) == 0
        first = {p.name: p.read_bytes() for p in out.iterdir()}
        assert set(first) == {"adaptrap.csv", "adaptrap.json", "config.json"}
        assert main(["adaptrap", "--out", str(out)]) == 0
        assert {p.name: p.read_bytes() for p in out.iterdir()} == first
        rows = read_csv(out / "adaptrap.csv")
        assert [float(r["tau"]) for r in rows] == [0.06, 0.04, 0.02]
        assert str(out / "adaptrap.csv") in capsys.readouterr().out

    @pytest.mark.parametrize(
        "command, names",
        [
            ("bc", {"bc_EAdapBC.csv", "bc_EAdapBC.json"}),
            ("synth-bench", {"synth_bench.csv", "synth_bench.json"}),
            ("illustrate", {"illustration_adaptrap.csv", "illustration_EAdapBC.json", "illustration_StdBC_curve.csv"}),
        ],
    )
    def test_reruns_write_identical_bytes(self, tmp_path, command, names):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"study": {"n_integrands": 2}, "stop": {"budget": 13}}), encoding="utf-8")
        out = tmp_path / "out"
        assert main([command, "--config", str(path), "--out", str(out)]) == 0
        first = {p.name: p.read_bytes() for p in out.iterdir()}
        assert names <= set(first)
        assert main([command, "--config", str(path), "--out", str(out)]) == 0
        assert {p.name: p.read_bytes() for p in out.iterdir()} == first

    def test_bad_config_exits_with_one(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"bogus": 1}), encoding="utf-8")
        assert main(["adaptrap", "--config", str(path), "--out", str(tmp_path / "out")]) == 1
        assert "adacube adaptrap" in capsys.readouterr().err

    def test_adaptrap_needs_a_one_dimensional_integrand(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"integrand": {"random_d": 2}}), encoding="utf-8")
        assert main(["adaptrap", "--config", str(path), "--out", str(tmp_path / "out")]) == 1


class TestRunners:
    def test_unit_grid(self):
        assert unit_grid(4) == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert unit_grid(4, interior=True) == [0.25, 0.5, 0.75]

    def test_small_average_case_validation(self):
        cfg = ExperimentConfig(seed=1, study=StudyConfig(n_reps=60, avg_max_depth=8))
        record = run_avgcase_validation(cfg)
        checks = [row["check"] for row in record.rows]
        assert checks == ["exceed_probability"] * 3 + ["single_node_frequency", "single_node_error_variance", "cutoff_rate"]
        assert all(0.0 <= row["estimate"] <= 1.0 for row in record.rows if row["check"] != "single_node_error_variance")
        assert record.summary["n_reps"] == 60

    def test_small_synthetic_assessment(self):
        cfg = ExperimentConfig(seed=4, stop=StopConfig(budget=13), study=StudyConfig(n_integrands=2))
        record = run_synthetic_assessment(cfg)
        assert [(row["method"], row["n"]) for row in record.rows] == [("StdBC", 12), ("StdBC", 13), ("EAdapBC", 12), ("EAdapBC", 13)]
        for row in record.rows:
            assert row["count"] == 2
            assert 0.0 <= row["coverage"] <= 1.0
            assert row["mean_rel_err"] >= 0.0
        assert run_synthetic_assessment(cfg).rows == record.rows
        with pytest.raises(ConfigError):
            run_synthetic_assessment(ExperimentConfig(stop=StopConfig(tau=0.1)))

    def test_illustration_summaries_carry_the_bump_density(self):
        records = {r.name: r for r in run_illustration(ExperimentConfig(stop=StopConfig(budget=13)))}
        summary = records["illustration_EAdapBC"].summary
        assert len(summary["points"]) == 13
        assert summary["bump_density_ratio"] == pytest.approx(bump_density_ratio(summary["points"], fixture("illustration")))

    @pytest.mark.slow
    def test_illustration_concentrates_evaluations_in_the_bump(self):
        records = {r.name: r for r in run_illustration(ExperimentConfig(stop=StopConfig(budget=30)))}
        adaptive = records["illustration_EAdapBC"].summary
        stationary = records["illustration_StdBC"].summary
        assert adaptive["n"] == stationary["n"] == 30
        assert adaptive["bump_density_ratio"] >= 2.0
        assert adaptive["bump_density_ratio"] > stationary["bump_density_ratio"]
        assert abs(adaptive["mu"] - adaptive["truth"]) < 0.01

    @pytest.mark.slow
    def test_synthetic_assessment_at_the_final_budget(self):
        cfg = ExperimentConfig(seed=0, stop=StopConfig(budget=50), study=StudyConfig(n_integrands=20))
        rows = run_synthetic_assessment(cfg).rows
        final = {row["method"]: row for row in rows if row["n"] == 50}
        assert final["EAdapBC"]["count"] == 20
        assert final["EAdapBC"]["mean_rel_err"] < final["StdBC"]["mean_rel_err"]
        assert 0.8 <= final["EAdapBC"]["coverage"] <= 1.0
        first = [row for row in rows if row["method"] == "EAdapBC"][0]
        assert final["EAdapBC"]["mean_rel_err"] < first["mean_rel_err"]

    def test_robot_study_needs_a_budget_and_known_surrogates(self):
        with pytest.raises(ConfigError):
            run_robot_analogue(ExperimentConfig(stop=StopConfig(tau=0.1)))
        with pytest.raises(ConfigError):
            run_robot_analogue(ExperimentConfig(stop=StopConfig(budget=65), study=StudyConfig(functions=["z3"], holdout=5)))

    @pytest.mark.slow
    def test_robot_study(self):
        cfg = ExperimentConfig(stop=StopConfig(budget=65), study=StudyConfig(functions=["z1"], holdout=20), eval_timeout=60)
        record = run_robot_analogue(cfg)
        assert [row["method"] for row in record.rows] == ["StdBC", "EAdapBC"]
        for row in record.rows:
            assert row["n"] == 65
            assert row["mse_bound"] >= 0.0 and row["sigma"] >= 0.0

    @pytest.mark.slow
    def test_robot_study_favours_nonstationary_fields(self):
        cfg = ExperimentConfig(stop=StopConfig(budget=200), model=ModelConfig(refit_every=10), eval_timeout=60)
        record = run_robot_analogue(cfg)
        bounds = {(row["function"], row["method"]): row["mse_bound"] for row in record.rows}
        functions = cfg.study.functions
        assert len(record.rows) == 2 * len(functions) == 8
        wins = sum(bounds[(name, "EAdapBC")] <= bounds[(name, "StdBC")] for name in functions)
        assert wins >= 3


class TestAmbient:
    @pytest.mark.parametrize(
        "raw, level",
        [(None, logging.WARNING), ("", logging.WARNING), ("off", logging.WARNING), (" DEBUG ", logging.DEBUG), ("info", logging.INFO), ("loud", logging.INFO)],
    )
    def test_log_levels(self, raw, level):
        assert resolve_level(raw) == level

    def test_packaged_defaults(self):
        config = Config()
        assert config.get_model_options()["field_kind"] == "PiecewiseLinear"
        assert config.get_mcmc_options()["J"] == 50

    def test_missing_keys_fall_back(self, tmp_path):
        path = tmp_path / "partial.ini"
        path.write_text("[TRAP]\nRHO = 0.25\n", encoding="utf-8")
        config = Config(str(path))
        trap = config.get_trap_options()
        assert trap["rho"] == 0.25 and trap["m"] == 5
        assert config.get_bc_options()["candidates"] == 500
