import csv
import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from starwalk import cli
from starwalk.errors import InsufficientDataError, InvalidParameterError, NotInvariantError
from starwalk.experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    SweepConfig,
    predicted_measurement_step,
    predicted_measurement_time,
    ratio_curve,
    round_even,
    run_path_experiment,
    scaling_fit,
    sweep,
)
from starwalk.graph import build_three_star, build_two_star


def data_rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


class TestRoundEven:
    @pytest.mark.parametrize("x,expected", [(9.21, 10), (26.88, 26), (27.0, 26),
                                            (29.0, 28), (28.72, 28), (0.4, 0)])
    def test_values(self, x, expected):
        assert round_even(x) == expected

    @given(st.floats(0, 1e6))
    def test_nearest_even(self, x):
        r = round_even(x)
        assert r % 2 == 0
        assert abs(r - x) <= 1


class TestPredictedStep:
    def test_two_star_n100(self):
        g = build_two_star(100)
        assert predicted_measurement_time(g) == pytest.approx(9.208, abs=1e-3)
        assert predicted_measurement_step(g) == 10

    def test_three_star_n1000_m3(self):
        g = build_three_star(1000, 3)
        assert predicted_measurement_time(g) == pytest.approx(26.88, abs=1e-2)
        assert predicted_measurement_step(g) == 26

    @pytest.mark.parametrize("N", [100, 400, 2500])
    def test_quadruple_n_doubles(self, N):
        a = predicted_measurement_step(build_two_star(N))
        b = predicted_measurement_step(build_two_star(4 * N))
        assert abs(b - 2 * a) <= 2


class TestRunPathExperiment:
    def test_two_star_n100(self):
        rep = run_path_experiment(ExperimentConfig(2, 100))
        assert rep.predicted_step == 10
        assert rep.max_path_probability >= 0.9
        assert abs(rep.observed_step - 10) <= 2
        assert rep.r_plus is None and rep.p_plus is None

    def test_three_star_n1000_m3(self):
        rep = run_path_experiment(ExperimentConfig(3, 1000, 3))
        assert rep.max_path_probability == pytest.approx(0.98, abs=0.01)
        assert rep.p_plus == pytest.approx(0.9714, abs=1e-4)
        assert rep.r_plus > 1

    def test_three_star_single_path(self):
        rep = run_path_experiment(ExperimentConfig(3, 1000, 2, max_steps=200))
        series = np.array(rep.path_series)
        assert rep.max_path_probability > 0.999
        # single frequency: returns to near-zero and relocalizes
        assert series[rep.steps.index(2 * rep.observed_step)] < 0.01
        assert series[rep.steps.index(3 * rep.observed_step)] > 0.99

    def test_probabilities_are_finite(self):
        rep = run_path_experiment(ExperimentConfig(3, 300, 4))
        s = np.array(rep.path_series)
        assert np.all(np.isfinite(s))
        assert np.all((s >= 0) & (s <= 1 + 1e-12))

    def test_short_max_steps(self):
        with pytest.raises(InvalidParameterError):
            run_path_experiment(ExperimentConfig(2, 100, max_steps=10))

    def test_odd_max_steps(self):
        with pytest.raises(InvalidParameterError):
            ExperimentConfig(2, 100, max_steps=41)

    def test_deterministic(self):
        a = run_path_experiment(ExperimentConfig(3, 500, 3))
        b = run_path_experiment(ExperimentConfig(3, 500, 3))
        assert a == b

    @pytest.mark.parametrize("stars,Ns,m", [(2, (100, 200, 400, 800), None),
                                            (3, (400, 800, 1600), 3),
                                            (3, (400, 800, 1600), 6)])
    def test_prediction_agreement(self, stars, Ns, m):
        for N in Ns:
            rep = run_path_experiment(ExperimentConfig(stars, N, m))
            assert abs(rep.observed_step - rep.predicted_step) <= 4  # 2 U^2 steps

    def test_monotone_in_N(self):
        best = [run_path_experiment(ExperimentConfig(3, N, 3)).max_path_probability
                for N in (200, 400, 800, 1600)]
        for a, b in zip(best, best[1:]):
            assert b >= a - 0.01


def test_ratio_curve_small():
    pts = ratio_curve(600, range(3, 7))
    assert [p.m for p in pts] == [3, 4, 5, 6]
    r = [p.r_plus for p in pts]
    assert all(b > a for a, b in zip(r, r[1:]))
    for p in pts:
        assert p.r_plus == pytest.approx(p.p_psi3 / p.p_psi2)


def test_ratio_per_path_state_same_order():
    pts = ratio_curve(2000, range(3, 13))
    per = [p.r_plus / (p.m - 1) for p in pts]
    assert max(per) / min(per) <= 10


class TestScalingFit:
    def test_two_star(self):
        fit = scaling_fit(2, [100, 400, 1600, 6400])
        assert fit.exponent == pytest.approx(0.5, abs=0.05)

    def test_constant_series(self):
        with pytest.raises(InsufficientDataError):
            scaling_fit(2, [100, 100, 100, 100])


class TestSweep:
    def test_shape(self):
        text = sweep(SweepConfig(3, (200, 100), (3, 2)))
        rows = data_rows(text)
        assert len(rows) == 4
        assert [(r["N"], r["m"]) for r in rows] == [
            ("100", "2"), ("100", "3"), ("200", "2"), ("200", "3")
        ]
        header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
        assert header == ",".join(CSV_COLUMNS)
        assert "\r" not in text

    def test_metadata_block(self):
        text = sweep(SweepConfig(3, (100,), (3,)))
        meta = [ln for ln in text.splitlines() if ln.startswith("#")]
        keys = [ln[2:].split(":")[0] for ln in meta]
        assert keys == ["tool", "version", "parameters", "tolerances"]

    def test_byte_identical(self):
        cfg = SweepConfig(3, (100, 150), (2, 3))
        assert sweep(cfg) == sweep(cfg)

    def test_parallel_matches_serial(self):
        cfg = SweepConfig(3, (120, 80), (2, 3, 4))
        par = SweepConfig(3, (120, 80), (2, 3, 4), jobs=4)
        assert sweep(cfg) == sweep(par)

    def test_invalid_pair_recorded(self):
        rows = data_rows(sweep(SweepConfig(3, (6, 100), (3, 4))))
        bad = [r for r in rows if r["error"]]
        assert [(r["N"], r["m"]) for r in bad] == [("6", "4")]
        assert "InvalidParameterError" in bad[0]["error"]
        good = [r for r in rows if not r["error"]]
        assert len(good) == 3
        assert all(float(r["max_path_probability"]) > 0 for r in good)

    def test_twelve_significant_digits(self):
        rows = data_rows(sweep(SweepConfig(3, (100,), (3,))))
        digits = rows[0]["max_path_probability"].replace("0.", "", 1).lstrip("0")
        assert len(digits) <= 12


class TestCli:
    def run(self, *argv):
        return cli.main([str(a) for a in argv])

    def test_simulate(self, tmp_path):
        out = tmp_path / "sim.json"
        assert self.run("simulate", "--stars", 2, "--prongs", 20, "--steps", 4,
                        "--out", out) == 0
        data = json.loads(out.read_text())
        assert data["norm"] == pytest.approx(1)
        assert len(data["amplitudes"]) == 80
        assert sum(e["probability"] for e in data["edges"]) == pytest.approx(1)
        assert data["metadata"]["version"]

    def test_experiment(self, tmp_path):
        out = tmp_path / "exp.json"
        assert self.run("experiment", "--stars", 3, "--prongs", 200, "--shared", 3,
                        "--out", out) == 0
        data = json.loads(out.read_text())
        assert data["predicted_step"] % 2 == 0
        assert 0 < data["p_plus"] <= 1
        assert data["metadata"]["tolerances"]["norm"] == 1e-10

    def test_spectrum(self, tmp_path):
        out = tmp_path / "spectrum.json"
        assert self.run("spectrum", "--prongs", 100, "--shared", 3, "--out", out) == 0
        data = json.loads(out.read_text())
        assert set(data["eigenvalues"]) == {"-1", "++", "+-", "-+", "--"}
        assert data["invariance_residual"] < 1e-10

    def test_ratio_curve(self, tmp_path):
        out = tmp_path / "ratio.csv"
        assert self.run("ratio-curve", "--prongs", 300, "--shared-range", "3:5",
                        "--out", out) == 0
        rows = data_rows(out.read_text())
        assert [r["m"] for r in rows] == ["3", "4", "5"]
        assert set(rows[0]) == {"m", "r_plus", "p_psi2", "p_psi3", "p_psi4", "step"}

    def test_sweep(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--stars", 3, "--prongs-list", 100, 150, "--shared-list", "2,3"]
        assert self.run(*args, "--out", a) == 0
        assert self.run(*args, "--jobs", 2, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(data_rows(a.read_text())) == 4

    def test_scaling(self, tmp_path):
        out = tmp_path / "scale.json"
        assert self.run("scaling", "--stars", 2, "--prongs-list", "100,400,1600",
                        "--out", out) == 0
        data = json.loads(out.read_text())
        assert data["exponent"] == pytest.approx(0.5, abs=0.1)

    def test_invalid_parameters_exit_2(self, tmp_path):
        assert self.run("experiment", "--stars", 3, "--prongs", 6, "--shared", 4,
                        "--out", tmp_path / "x.json") == 2
        assert self.run("experiment", "--stars", 3, "--prongs", 60,
                        "--out", tmp_path / "x.json") == 2

    def test_numeric_violation_exit_3(self, tmp_path, monkeypatch):
        def boom(*a, **k):
            raise NotInvariantError("residual too large", residual=1.0)

        monkeypatch.setattr(cli, "reduced_model", boom)
        assert self.run("spectrum", "--prongs", 100, "--shared", 3,
                        "--out", tmp_path / "x.json") == 3

    def test_bad_range_is_usage_error(self):
        with pytest.raises(SystemExit) as info:
            self.run("ratio-curve", "--prongs", 100, "--shared-range", "5:3")
        assert info.value.code == 2
