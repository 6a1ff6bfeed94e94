from __future__ import annotations

import json

import pytest

from shscert import Polynomial, load_case
from shscert.certify import CbcCandidate
from shscert.cli import main
from shscert.model import NoiseConfig, SHSModel
from shscert.poly import IntervalBox, NoiseMoments
from shscert import JumpParams


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    root = tmp_path_factory.mktemp("artifacts")
    case = load_case(1)
    (root / "model1.json").write_text(case.model.to_json())
    (root / "cand1.json").write_text(case.candidate.to_json())
    return root


@pytest.fixture(scope="module")
def easy_files(tmp_path_factory, ):
    from conftest import scalar_model

    root = tmp_path_factory.mktemp("easy")
    x = Polynomial.variable("x")
    nu = Polynomial.variable("nu")
    model = scalar_model(
        f1=-1.0 * x + 0.0 * nu, f2=0.5 * x, sigma=0.0, rho=0.0, rate=0.0,
        X=(-2.0, 10.0), X0=(-0.5, 0.5), Xu=(8.0, 10.0),
    )
    cand = CbcCandidate(
        x**2, 1.0, 0.5, 0.5, 0.01, 0.3, 60.0,
        (Polynomial.constant(0.0),), (Polynomial.constant(0.0),),
    )
    (root / "model.json").write_text(model.to_json())
    (root / "cand.json").write_text(cand.to_json())
    return root


class TestVerify:
    def test_failing_conditions_exit_one(self, artifacts, tmp_path):
        code = main([
            "verify", str(artifacts / "model1.json"), str(artifacts / "cand1.json"),
            "--out", str(tmp_path),
        ])
        assert code == 1
        report = json.loads((tmp_path / "verify_report.json").read_text())
        names = [c["condition"] for c in report["conditions"]]
        assert names == ["initial", "unsafe", "flow", "jump", "nonneg"]
        assert not report["all_hold"]

    def test_all_holding_exit_zero(self, easy_files, tmp_path):
        code = main([
            "verify", str(easy_files / "model.json"), str(easy_files / "cand.json"),
            "--out", str(tmp_path),
        ])
        assert code == 0

    def test_inconclusive_exit_two(self, tmp_path):
        # two-dimensional model: the grid check cannot certify the tight
        # nonnegativity condition and reports inconclusive
        x, y = Polynomial.variable("x"), Polynomial.variable("y")
        nu = Polynomial.variable("nu")
        w = Polynomial.variable("varsigma")
        model = SHSModel(
            state_vars=("x", "y"), input_vars=("nu",), noise_vars=("varsigma",),
            f1=(-1.0 * x + 0.0 * nu, -1.0 * y),
            sigma=((Polynomial.constant(0.0),), (Polynomial.constant(0.0),)),
            rho=((Polynomial.constant(0.0),), (Polynomial.constant(0.0),)),
            rates=(0.0,),
            f2=(0.0 * x + 0.0 * w, 0.0 * y),
            noise=NoiseConfig((NoiseMoments.standard_normal(8),)),
            jump=JumpParams(0.1, 1, 7),
            X=IntervalBox({"x": (-1, 5), "y": (-1, 5)}),
            X0=IntervalBox({"x": (0, 0), "y": (0, 0)}),
            Xu=IntervalBox({"x": (3, 4), "y": (3, 4)}),
        )
        B = (x - y) ** 2 + x + y + 2.0
        cand = CbcCandidate(
            B, 1.0, 0.5, 2.5, 2.5, 2.5, 7.0,
            (Polynomial.constant(0.0),), (Polynomial.constant(0.0),),
        )
        (tmp_path / "model.json").write_text(model.to_json())
        (tmp_path / "cand.json").write_text(cand.to_json())
        code = main([
            "verify", str(tmp_path / "model.json"), str(tmp_path / "cand.json"),
            "--out", str(tmp_path / "out"),
        ])
        assert code == 2
        report = json.loads((tmp_path / "out" / "verify_report.json").read_text())
        statuses = {c["condition"]: c["status"] for c in report["conditions"]}
        assert "fails" not in statuses.values()
        assert "inconclusive" in statuses.values()

    def test_malformed_json_exit_three(self, artifacts, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"vars": [')
        code = main([
            "verify", str(bad), str(artifacts / "cand1.json"), "--out", str(tmp_path),
        ])
        assert code == 3
        assert "line" in capsys.readouterr().err

    def test_violated_candidate_invariant_exit_three(self, artifacts, tmp_path, capsys):
        doc = json.loads((artifacts / "cand1.json").read_text())
        doc["etabar"] = doc["alphabar"]  # breaks etabar > alphabar
        bad = tmp_path / "cand_bad.json"
        bad.write_text(json.dumps(doc))
        code = main([
            "verify", str(artifacts / "model1.json"), str(bad), "--out", str(tmp_path),
        ])
        assert code == 3
        assert "etabar > alphabar" in capsys.readouterr().err

    def test_domain_flag(self, artifacts, tmp_path):
        code = main([
            "verify", str(artifacts / "model1.json"), str(artifacts / "cand1.json"),
            "--domain", "x=0:1", "--out", str(tmp_path),
        ])
        report = json.loads((tmp_path / "verify_report.json").read_text())
        assert report["domain"] == {"x": [0.0, 1.0]}
        assert code in (0, 1, 2)

    def test_manifest_written(self, artifacts, tmp_path):
        main([
            "verify", str(artifacts / "model1.json"), str(artifacts / "cand1.json"),
            "--out", str(tmp_path), "--seed", "5",
        ])
        manifest = json.loads((tmp_path / "verify_manifest.json").read_text())
        assert manifest["command"] == "verify"
        assert manifest["seed"] == 5
        assert len(manifest["inputs"]) == 2
        assert all(len(h) == 64 for h in manifest["inputs"].values())
        assert "wall_clock_s" in manifest
        assert str(tmp_path / "verify_report.json") in manifest["outputs"]


class TestPipelineRoundTrip:
    def test_artifacts_flow_between_commands(self, artifacts, tmp_path):
        out1 = tmp_path / "augment"
        code = main([
            "augment", str(artifacts / "model1.json"), str(artifacts / "cand1.json"),
            "--eps2", "8", "--out", str(out1),
        ])
        assert code == 0
        acbc_path = out1 / "acbc.json"
        acbc = json.loads(acbc_path.read_text())
        assert acbc["regime"] == "R1"

        out2 = tmp_path / "bound"
        code = main(["bound", str(acbc_path), "--horizon", "100", "--out", str(out2)])
        assert code == 0
        sb = json.loads((out2 / "bound.json").read_text())
        assert abs(sb["safety_probability"] - 0.9443) < 1e-3

        out3 = tmp_path / "sim"
        code = main([
            "simulate", str(artifacts / "model1.json"), str(artifacts / "cand1.json"),
            "--acbc", str(acbc_path), "--runs", "25", "--horizon", "40",
            "--schedule", "fixed:3", "--seed", "7", "--out", str(out3),
            "--keep-trajectories", "2",
        ])
        assert code == 0
        mc = json.loads((out3 / "mc_report.json").read_text())
        assert mc["n_trajectories"] == 25
        csv_text = (out3 / "trajectory_0000.csv").read_text()
        assert csv_text.splitlines()[0] == "k,time,z,scenario,x_1,B_value"

    def test_bad_schedule_exit_three(self, artifacts, tmp_path):
        code = main([
            "simulate", str(artifacts / "model1.json"), str(artifacts / "cand1.json"),
            "--schedule", "fixed:12", "--out", str(tmp_path),
        ])
        assert code == 3

    def test_fixed_start_flag(self, artifacts, tmp_path):
        code = main([
            "simulate", str(artifacts / "model1.json"), str(artifacts / "cand1.json"),
            "--x0", "1.25", "--runs", "1", "--horizon", "3",
            "--out", str(tmp_path), "--keep-trajectories", "1",
        ])
        assert code == 0
        first = (tmp_path / "trajectory_0000.csv").read_text().splitlines()[1]
        assert first.split(",")[4] == "1.25"

    def test_augment_failure_exit_one(self, artifacts, tmp_path, capsys):
        doc = json.loads((artifacts / "cand1.json").read_text())
        doc["kappa1"] = -0.1
        doc["kappa2"] = 1.5  # uncovered regime quadrant
        bad = tmp_path / "cand_regime.json"
        bad.write_text(json.dumps(doc))
        code = main([
            "augment", str(artifacts / "model1.json"), str(bad), "--out", str(tmp_path),
        ])
        assert code == 1
        assert "unsupported regime" in capsys.readouterr().err

    def test_bound_precondition_exit_one(self, artifacts, tmp_path, capsys):
        out1 = tmp_path / "a"
        main([
            "augment", str(artifacts / "model1.json"), str(artifacts / "cand1.json"),
            "--eps2", "8", "--out", str(out1),
        ])
        code = main([
            "bound", str(out1 / "acbc.json"), "--horizon", "-5", "--out", str(tmp_path),
        ])
        assert code == 1
        assert "horizon" in capsys.readouterr().err

    def test_json_trajectory_format(self, artifacts, tmp_path):
        code = main([
            "simulate", str(artifacts / "model1.json"), str(artifacts / "cand1.json"),
            "--runs", "1", "--horizon", "5", "--format", "json",
            "--out", str(tmp_path), "--keep-trajectories", "1",
        ])
        assert code == 0
        doc = json.loads((tmp_path / "trajectory_0000.json").read_text())
        assert doc[0]["k"] == 0 and doc[0]["scenario"] == "init"


class TestSynthesizeCommand:
    def test_warm_start_repair(self, artifacts, tmp_path):
        code = main([
            "synthesize", str(artifacts / "model1.json"),
            "--warm-start", str(artifacts / "cand1.json"),
            "--out", str(tmp_path),
        ])
        assert code == 0
        report = json.loads((tmp_path / "synth_report.json").read_text())
        assert report["feasible"] is True
        cand = json.loads((tmp_path / "synthesized_candidate.json").read_text())
        assert max(sum(t["exp"]) for t in cand["Bbar"]["terms"]) == 4


class TestRepro:
    def test_case1_smoke(self, tmp_path, capsys):
        code = main(["repro", "1", "--runs", "40", "--seed", "3", "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "[bound] safety >= 0.944342" in out
        summary = json.loads((tmp_path / "case1_summary.json").read_text())
        assert summary["bound_rounded"]["safety_probability"] == pytest.approx(0.9443, abs=1e-4)
        assert summary["monte_carlo"]["n_trajectories"] == 40
        assert (tmp_path / "case1_traj_00.csv").exists()

    def test_unknown_case_rejected(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["repro", "9", "--out", str(tmp_path)])
