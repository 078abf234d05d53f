import json

import numpy as np
import pytest

from weakdelay import FormatError, read_record, write_record
from weakdelay.cli import main

from conftest import PHI_JWM


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture()
def config_path(tmp_path):
    doc = {
        "phi_actual_rad": PHI_JWM,
        "photons": 0,
        "tau_true_fs": 0.01,  # 1e-17 s
        "seed": 7,
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(doc))
    return path


class TestSimulateCommand:
    def test_writes_record_and_sidecar(self, config_path, tmp_path, capsys):
        out = tmp_path / "rec.csv"
        code, stdout, _ = run(["simulate", "--config", str(config_path),
                               "--out", str(out)], capsys)
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "wavelength_nm,counts_port1,counts_port2"
        assert len(lines) == 2101 + 1
        sidecar = json.loads((tmp_path / "rec.config.json").read_text())
        assert sidecar["seed"] == 7
        assert sidecar["source"]["center_nm"] == 780.0

    def test_noise_free_weights_sum_to_one(self, config_path, tmp_path, capsys):
        out = tmp_path / "rec.csv"
        run(["simulate", "--config", str(config_path), "--out", str(out)], capsys)
        rec = read_record(out)
        assert rec.total_weight() == pytest.approx(1.0, abs=1e-9)

    def test_deterministic_output(self, tmp_path, capsys):
        doc = {"phi_actual_rad": PHI_JWM, "photons": 50_000,
               "tau_true_fs": 0.01, "seed": 3}
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(doc))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(["simulate", "--config", str(cfg), "--out", str(a)], capsys)
        run(["simulate", "--config", str(cfg), "--out", str(b)], capsys)
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_config_key_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"phi_rad": 1.0}))
        code, _, err = run(["simulate", "--config", str(cfg),
                            "--out", str(tmp_path / "x.csv")], capsys)
        assert code == 2
        assert "phi_rad" in err


class TestEstimateCommand:
    @pytest.fixture()
    def record_path(self, config_path, tmp_path, capsys):
        out = tmp_path / "rec.csv"
        run(["simulate", "--config", str(config_path), "--out", str(out)], capsys)
        return out

    def test_round_trip_exact(self, record_path, capsys):
        code, stdout, _ = run(["estimate", "--records", str(record_path),
                               "--method", "exact", "--phi", str(PHI_JWM)], capsys)
        assert code == 0
        result = json.loads(stdout)
        assert result["method"] == "exact"
        assert result["tau_s"] == pytest.approx(1e-17, rel=1e-4)
        assert result["tau_fs"] == pytest.approx(0.01, rel=1e-4)

    def test_all_methods_emits_seven_results(self, record_path, capsys):
        code, stdout, _ = run(["estimate", "--records", str(record_path),
                               "--phi", str(PHI_JWM)], capsys)
        assert code == 0
        results = json.loads(stdout)
        assert len(results) == 7
        assert {r["method"] for r in results} == {
            "exact", "quartic", "first_order", "jwm_simplified",
            "strubi_reference", "wva_first_order", "wva_mean_shift"}

    def test_malformed_row_exits_2_with_row_number(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("wavelength_nm,counts_port1,counts_port2\n"
                       "700.0,1.0,2.0\n700.0,1.0,2.0\n")
        code, _, err = run(["estimate", "--records", str(bad),
                            "--method", "first_order", "--phi", "1.0"], capsys)
        assert code == 2
        assert "row 3" in err

    def test_model_error_exits_1(self, tmp_path, capsys):
        empty_port = tmp_path / "empty.csv"
        empty_port.write_text("wavelength_nm,counts_port1,counts_port2\n"
                              "700.0,5,0\n701.0,5,0\n")
        code, _, err = run(["estimate", "--records", str(empty_port),
                            "--method", "wva_first_order", "--phi", "0.03"],
                           capsys)
        assert code == 1
        assert "error" in err


class TestSweepCommand:
    def test_three_step_sweep_with_zero(self, config_path, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code, _, _ = run(["sweep", "--config", str(config_path),
                          "--theta-min", "0", "--theta-max", "4e-5",
                          "--steps", "3", "--out", str(out)], capsys)
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "theta_rad,tau_theory_s,tau_exact_s,tau_first_order_s,tau_jwm_s"
        assert len(lines) == 4
        first = [float(v) for v in lines[1].split(",")]
        assert all(abs(v) < 1e-22 for v in first)

    def test_wva_mode_drops_jwm_column(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"phi_actual_rad": 0.03, "photons": 0}))
        out = tmp_path / "sweep.csv"
        code, _, _ = run(["sweep", "--config", str(cfg), "--theta-min", "1e-5",
                          "--theta-max", "3e-5", "--steps", "2",
                          "--out", str(out)], capsys)
        assert code == 0
        header = out.read_text().splitlines()[0]
        assert header == "theta_rad,tau_theory_s,tau_exact_s,tau_first_order_s"


class TestSnrCommand:
    def test_row_per_alpha_phi_pair(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"phi_actual_rad": 0.03, "photons": 100000,
                                   "seed": 1}))
        out = tmp_path / "snr.csv"
        code, _, _ = run(["snr", "--config", str(cfg), "--alphas", "0.005,0.01",
                          "--phi-actual", "0.03", "--phi-assumed", "0.03,0.05",
                          "--trials", "30", "--out", str(out)], capsys)
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "alpha,phi_assumed,snr_db,trials"
        assert len(lines) == 1 + 4


class TestAnalyticCommand:
    def test_alpha_min_defaults(self, capsys):
        code, stdout, _ = run(["analytic", "--alpha-min", "--epsilon", "0.0027"],
                              capsys)
        assert code == 0
        doc = json.loads(stdout)
        assert doc["alpha_min"] == pytest.approx(0.010, abs=2e-4)
        assert doc["alpha_min_per_epsilon"] == pytest.approx(3.7165, abs=5e-4)

    def test_uncertainty_requires_alpha_beta(self, capsys):
        code, _, err = run(["analytic", "--uncertainty"], capsys)
        assert code == 2

    def test_uncertainty_value(self, capsys):
        code, stdout, _ = run(["analytic", "--uncertainty", "--alpha", "0.01",
                               "--beta", "0.01"], capsys)
        assert code == 0
        doc = json.loads(stdout)
        c = 780.0 * 0.1 / (4 * 17.6 ** 2)
        assert doc["delta_alpha"] == pytest.approx(4 * c * 0.01, rel=1e-9)


class TestRecordRoundTrip:
    def test_write_read_write_is_lossless(self, tmp_path):
        rng = np.random.default_rng(0)
        from weakdelay import MeasurementRecord, Spectrum
        grid = np.linspace(690.0, 900.0, 2101)
        w1 = rng.random(2101) * 1e-3
        w2 = rng.random(2101) * 1e-3
        rec = MeasurementRecord(port1=Spectrum(grid, w1),
                                port2=Spectrum(grid, w2), total_events=0)
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        write_record(p1, rec)
        rec2 = read_record(p1)
        assert np.array_equal(rec2.port1.weights, w1)
        assert np.array_equal(rec2.port2.weights, w2)
        write_record(p2, rec2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_reject_negative_counts(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("wavelength_nm,counts_port1,counts_port2\n"
                       "700.0,-1.0,2.0\n701.0,1.0,2.0\n")
        with pytest.raises(FormatError, match="row 2"):
            read_record(bad)

    def test_reject_nan(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("wavelength_nm,counts_port1,counts_port2\n"
                       "700.0,nan,2.0\n701.0,1.0,2.0\n")
        with pytest.raises(FormatError, match="row 2"):
            read_record(bad)
