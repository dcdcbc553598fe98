import json

import numpy as np
import pytest

from latdec.cli import main


def write_config(tmp_path, **over):
    cfg = dict(n_t=2, n_r=2, qam=4, decoders=["zf", "lll_sic"],
               snr_grid=[8.0], trials=24, min_errors=3, seed=7)
    cfg.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return path


def test_ber_deterministic_across_threads(tmp_path):
    cfg = write_config(tmp_path)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["ber", "--config", str(cfg), "--out", str(out1),
                 "--threads", "1"]) == 0
    assert main(["ber", "--config", str(cfg), "--out", str(out2),
                 "--threads", "3"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    header = out1.read_text().splitlines()[1]
    assert header.split(",")[:2] == ["snr_db", "decoder"]


def test_ber_seed_override_changes_output(tmp_path):
    cfg = write_config(tmp_path)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["ber", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["ber", "--config", str(cfg), "--seed", "99",
                 "--out", str(out2)]) == 0
    assert out1.read_bytes() != out2.read_bytes()


def test_config_error_exit_code(tmp_path):
    cfg = write_config(tmp_path, qam=12)
    assert main(["ber", "--config", str(cfg)]) == 2
    missing = tmp_path / "nope.json"
    assert main(["ber", "--config", str(missing)]) == 2
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{", encoding="utf-8")
    assert main(["ber", "--config", str(bad_json)]) == 2


def test_budget_exit_code(tmp_path):
    cfg = write_config(tmp_path, n_t=8, n_r=8, decoders=["ml_oracle"])
    assert main(["ber", "--config", str(cfg)]) == 4


def test_factors_command(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["factors", "--dims", "2,3", "--trials", "5",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1].startswith("n,trials,")
    assert len(lines) == 4


def test_radius_command_exit_codes(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["radius", "--dim", "3", "--trials", "15",
                 "--out", str(out)]) == 0
    meta = json.loads(out.read_text().splitlines()[0][2:])
    assert meta["violations"] == 0


def test_reduce_command(tmp_path):
    basis = tmp_path / "basis.txt"
    basis.write_text("1 0 0\n0 80 0\n0 0 80\n", encoding="utf-8")
    out = tmp_path / "report.txt"
    assert main(["reduce", "--basis", str(basis), "--out", str(out)]) == 0
    text = out.read_text()
    assert "norm: 1.0" in text
    assert "solver_calls: 3" in text
    assert main(["reduce", "--basis", str(basis), "--method", "fast"]) == 0
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n3\n", encoding="utf-8")
    assert main(["reduce", "--basis", str(bad)]) == 2


def test_opcount_command(tmp_path):
    out = tmp_path / "ops.csv"
    assert main(["opcount", "--nt-list", "2", "--trials", "4", "--qam", "4",
                 "--decoders", "zf,sic", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "n,decoder,trials,mean_mul_adds"
    assert len(lines) == 4


def test_opcount_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["opcount", "--nt-list", "2", "--trials", "6", "--qam", "4",
            "--decoders", "zf,lll_sic"]
    assert main(args + ["--out", str(a), "--threads", "1"]) == 0
    assert main(args + ["--out", str(b), "--threads", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
