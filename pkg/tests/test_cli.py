import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from spinchannel import ModelParams
from spinchannel.cli import RunConfig, figure_config, main, render, SweepRecord
from spinchannel.errors import ConfigError


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_echo_subcommand(capsys):
    code, out, _ = run_cli(["echo", "--n", "2", "--x", "gg", "--y", "ee", "--time-max", "0.5", "--time-steps", "1"],
                           capsys)
    assert code == 0
    (row,) = rows_of(out)
    assert complex(float(row["re"]), float(row["im"])) == pytest.approx(0.9988379320337941 + 0.04484698968467982j)


def test_fidelity_exact_rows(capsys):
    code, out, _ = run_cli(["fidelity", "--n", "3", "--epsilon", "0.2", "--time-max", "2", "--time-steps", "3"],
                           capsys)
    assert code == 0
    rows = rows_of(out)
    assert [float(r["t"]) for r in rows] == [0.0, 1.0, 2.0]
    assert float(rows[0]["value"]) == pytest.approx(1.0)
    assert all(r["n_samples"] == "0" and r["std_error"] == "0" for r in rows)


def test_sampled_output_is_seed_deterministic(capsys):
    argv = ["purity", "--n", "8", "--samples", "200", "--time-max", "3", "--time-steps", "4"]
    _, a, _ = run_cli(argv + ["--seed", "5"], capsys)
    _, b, _ = run_cli(argv + ["--seed", "5", "--threads", "2"], capsys)
    _, c, _ = run_cli(argv + ["--seed", "6"], capsys)
    assert a == b
    assert a != c


def test_json_format(capsys):
    code, out, _ = run_cli(["purity", "--n", "2", "--time-steps", "2", "--format", "json"], capsys)
    data = json.loads(out)
    assert code == 0 and len(data) == 2
    assert set(data[0]) == set(SweepRecord.__dataclass_fields__)


def test_dump_config_round_trip(tmp_path, capsys):
    code, out, _ = run_cli(["fidelity", "--n", "5", "--lambda-grid", "0.5:1.0:0.25", "--samples", "30",
                            "--dump-config"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["lambda_grid"] == [0.5, 0.75, 1.0]
    path = tmp_path / "cfg.json"
    path.write_text(out)
    code, out2, _ = run_cli(["fidelity", "--config", str(path), "--dump-config"], capsys)
    assert json.loads(out2) == data
    assert RunConfig.from_dict(data).to_dict() == data


def test_flags_override_config(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"model": {"n_qubits": 3, "lam": 0.5}, "seed": 1}))
    _, out, _ = run_cli(["fidelity", "--config", str(path), "--lambda", "0.7", "--dump-config"], capsys)
    data = json.loads(out)
    assert data["model"]["lam"] == 0.7 and data["model"]["n_qubits"] == 3 and data["seed"] == 1


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = run_cli(["fidelity", "--n", "2", "--time-steps", "2", "--output", str(target)], capsys)
    assert code == 0 and out == ""
    assert len(rows_of(target.read_text())) == 2


@pytest.mark.parametrize("argv", [
    ["fidelity", "--n", "13", "--time-steps", "2"],
    ["echo", "--n", "2"],
    ["fidelity", "--n", "2", "--gamma", "3"],
    ["fidelity", "--n", "2", "--samples", "0"],
    ["figure", "--figure-id", "9"],
])
def test_errors_exit_nonzero(argv, capsys):
    code, out, err = run_cli(argv, capsys)
    assert code == 1
    assert err.startswith("error:")


def test_bad_config_file(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"model": {"n_qubits": 3}, "mystery": 1}))
    code, _, err = run_cli(["fidelity", "--config", str(path)], capsys)
    assert code == 1 and "mystery" in err


def test_scan_lambda_reports_peak(capsys):
    code, out, _ = run_cli(["scan-lambda", "--n", "4", "--lambda-grid", "0.8,1.0,1.2", "--time-max", "4",
                            "--time-steps", "17"], capsys)
    rows = rows_of(out)
    assert code == 0
    assert [r["quantity"] for r in rows].count("alpha") == 3
    assert rows[-1]["quantity"] == "dalpha_peak"


def test_entropy_rows(capsys):
    code, out, _ = run_cli(["entropy", "--n", "3", "--epsilon", "0.4", "--time-max", "3", "--time-steps", "2"], capsys)
    rows = rows_of(out)
    at3 = {r["quantity"]: float(r["value"]) for r in rows if float(r["t"]) == 3.0}
    assert at3["renyi_lower_bound"] <= at3["channel_entropy"] <= at3["fano_upper_bound"]
    assert at3["hashing_bound"] == pytest.approx(3 - at3["channel_entropy"])


def test_haar_check_rows(capsys):
    code, out, _ = run_cli(["haar-check", "--dim", "4", "--samples", "20000", "--seed", "3"], capsys)
    rows = rows_of(out)
    assert code == 0
    assert [r["pair_class"] for r in rows] == ["x=y", "x!=y", "normalization"]


def test_oracle_verify_subcommand(capsys):
    code, out, _ = run_cli(["oracle-verify", "--cases", "10", "--seed", "1"], capsys)
    assert code == 0
    assert rows_of(out)[-1]["status"] == "PASS"


def test_figure_configs_respect_desk_limits():
    for fid in (3, 4, 5, 6, 7):
        for sub, cfg in figure_config(fid, "desk"):
            assert cfg.model.n_qubits <= 16
            assert cfg.n_samples is None or cfg.n_samples <= 10_000
    with pytest.raises(ConfigError):
        figure_config(3, "huge")


def test_render_csv_precision():
    rec = SweepRecord.of(ModelParams(n_qubits=1), 0.1, "fidelity", 1 / 3)
    row = rows_of(render([rec]))[0]
    assert float(row["value"]) == 1 / 3
    assert float(row["t"]) == 0.1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "spinchannel", "fidelity", "--n", "1", "--time-steps", "1"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0].startswith("n,m,gamma")
