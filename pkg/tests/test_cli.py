import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from deconvkde.cli import main


@pytest.fixture
def data_file(tmp_path):
    rng = np.random.default_rng(50)
    path = tmp_path / "x.txt"
    path.write_text("\n".join(repr(float(v)) for v in rng.normal(size=50) + rng.normal(0, 0.4, size=50)) + "\n")
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_estimate_csv(data_file, capsys):
    code, out, _ = run(["estimate", data_file, "--kernel", "fan", "--noise-sd", 0.4, "--bandwidth", 0.24], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "f_nh"] and len(rows) == 1025
    x = np.array([float(r[0]) for r in rows[1:]])
    f = np.array([float(r[1]) for r in rows[1:]])
    assert np.trapezoid(f, x) == pytest.approx(1.0, abs=0.02)


def test_estimate_json_and_out(data_file, tmp_path, capsys):
    out_path = tmp_path / "est.json"
    argv = ["estimate", data_file, "--noise-sd", 0.4, "--bandwidth", 0.24, "--format", "json", "--out", out_path]
    assert run(argv, capsys)[0] == 0
    payload = json.loads(out_path.read_text())
    assert {"x", "f"} <= set(payload) and len(payload["x"]) == len(payload["f"]) == 1024


def test_estimate_csv_column_with_header(tmp_path, capsys):
    path = tmp_path / "d.csv"
    path.write_text("id,value\n1,0.3\n2,-0.4\n3,1.2\n")
    code, out, _ = run(["estimate", path, "--column", 1, "--noise-sd", 0.4, "--bandwidth", 0.3], capsys)
    assert code == 0 and out.startswith("x,f_nh\n")


def test_estimate_selects_bandwidth_from_target(data_file, capsys):
    code, out, _ = run(["estimate", data_file, "--noise-sd", 0.4, "--target", "normal", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["h"] == 0.24


def test_estimate_without_bandwidth_is_usage_error(data_file, capsys):
    code, _, err = run(["estimate", data_file, "--noise-sd", 0.4], capsys)
    assert code == 2 and "--bandwidth" in err


def test_estimate_unreadable(tmp_path, capsys):
    code, _, err = run(["estimate", tmp_path / "missing.txt", "--noise-sd", 0.4, "--bandwidth", 0.3], capsys)
    assert code == 2 and "cannot read" in err


def test_estimate_bad_line(tmp_path, capsys):
    path = tmp_path / "d.txt"
    path.write_text("0.1\nabc\n")
    assert run(["estimate", path, "--noise-sd", 0.4, "--bandwidth", 0.3], capsys)[0] == 2


def test_estimate_overflow_exit_code(data_file, capsys):
    code, _, err = run(["estimate", data_file, "--noise-sd", 0.4, "--bandwidth", 0.01], capsys)
    assert code == 3 and "overflow" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["ratio"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["asym", "--noise-sd", "-1", "--bandwidth", "0.2", "--n", "50"])
    assert info.value.code == 2


def test_mise(capsys):
    code, out, err = run(["mise", "--noise-sd", 0.4, "--target", "normal", "--n", 50], capsys)
    assert code == 0 and "argmin h = 0.24" in err
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["h", "mise"] and len(rows) == 101
    assert rows[1] == ["0.01", ""]


def test_asym(capsys):
    code, out, _ = run(["asym", "--noise-sd", 0.4, "--bandwidth", 0.24, "--n", 50, "--format", "json"], capsys)
    payload = json.loads(out)
    assert code == 0
    assert round(payload["sigma"], 3) == 0.429 and round(payload["sigma_tilde"], 3) == 0.072


def test_ratio_default_range(capsys):
    code, out, _ = run(["ratio", "--noise-sd", 0.4], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["h", "ratio"] and len(rows) == 51
    h = [float(r[0]) for r in rows[1:]]
    assert h[0] == 0.02 and h[-1] == 1.0
    ratio = [float(r[1]) for r in rows[1:]]
    assert abs(ratio[0] - 1) < 0.02


def test_ratio_fan_monotone_approach(capsys):
    # stated shape: the ratio approaches one monotonically as h decreases over the emitted range
    _, out, _ = run(["ratio", "--noise-sd", 0.4], capsys)
    ratio = np.array([float(r[1]) for r in list(csv.reader(io.StringIO(out)))[1:]])
    dev = np.abs(ratio - 1)
    assert np.all(np.diff(dev) >= 0)


def test_ratio_sinc(capsys):
    code, out, _ = run(["ratio", "--kernel", "sinc", "--noise-sd", 0.4, "--format", "json"], capsys)
    payload = json.loads(out)
    assert code == 0 and len(payload["ratio"]) == 50 and all(r is not None for r in payload["ratio"])


def test_ratio_empty_range(capsys):
    code, _, err = run(["ratio", "--noise-sd", 0.4, "--h-min", 1.0, "--h-max", 0.5], capsys)
    assert code == 2 and "range" in err


def test_ratio_byte_stable(capsys):
    a = run(["ratio", "--kernel", "wand", "--noise-sd", 1.0], capsys)[1]
    b = run(["ratio", "--kernel", "wand", "--noise-sd", 1.0], capsys)[1]
    assert a == b


def test_study_outputs(tmp_path, capsys):
    out_dir = tmp_path / "t1"
    code, out, _ = run(["study", "table1", "--out", out_dir, "--replications", 30, "--bins", 5], capsys)
    assert code == 0
    assert "sigma_tilde" in out and "#3" in out
    report = json.loads((out_dir / "report.json").read_text())
    assert report["title"] == "Table 1" and len(report["reports"]) == 3
    assert all(len(p["estimates"]) == 30 for r in report["reports"] for p in r["points"])
    table = list(csv.reader((out_dir / "table_estimates.csv").open()))
    assert len(table) == 4 and len(table[0]) == 8
    assert len(next(csv.reader((out_dir / "table_fan.csv").open()))) == 6
    hists = sorted(p.name for p in out_dir.glob("hist_*.csv"))
    assert len(hists) == 12
    assert len((out_dir / hists[0]).read_text().splitlines()) == 6


def test_study_seed_override(tmp_path, capsys):
    def rows(seed):
        out_dir = tmp_path / f"s{seed}"
        assert run(["study", "table5", "--out", out_dir, "--replications", 20, "--seed", seed], capsys)[0] == 0
        return list(csv.reader((out_dir / "table_estimates.csv").open()))[1:]

    a, b = rows(1), rows(2)
    for ra, rb in zip(a, b):
        assert ra[1] == rb[1] and ra[6:] == rb[6:]
        assert ra[2:6] != rb[2:6]


def test_study_config_errors(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text('n = 0\nnoise = { sd = 0.4 }\neval_points = [0.0]\n[[scenarios]]\ntarget = "normal"\nkernel = "x"\n')
    code, _, err = run(["study", path, "--out", tmp_path / "o"], capsys)
    assert code == 2
    assert "n:" in err and "scenarios[0].kernel" in err


def test_study_missing_file(tmp_path, capsys):
    assert run(["study", tmp_path / "none.toml", "--out", tmp_path / "o"], capsys)[0] == 2


def test_console_script(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "deconvkde.cli", "asym", "--noise-sd", "0.4", "--bandwidth", "0.18", "--n", "50"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "h,n,sigma,sigma_tilde,ratio"
