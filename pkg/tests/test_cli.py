import json
import math
import subprocess
import sys

import pytest

from carleson_ns.cli import dumps_report, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _table(tmp_path, entries, n=2, name="c.json"):
    path = tmp_path / name
    payload = {"n": n, "entries": entries} if n is not None else {"entries": entries}
    path.write_text(json.dumps(payload))
    return str(path)


ONE = [{"eps": [1, 1], "j": 0, "k": [0, 0], "value": 1.0}]


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["verify", "--b", "0.4"], 2),
        (["verify", "--a", "0.6", "--b", "0.9"], 2),
        (["verify", "--n", "1", "--b", "0.3"], 2),
        (["verify", "--b", "1.0"], 2),
        (["synth", "--t", "1e-9", "--grid", "64"], 2),
        (["synth", "--t", "-1"], 2),
        (["synth", "--t", "0.1", "--grid", "100"], 2),
        (["verify", "--m-range", "1..4"], 3),
        (["meyer-check", "--transition-order", "1"], 0),
    ],
)
def test_exit_codes(argv, expected, capsys):
    code, _, _ = run(argv, capsys)
    assert code == expected


def test_gate_message_names_constraint(capsys):
    code, _, err = run(["verify", "--b", "0.4"], capsys)
    assert code == 2 and "n/2 + 2a - 1" in err


def test_nyquist_message_names_resolution(capsys):
    code, _, err = run(["synth", "--t", "1e-9", "--grid", "64"], capsys)
    assert code == 2 and "65536" in err


def test_verify_default_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, _, _ = run(["verify", "--out", str(out)], capsys)
    assert code == 0
    report = json.loads(out.read_text())
    assert report["claims"] == {"B.BMO": "pass", "B.lim-fails": "pass", "N-infty": "pass", "div-free": "pass"}
    assert list(report)[:7] == ["params", "bbmo", "blim", "blowup", "ninfty", "divergence_residual", "u2_bbmo"]
    assert abs(report["bbmo"][0]["value"] - 4.8284) <= 1e-3
    blim_csv = (tmp_path / "report_blim.csv").read_text().splitlines()
    assert blim_csv[0] == "t,c" and len(blim_csv) == 14
    bbmo_csv = (tmp_path / "report_bbmo.csv").read_text().splitlines()
    assert bbmo_csv[0] == "j0,S" and len(bbmo_csv) == 12


def test_verify_is_deterministic(tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["verify", "--out", str(first)], capsys)[0] == 0
    assert run(["verify", "--out", str(second)], capsys)[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_verify_three_dimensions(capsys):
    code, out, _ = run(["verify", "--n", "3", "--a", "0.3", "--b", "1.2", "--grid", "64"], capsys)
    assert code == 0
    assert json.loads(out)["claims"]["B.BMO"] == "pass"


def test_verify_csv_format(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert run(["verify", "--format", "csv", "--out", str(out)], capsys)[0] == 0
    assert out.read_text().startswith("t,c\n")
    assert (tmp_path / "curve_bbmo.csv").exists()


def test_unwritable_output(tmp_path, capsys):
    target = tmp_path / "missing-dir" / "r.json"
    code, _, err = run(["meyer-check", "--out", str(target)], capsys)
    assert code == 4 and "cannot write" in err


def test_meyer_check_report(capsys):
    code, out, _ = run(["meyer-check"], capsys)
    assert code == 0
    checks = json.loads(out)["checks"]
    assert checks["partition_dilation"]["residual"] <= 1e-12
    assert all(c["pass"] for c in checks.values())


def test_norm_examples(tmp_path, capsys):
    code, out, _ = run(["norm", _table(tmp_path, ONE)], capsys)
    assert code == 0 and float(out) == 1.0
    tripled = [dict(ONE[0], value=3.0)]
    code, out, _ = run(["norm", _table(tmp_path, tripled, name="t.json")], capsys)
    assert code == 0 and float(out) == pytest.approx(3.0, rel=1e-15)


def test_norm_breakdown_file(tmp_path, capsys):
    out = tmp_path / "norm.json"
    code, printed, _ = run(["norm", _table(tmp_path, ONE), "--q", "inf", "--out", str(out)], capsys)
    assert code == 0
    data = json.loads(out.read_text())
    assert data["q"] == "inf" and data["norm"] == float(printed)
    assert any(r["j"] == 0 and r["k"] == [0, 0] for r in data["roots"])


def test_norm_empty_table(tmp_path, capsys):
    code, out, err = run(["norm", _table(tmp_path, [])], capsys)
    assert code == 0 and float(out) == 0.0 and "empty" in err


@pytest.mark.parametrize(
    "content",
    [json.dumps({"entries": ONE}), "{broken", json.dumps({"n": 2, "entries": [{"j": 0}]})],
)
def test_norm_malformed_files(tmp_path, capsys, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    code, _, err = run(["norm", str(path)], capsys)
    assert code == 4 and err


def test_norm_missing_file(tmp_path, capsys):
    assert run(["norm", str(tmp_path / "nope.json")], capsys)[0] == 4


def test_synth_late_time_is_zero(capsys):
    code, out, _ = run(["synth", "--t", "2", "--grid", "16"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x1,x2,u1,u2" and len(lines) == 1 + 16 * 16
    assert all(float(v) == 0.0 for line in lines[1:] for v in line.split(",")[2:])


def test_synth_sidecar(tmp_path, capsys):
    out = tmp_path / "field.csv"
    code, _, _ = run(["synth", "--t", "0.0625", "--out", str(out)], capsys)
    assert code == 0
    meta = json.loads((tmp_path / "field_meta.json").read_text())
    assert meta["divergence_residual"] <= 1e-12
    assert math.isfinite(meta["sup_norm"])
    rows = out.read_text().splitlines()
    assert len(rows) == 1 + 256 * 256


def test_json_float_formatting():
    text = dumps_report({"x": 0.1, "y": [1, float("inf")], "z": "s", "w": None, "v": True})
    data = json.loads(text)
    assert data == {"x": 0.1, "y": [1, None], "z": "s", "w": None, "v": True}
    assert "0.10000000000000001" in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "carleson_ns", "verify", "--b", "0.4"], capture_output=True, text=True)
    assert proc.returncode == 2
