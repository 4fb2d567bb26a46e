import csv
import json
import subprocess
import sys

import pytest
import yaml

from gaudin_opers.cli import ConfigError, load_config, main


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def write_cfg(tmp_path, data, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data))
    return str(p)


def test_verify_a2(tmp_path):
    out = tmp_path / "v"
    assert main(["verify", "--out", str(out)]) == 0
    res = json.loads((out / "results.json").read_text())
    assert res["passed"] and all(res["checks"].values())
    man = json.loads((out / "manifest.json").read_text())
    assert {"inputs", "versions", "seed", "timings", "files"} <= set(man)


def test_identity_suite_kind_accepted(tmp_path):
    cfg = write_cfg(tmp_path, {"kind": "identity-suite", "algebra": "A1"})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 0


def test_rigidity_one_pass_row(tmp_path):
    out = tmp_path / "r"
    assert main(["rigidity", "--out", str(out)]) == 0
    rows = read_rows(out / "rigidity.csv")
    assert len(rows) == 9
    passing = [r for r in rows if r["passed"] == "True"]
    assert len(passing) == 1 and float(passing[0]["u_re"]) == 0 and float(passing[0]["u_im"]) == 0
    assert all(r["tol"] for r in rows)


def test_rigidity_gate_failure(tmp_path):
    assert main(["rigidity", "--tol", "1e-30", "--out", str(tmp_path / "r")]) == 2
    assert (tmp_path / "r" / "rigidity.csv").exists()


def test_spectrum_v3(tmp_path):
    out = tmp_path / "s"
    assert main(["spectrum", "--seed", "7", "--out", str(out)]) == 0
    rows = read_rows(out / "spectrum.csv")
    assert len(rows) == 4
    assert all(float(r["min_gap"]) > 0 for r in rows)
    assert all(r["monodromy_passed"] == "True" for r in rows)


def test_spectrum_requires_seed():
    with pytest.raises(ConfigError):
        load_config("spectrum", None, {})
    assert main(["spectrum"]) == 1


def test_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["spectrum", "--seed", "3", "--out", str(a)]) == 0
    assert main(["spectrum", "--seed", "3", "--out", str(b)]) == 0
    for name in ("results.json", "spectrum.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma = json.loads((a / "manifest.json").read_text())
    mb = json.loads((b / "manifest.json").read_text())
    ma.pop("timings"), mb.pop("timings")
    ma["inputs"].pop("out"), mb["inputs"].pop("out")
    assert ma == mb


def test_cyclicity(tmp_path):
    cfg = write_cfg(tmp_path, {"algebra": "A2", "weights": [[1, 0], [1, 1]]})
    out = tmp_path / "c"
    assert main(["cyclicity", "--config", cfg, "--out", str(out)]) == 0
    rows = read_rows(out / "cyclicity.csv")
    assert [int(r["cyclic_span"]) for r in rows] == [3, 8]


def test_limit(tmp_path):
    out = tmp_path / "l"
    assert main(["limit", "--out", str(out)]) == 0
    res = json.loads((out / "results.json").read_text())
    assert res["monotone"]


@pytest.mark.parametrize(
    "kind,data,message",
    [
        ("spectrum", {"z": ["0", "0"], "weights": [[1], [1]], "seed": 1}, "distinct"),
        ("spectrum", {"algebra": "B2", "weights": [[1, 0]], "seed": 1}, "A-series"),
        ("spectrum", {"weights": [[-1]], "seed": 1}, "dominant"),
        ("spectrum", {"weights": [[1, 0]], "seed": 1}, "rank"),
        ("limit", {"mu": {"kind": "principal-nilpotent"}}, "semisimple"),
        ("limit", {"s_values": [100, 10]}, "increasing"),
        ("rigidity", {"lam": "1/3"}, "half-integer"),
        ("verify", {"bogus": 1}, "unknown"),
        ("rigidity", {"kind": "limit"}, "does not match"),
    ],
)
def test_config_errors(tmp_path, kind, data, message):
    cfg = write_cfg(tmp_path, data)
    with pytest.raises(ConfigError, match=message):
        load_config(kind, cfg, {})
    assert main([kind, "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_missing_config_file(tmp_path):
    assert main(["verify", "--config", str(tmp_path / "nope.yaml")]) == 1


def test_bad_subcommand():
    assert main(["frobnicate"]) == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "gaudin_opers.cli", "rigidity", "--out", str(tmp_path / "r")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "rigidity: pass" in proc.stdout
