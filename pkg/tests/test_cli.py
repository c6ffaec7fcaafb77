import csv
import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from attainment_lab import cli
from attainment_lab.attainment import DiagnosisReport
from attainment_lab.errors import ConsistencyError
from attainment_lab.svg import HEIGHT, MARGIN, WIDTH, Viewport


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_analyze_P(tmp_path):
    assert run(tmp_path, "analyze", "--n", "2") == 3
    data = json.loads((tmp_path / "analysis.json").read_text())
    assert data["classification"] == "AttainmentSuspect"
    assert data["dual"]["value"] == 0.0
    assert data["version"] and data["config"]["command"] == "analyze"
    assert [d["topic"] for d in data["discrepancies"]] == ["slater"]
    assert json.loads(json.dumps(DiagnosisReport.from_dict(data).to_dict())) == data


def test_analyze_P3(tmp_path):
    assert run(tmp_path, "analyze", "--n", "3") == 3
    data = json.loads((tmp_path / "analysis.json").read_text())
    assert data["classification"] == "Unbounded"
    assert any(d["topic"] == "copositivity-all-ones" for d in data["discrepancies"])


def test_analyze_solvable(tmp_path):
    assert run(tmp_path, "analyze", "--n", "2", "--objective", "1,0") == 0
    assert json.loads((tmp_path / "analysis.json").read_text())["classification"] == "SolvableCertain"


def test_analyze_round_trip_equal(tmp_path):
    run(tmp_path, "analyze")
    text = (tmp_path / "analysis.json").read_text()
    rep = DiagnosisReport.from_dict(json.loads(text))
    assert json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n" == text


def test_sequence(tmp_path):
    assert run(tmp_path, "sequence", "--k-max", "1") == 0
    rows = read_csv(tmp_path / "sequence.csv")
    assert rows[0] == ["k", "x1", "x2", "f", "dir_err"]
    assert len(rows) == 3
    assert float(rows[1][3]) == 1.0 and float(rows[2][3]) == pytest.approx(math.sqrt(2) - 1, abs=1e-15)
    run(tmp_path, "sequence", "--k-max", "1000")
    rows = read_csv(tmp_path / "sequence.csv")
    assert float(rows[-1][4]) <= 1e-3
    # 17 significant digits round-trip the binary values exactly
    assert float(rows[2][1]) == math.sqrt(2)


def test_regpath(tmp_path):
    assert run(tmp_path, "regpath") == 0
    rows = read_csv(tmp_path / "regpath.csv")
    assert rows[0] == ["k", "epsilon", "f", "x_norm", "kkt"]
    f = np.array([float(r[2]) for r in rows[1:]])
    assert np.all(np.diff(f) < 0) and f[-1] <= 1e-2
    assert (tmp_path / "figure2.svg").exists()


def test_regpath_csv_only(tmp_path):
    assert run(tmp_path, "regpath", "--k-max", "64", "--formats", "csv") == 0
    assert (tmp_path / "regpath.csv").exists()
    assert not (tmp_path / "figure2.svg").exists()


def test_poly(tmp_path):
    assert run(tmp_path, "poly", "--k-max", "2", "--theta-count", "8", "--include-endpoints", "false") == 0
    rows = read_csv(tmp_path / "poly.csv")
    assert rows[0] == ["kind", "size", "status", "value", "verified"]
    inner = [r for r in rows[1:] if r[0] == "inner"]
    outer = [r for r in rows[1:] if r[0] == "outer"]
    np.testing.assert_allclose([float(r[3]) for r in inner], [1, math.sqrt(2) - 1, math.sqrt(5) - 2], atol=1e-9)
    assert all(r[2] == "unbounded" and r[4] == "true" for r in outer)
    assert len(outer) == 8


def test_figure1(tmp_path):
    assert run(tmp_path, "figure1") == 0
    svg = (tmp_path / "figure1.svg").read_text()
    assert svg.count("<polyline") == 1
    pts = re.search(r'<polyline points="([^"]+)"', svg).group(1).split()
    assert len(pts) >= 256
    assert '<polygon' in svg and 'fill="#cccccc"' in svg
    m = re.search(r'<circle cx="([\d.]+)" cy="([\d.]+)"[^>]*data-k="1" data-x1="([^"]+)" data-x2="([^"]+)"', svg)
    assert float(m.group(3)) == math.sqrt(2) and float(m.group(4)) == -1.0
    # pixel position maps back to (x2, x1) = (-1, sqrt 2)
    k_max = 5
    half = k_max + 1.5
    vp = Viewport(-half, half, 0.0, math.sqrt(1 + half * half) + 0.5)
    x2, x1 = vp.to_data(float(m.group(1)), float(m.group(2)))
    assert abs(x2 + 1) <= 1e-3 and abs(x1 - math.sqrt(2)) <= 1e-3
    assert f'viewBox="0 0 {WIDTH} {HEIGHT}"' in svg


def test_figures_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        run(d, "figure1")
        run(d, "regpath", "--k-max", "1024")
        run(d, "analyze", "--n", "3")
    for name in ("figure1.svg", "figure2.svg", "regpath.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    # reports differ only in the recorded output directory
    ja, jb = (json.loads((d / "analysis.json").read_text()) for d in (a, b))
    assert ja["config"].pop("output_dir") != jb["config"].pop("output_dir")
    assert ja == jb


@pytest.mark.parametrize(
    "args",
    [
        ["sequence", "--n", "3"],
        ["poly", "--n", "3"],
        ["analyze", "--tol", "0"],
        ["analyze", "--k-max", "0"],
        ["poly", "--theta-count", "0"],
        ["analyze", "--formats", "json,pdf"],
        ["analyze", "--objective", "1,2,3"],
        ["analyze", "--include-endpoints", "maybe"],
        ["bogus"],
    ],
)
def test_usage_errors(tmp_path, args):
    with pytest.raises(SystemExit) as exc:
        run(tmp_path, *args)
    assert exc.value.code == 2
    assert not any(tmp_path.iterdir())


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise ConsistencyError("solvers disagree")

    monkeypatch.setattr(cli, "regularization_path", boom)
    assert run(tmp_path, "regpath") == 4
    # nothing is written when the computation fails
    assert not any(tmp_path.iterdir())


def test_console_script_end_to_end(tmp_path):
    exe = [sys.executable, "-m", "attainment_lab.cli"]
    res = subprocess.run(exe + ["analyze", "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 3 and "AttainmentSuspect" in res.stdout
    res = subprocess.run(exe + ["sequence", "--n", "4"], capture_output=True, text=True)
    assert res.returncode == 2 and "usage" in res.stderr
    res = subprocess.run(exe + ["figure1", "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0


def test_seed_env(monkeypatch):
    monkeypatch.delenv("ATTAINMENT_LAB_SEED", raising=False)
    assert cli.seed_from_env() == cli.DEFAULT_SEED
    monkeypatch.setenv("ATTAINMENT_LAB_SEED", "7")
    assert cli.seed_from_env() == 7
