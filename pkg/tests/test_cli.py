import json
import os
import re
import shlex
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from ptscatter.analysis import scan
from ptscatter.cli import JobConfig, run_cli
from ptscatter.model import CaseKind, PotentialParams
from ptscatter.report import SCAN_HEADER, read_scan_csv, scan_csv_text

ROOT = Path(__file__).resolve().parents[1]


def run(argv, capsys):
    code = run_cli(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_scan_csv_format(tmp_path, capsys):
    path = tmp_path / "scan.csv"
    code, _, _ = run(["scan", "--case", "mu-imag", "--v", "3.54", "--mu", "1.11", "--emin", "0.1", "--emax", "10", "--steps", "2000", "--out", str(path)], capsys)
    assert code == 0
    text = path.read_bytes().decode()
    lines = text.split("\n")
    assert lines[0] == "epsilon,R_left,R_right,T,defect,singular"
    assert "\r" not in text and text.endswith("\n")
    assert len(lines) == 2001 + 2
    first = lines[1].split(",")
    assert re.fullmatch(r"-?\d\.\d{14}e[+-]\d\d", first[0])
    assert first[-1] in ("0", "1")
    data = read_scan_csv(path)
    assert np.all(np.diff(data["epsilon"]) > 0)


def test_csv_round_trip(tmp_path):
    # 15 significant digits: stable after one pass, within 1e-14 of the doubles
    table = scan(PotentialParams(1.0, 0.3, CaseKind.MU_IMAGINARY), 1.0, 2.0, steps=2)
    path = tmp_path / "t.csv"
    path.write_text(scan_csv_text(table))
    data = read_scan_csv(path)
    for name in SCAN_HEADER[:-1]:
        assert np.allclose(data[name], getattr(table, name), rtol=1e-14, atol=0)
    lines = path.read_text().splitlines()[1:]
    rewritten = [",".join("{:.14e}".format(float(x)) for x in ln.split(",")[:-1]) for ln in lines]
    assert rewritten == [ln.rsplit(",", 1)[0] for ln in lines]


def test_singular_row_prints_inf(capsys):
    root = 0.18 * np.exp(-0.84) + 1.0
    code, out, _ = run(["scan", "--case", "d-imag", "--v", "0.18", "--mu", "0.42", "--emin", str(float(root - 1e-3)), "--emax", str(float(root + 1e-3)), "--steps", "2"], capsys)
    assert code == 0
    row = out.splitlines()[2].split(",")
    assert row[1] == "inf" and row[-1] == "1"


def test_bound_table(capsys):
    code, out, _ = run(["bound", "--v", "1", "--mu", "0.261799"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,b_n,im_a_n,epsilon_n,re_A_n,im_A_n"
    assert len(lines) == 2
    assert abs(float(lines[1].split(",")[3]) - 0.701651) < 5e-6


def test_verify_passes(capsys):
    code, out, _ = run(["verify", "--case", "mu-imag", "--v", "1", "--mu", "0.261799", "--samples", "20", "--tol", "1e-6"], capsys)
    assert code == 0
    assert out.rstrip().endswith("PASSED")


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(["verify", "--v", "1", "--mu", "0.261799", "--samples", "3", "--tol", "1e-20"], capsys)
    assert code == 3 and "FAILED" in out


def test_verify_free_states(capsys):
    code, out, _ = run(["verify", "--case", "d-imag", "--v", "0.18", "--mu", "0.42", "--emin", "0.01", "--emax", "5"], capsys)
    assert code == 0 and out.count("ss epsilon=") == 2


def test_unknown_flag(capsys):
    code, _, err = run(["scan", "--bogus"], capsys)
    assert code == 2 and "usage" in err


def test_no_command(capsys):
    code, _, err = run([], capsys)
    assert code == 2 and "usage" in err


def test_regime_error_names_window(capsys):
    code, _, err = run(["scan", "--case", "d-imag", "--v", "1", "--mu", "0.5", "--emin", "-0.2", "--emax", "0.3"], capsys)
    assert code == 2 and "penetrating" in err


def test_unwritable_output(tmp_path, capsys):
    code, _, err = run(["bound", "--v", "1", "--mu", "0.3", "--out", str(tmp_path / "missing" / "x.csv")], capsys)
    assert code == 1 and "cannot write" in err


def test_features_json(capsys):
    code, out, _ = run(["features", "--v", "3.54", "--mu", "1.11", "--emin", "0.1", "--emax", "10", "--kind", "invisible-left"], capsys)
    assert code == 0
    data = json.loads(out)
    assert len(data) == 1 and set(data[0]) == {"kind", "epsilon", "residual", "refined"}
    assert data[0]["kind"] == "invisible-left"


def test_features_empty_json(capsys):
    code, out, _ = run(["features", "--case", "d-imag", "--v", "0.18", "--mu", "0.42", "--emin", "0.01", "--emax", "50", "--kind", "invisible-right"], capsys)
    assert code == 0 and json.loads(out) == []


def test_features_degenerate_note(capsys):
    code, out, err = run(["features", "--v", "2", "--mu", "0", "--emin", "2.1", "--emax", "6", "--kind", "reciprocity"], capsys)
    assert code == 0 and json.loads(out) == [] and "degenerate" in err


def test_job_round_trip(tmp_path, capsys):
    job_path = tmp_path / "job.json"
    argv = ["features", "--v", "1", "--mu", "0.261799", "--emin", "0.01", "--emax", "5", "--kind", "reciprocity"]
    code, direct, _ = run(["--save-job", str(job_path)] + argv, capsys)
    assert code == 0
    job = JobConfig.from_json(job_path.read_text())
    assert JobConfig.from_json(job.to_json()) == job
    code, replay, _ = run(["--job", str(job_path)], capsys)
    assert code == 0 and replay == direct


def test_job_rejects_unknown_keys():
    with pytest.raises(ValueError):
        JobConfig.from_dict({"command": "scan", "colour": "red"})


def _cli(args, env=None, cwd=None, timeout=120):
    return subprocess.run([sys.executable, "-m", "ptscatter.cli"] + args, capture_output=True, env=env, cwd=cwd, timeout=timeout)


def test_scan_independent_of_thread_cap():
    args = ["scan", "--v", "9.5", "--mu", "6.2832", "--emin", "0.05", "--emax", "9.4"]
    outs = []
    for threads in ("1", "4"):
        env = dict(os.environ, PTSCATTER_THREADS=threads)
        outs.append(_cli(args, env=env).stdout)
    assert outs[0] == outs[1] and len(outs[0]) > 0


def test_figure_svg_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.svg", tmp_path / "b.svg"]
    for p in paths:
        assert run(["figure", "--id", "3a", "--out", str(p)], capsys)[0] == 0
    a, b = (p.read_bytes() for p in paths)
    assert a == b and b"<svg" in a


def test_all_figures_run(tmp_path, capsys):
    for fid in ("2a", "3a", "3b", "4a", "4b", "4c", "5", "6a", "6b"):
        code, out, _ = run(["figure", "--id", fid, "--out", str(tmp_path / f"{fid}.svg"), "--csv", str(tmp_path / f"{fid}.csv")], capsys)
        assert code == 0, fid
        assert (tmp_path / f"{fid}.svg").exists() and (tmp_path / f"{fid}.csv").exists()


def readme_commands():
    text = (ROOT / "README.md").read_text()
    blocks = re.findall(r"```(?:sh|bash)\n(.*?)```", text, re.S)
    return [line.strip() for b in blocks for line in b.splitlines() if line.strip().startswith("ptscatter ")]


@pytest.mark.parametrize("command", readme_commands())
def test_readme_example_runs_quickly(command, tmp_path):
    args = shlex.split(command)[1:]
    t0 = time.perf_counter()
    proc = _cli(args, cwd=tmp_path, timeout=60)
    elapsed = time.perf_counter() - t0
    assert proc.returncode == 0, proc.stderr.decode()
    assert elapsed < 30
