import csv
import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from frozenjacobi.cli import COLUMNS, main

SCHEMA = json.loads(resources.files("frozenjacobi").joinpath("schemas/output.schema.json").read_text())


def run_cli(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    return code, (out.read_bytes() if out.exists() else None)


def rows(data):
    return list(csv.reader(io.StringIO(data.decode())))


def test_frozen_csv(tmp_path):
    code, data = run_cli(tmp_path, "frozen", "--r", "0", "--s", "0", "--m", "8", "--t", "1.0")
    assert code == 0
    table = rows(data)
    assert table[0] == ["j", "root"] and len(table) == 9
    assert all(0 < float(r[1]) < 1 for r in table[1:])
    assert b"\r" not in data and data.endswith(b"\n")
    # 17 significant digits
    assert all(len(r[1].replace("0.", "", 1).lstrip("0")) >= 15 for r in table[1:])


def test_frozen_grid_columns(tmp_path):
    code, data = run_cli(tmp_path, "frozen", "--m", "3", "--t-grid", "0.5,1,2")
    assert code == 0
    table = rows(data)
    assert table[0] == list(COLUMNS["frozen_grid"]) and len(table) == 10


def test_szego_json(tmp_path):
    code, data = run_cli(tmp_path, "szego", "--m", "4", "--t", "0.5", "--samples", "100", "--format", "json")
    assert code == 0
    doc = json.loads(data)
    jsonschema.validate(doc, SCHEMA)
    assert doc["max_rel_error"] <= 1e-9


def test_converge_table(tmp_path):
    code, data = run_cli(tmp_path, "converge", "--lambda", "1", "--theta", "0.5", "--m-list", "16,32,64", "--t", "1.0")
    assert code == 0
    table = rows(data)
    assert table[0] == list(COLUMNS["converge"])
    by_ell = {}
    for m, ell, _, _, err in table[1:]:
        by_ell.setdefault(int(ell), []).append(float(err))
    for errs in by_ell.values():
        assert all(a >= b for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize(
    "args",
    [
        ["frozen", "--m", "5", "--t-grid", "0.2,1"],
        ["moments", "--t-grid", "0,0.5,1", "--horizon", "5"],
        ["transform", "--m", "12", "--t", "0.3"],
        ["szego", "--m", "3", "--t-grid", "0.1,0.5"],
        ["converge", "--m-list", "8,16", "--t", "0.5"],
        ["residual", "--m", "5", "--t", "1.0"],
    ],
)
def test_every_command_csv_and_json(tmp_path, args):
    for fmt in ("csv", "json"):
        code, a = run_cli(tmp_path, *args, "--format", fmt, name="a")
        code2, b = run_cli(tmp_path, *args, "--format", fmt, name="b")
        assert code == code2 == 0
        assert a == b  # byte-identical reruns
        if fmt == "json":
            jsonschema.validate(json.loads(a), SCHEMA)
        else:
            assert rows(a)[0][0] in {c[0] for c in COLUMNS.values()}


def test_residual_slope_column(tmp_path):
    code, data = run_cli(tmp_path, "residual", "--m", "6", "--t", "1.0")
    slopes = [float(r[2]) for r in rows(data)[2:4]]
    assert all(abs(s - 2) < 0.2 for s in slopes)


@pytest.mark.parametrize(
    "args",
    [
        ["frozen", "--t-grid", "1,0.5"],
        ["converge", "--m-list", "32,16"],
        ["moments", "--lambda", "3", "--theta", "0.5"],
        ["frozen", "--r", "-2"],
        ["residual", "--t", "0.001"],
        ["frozen", "--m", "0"],
    ],
)
def test_config_errors(tmp_path, capsys, args):
    code, _ = run_cli(tmp_path, *args)
    assert code == 2
    rec = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert rec["status"] == "error" and rec["exit_code"] == 2


def test_argparse_errors_exit_2():
    assert main(["frozen", "--m", "x"]) == 2
    assert main(["nope"]) == 2


def test_computation_error_exit_1(tmp_path, capsys):
    code, data = run_cli(tmp_path, "frozen", "--m", "171", "--t", "1.0")
    assert code == 1 and data is None
    rec = json.loads(capsys.readouterr().err.strip())
    assert rec["exit_code"] == 1 and rec["error"] == "OverflowError"


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "frozenjacobi.cli", "frozen", "--m", "2", "--t", "1"],
        capture_output=True, text=True, check=True,
    )
    assert res.stdout.splitlines()[0] == "j,root"
