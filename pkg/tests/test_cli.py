import json
import subprocess
import sys

import pytest

from sardkit.cli import BUNDLED, run


def _numbers_are_tagged(node):
    if isinstance(node, dict):
        if set(node) in ({"exact"}, {"float"}):
            return True
        return all(_numbers_are_tagged(v) for v in node.values())
    if isinstance(node, list):
        return all(_numbers_are_tagged(v) for v in node)
    return not isinstance(node, (int, float)) or isinstance(node, bool)


def test_triple_table_on_r7():
    status, out, _ = run(["triple", "example_r7", "--json"])
    assert status == 0
    doc = json.loads(out)
    dims = {}
    for row in doc["results"]["dims"]:
        dims.setdefault(row["stratum"], set()).add(tuple(int(row[k]["exact"]) for k in "KJI"))
    assert dims == {"S1": {(2, 3, 4)}, "S2": {(2, 3, 3)}, "S3p": {(2, 3, 3)}, "S4": {(2, 3, 4)}, "S0": {(1, 1, 1)}}


@pytest.mark.parametrize(
    "argv",
    [
        ["validate", "example_r7"],
        ["brackets", "example_r7"],
        ["sigma", "martinet"],
        ["hamiltonians", "engel"],
        ["carnot", "free_nilpotent_2_3", "K", "--covector", "0,0,0,0,1"],
        ["integrate", "example_r7", "--start", "origin", "--T", "0.1", "--dt", "0.01"],
    ],
)
def test_output_is_deterministic_and_tagged(argv):
    first = run(argv + ["--json"])
    assert first == run(argv + ["--json"])
    assert first[0] == 0
    doc = json.loads(first[1])
    assert set(doc) == {"command", "model", "results", "warnings"}
    assert _numbers_are_tagged(doc["results"])
    assert run(argv)[1] == run(argv)[1]


def test_brackets_text():
    _, out, _ = run(["brackets", "example_r7"])
    assert "13111  5       -24*d7" in out
    assert "12    0" in out


def test_martinet_sigma_text():
    _, out, _ = run(["sigma", "martinet"])
    assert "x1 = 0" in out


def test_empty_file_fails(tmp_path):
    path = tmp_path / "empty.model"
    path.write_text("")
    status, out, err = run(["validate", str(path)])
    assert status != 0
    assert out == ""
    assert "1:1" in err


def test_parse_error_has_location(tmp_path):
    path = tmp_path / "bad.model"
    path.write_text("chart 7\nfield X = d9\n")
    status, _, err = run(["validate", str(path)])
    assert status == 2
    assert "2:11: arity mismatch" in err


def test_unknown_command():
    with pytest.raises(SystemExit) as info:
        run(["bogus", "heisenberg"])
    assert info.value.code != 0


def test_unknown_model():
    status, _, err = run(["validate", "no_such_model"])
    assert status == 2
    assert "no_such_model" in err


def test_point_off_annihilator_is_rejected():
    status, _, err = run(["classify", "heisenberg", "--point", "(0,0,0 ; 1,0,0)"])
    assert status == 1
    assert "annihilator" in err


@pytest.mark.parametrize("name", BUNDLED)
def test_validate_bundled(name):
    status, out, _ = run(["validate", name])
    assert status == 0
    assert "status: ok" in out


def test_integrate_writes_trajectory(tmp_path):
    out_path = tmp_path / "traj.txt"
    status, _, _ = run(["integrate", "example_r7", "--start", "origin", "--T", "0.1", "--dt", "0.01",
                        "--out", str(out_path)])
    assert status == 0
    rows = out_path.read_text().splitlines()
    assert len(rows) == 11
    assert len(rows[0].split()) == 1 + 14 + 3


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sardkit.cli", "models"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.split() == list(BUNDLED)
