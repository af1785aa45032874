import json
import math
import subprocess
import sys

import pytest

from weaklp.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_norm_atoms(capsys):
    code, out, _ = run(["norm", "--p", "2", '{"atoms": [3, 1, 1]}'], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["weak"] == 3.0 and doc["quasi"] == 3.0
    assert doc["lq1"] == pytest.approx(2 * (2 + math.sqrt(3)), rel=1e-15)


def test_norm_step_from_file(tmp_path, capsys):
    path = tmp_path / "f.json"
    path.write_text('{"k": 1, "level": 1, "values": [1, 0]}')
    code, out, _ = run(["norm", str(path)], capsys)
    assert code == 0
    assert json.loads(out)["weak"] == pytest.approx(math.sqrt(0.5), rel=1e-15)


def test_seventeen_digits(capsys):
    run(["norm", '{"atoms": [1, 1]}'], capsys)
    code, out, _ = run(["norm", '{"atoms": [1, 1]}'], capsys)
    assert '"lq1": 2.8284271247461903' in out or '"lq1": 2.8284271247461898' in out
    assert len(json.loads(out)) == 3


def test_norm_rejects_bad_p(capsys):
    code, _, err = run(["norm", "--p", "1", '{"atoms": [1]}'], capsys)
    assert code == 2
    assert "1 < p" in err


@pytest.mark.parametrize(
    "doc,field",
    [
        ('{"atoms": [1, "x"]}', "atoms"),
        ('{"k": 1, "level": 1, "values": [1]}', "values"),
        ('{"k": 1.5, "level": 0, "values": [1]}', "k"),
        ('{"k": 1, "N": 1, "levels": [[1]]}', "levels"),
        ('{"atoms": [1], ', "JSON"),
    ],
)
def test_malformed_input_names_field(doc, field, capsys):
    code, _, err = run(["norm", doc], capsys)
    assert code == 2
    assert field in err


def test_usage_errors(capsys):
    assert run([], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    code, _, err = run(["verify", "--suite", "nope"], capsys)
    assert code == 2
    assert "sandwich" in err
    assert run(["norm", "missing-file.json"], capsys)[0] == 2
    assert run(["chain", "--sizes", "a,b"], capsys)[0] == 2


def test_help_exits_zero(capsys):
    assert run(["--help"], capsys)[0] == 0


def test_verify_sandwich(capsys):
    code, out, _ = run(["verify", "--suite", "sandwich", "--p", "2", "--trials", "100", "--seed", "42"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] and doc["trials"] == 100 and len(doc["records"]) == 100
    assert doc["max_ratio"] <= 2.0


def test_verify_failure_exit_code(capsys):
    code, out, _ = run(["verify", "--suite", "parts", "--p", "1.5", "--trials", "80", "--seed", "1"], capsys)
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_verify_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _ = run(["verify", "--suite", "tower", "--trials", "4", "--format", "csv", "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("trial,seed,p,ratio")
    assert len(lines) == 5


def test_chain(capsys):
    code, out, _ = run(["chain", "--p", "2", "--sizes", "0,1", "--trials", "5"], capsys)
    doc = json.loads(out)
    assert doc["sizes"] == [0, 1]
    assert code == (0 if doc["pass"] else 1)
    assert all(link["within_bound"] for link in doc["links"].values())
    code, out, _ = run(["chain", "--sizes", "0", "--trials", "3", "--format", "csv"], capsys)
    assert code == 0 and out.startswith("link,N,constant")


def test_transform_round_trip(capsys):
    code, out, _ = run(["embed-tk", "--p", "2", '{"k": 1, "level": 1, "values": [1, 0]}', "--N", "3"], capsys)
    assert code == 0
    stack = json.loads(out)
    assert stack["N"] == 3 and stack["levels"][0] == [0.5]

    code, out, _ = run(["project-pk", out], capsys)
    assert code == 0
    projected = json.loads(out)
    assert projected["levels"][3] == stack["levels"][3]

    code, out, _ = run(["embed-r", out], capsys)
    assert code == 0
    seq = json.loads(out)
    assert seq["layout"] == {"N": 3, "m": [1, 2, 5, 25]}
    assert len(seq["atoms"]) == 225

    code, out, _ = run(["project-w", out], capsys)
    assert code == 0
    averaged = json.loads(out)
    assert averaged["atoms"] == seq["atoms"]

    code, out, _ = run(["norm", out], capsys)
    assert code == 0


def test_project_w_with_flag(capsys):
    code, out, _ = run(["project-w", "--N", "1", '{"atoms": [4, 1, 3, 0, 2]}'], capsys)
    assert code == 0
    assert json.loads(out)["atoms"] == [4, 2, 2, 1, 1]
    assert run(["project-w", '{"atoms": [1, 2]}'], capsys)[0] == 2
    assert run(["project-w", "--N", "1", '{"atoms": [1, 2]}'], capsys)[0] == 2


def test_embed_r_rejects_k(capsys):
    code, _, err = run(["embed-r", '{"k": 2, "N": 0, "levels": [[1, 2]]}'], capsys)
    assert code == 2 and "k" in err


def test_stack_csv(capsys):
    code, out, _ = run(["embed-tk", "--format", "csv", '{"k": 1, "level": 1, "values": [1, 1]}'], capsys)
    assert code == 0
    assert out.splitlines()[0] == "n,j,value"
    assert len(out.splitlines()) == 4


def test_module_entry_point_stdin():
    proc = subprocess.run(
        [sys.executable, "-m", "weaklp", "norm", "-"],
        input='{"atoms": [3, 1, 1]}',
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["weak"] == 3.0
