import csv
import io
import json

import pytest

from bqt import bqt_cli

TABLE3 = ("0000", "0001", "1000", "1001")


def test_circuit_table3_row1(capsys):
    bqt_cli.main(["circuit", "--shots", "8192", "--seed", "7"])
    data = json.loads(capsys.readouterr().out)
    assert data["config"] == {"p": 0.0, "n": 3, "m": 1, "theta_e": 0.0, "theta_o": 1.0}
    exact = data["exact"]["outcomes"]
    assert sorted(exact) == sorted(TABLE3)
    assert sum(exact.values()) == pytest.approx(1.0, abs=1e-9)
    for key in TABLE3:
        assert exact[key] == pytest.approx(0.25, abs=1e-9)
    sampled = data["sampled"]
    assert sampled["shots"] == 8192 and sampled["seed"] == 7
    for key in TABLE3:
        assert abs(sampled["outcomes"][key] / 8192 - 0.25) < 0.015
    assert len(data["table3_reference"]) == 2


def test_circuit_table3_row2(capsys):
    bqt_cli.main(["circuit", "--p", "0.999999999", "--m", "0"])
    data = json.loads(capsys.readouterr().out)
    assert "sampled" not in data
    for key in TABLE3:
        assert data["exact"]["outcomes"][key] == pytest.approx(0.25, abs=1e-3)


def test_circuit_is_deterministic(capsys):
    bqt_cli.main(["circuit", "--shots", "500", "--seed", "3"])
    first = capsys.readouterr().out
    bqt_cli.main(["circuit", "--shots", "500", "--seed", "3"])
    assert capsys.readouterr().out == first


def test_circuit_csv_and_bars(capsys):
    bqt_cli.main(["circuit", "--format", "csv", "--shots", "100", "--bars"])
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == "outcome,exact,count"
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[:5]))))
    assert [row["outcome"] for row in rows] == sorted(TABLE3)
    assert sum(int(row["count"]) for row in rows) == 100
    assert any("#" in line for line in lines[5:])


def test_circuit_description_round_trip(tmp_path, capsys):
    path = tmp_path / "circuit.json"
    bqt_cli.main(["circuit", "--save-circuit", str(path)])
    saved = json.loads(capsys.readouterr().out)
    assert json.loads(path.read_text())["qubits"] == 10
    bqt_cli.main(["circuit", "--circuit", str(path)])
    loaded = json.loads(capsys.readouterr().out)
    assert loaded["exact"] == saved["exact"]


def test_circuit_bad_description_files(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(SystemExit, match="Failed to read circuit file"):
        bqt_cli.main(["circuit", "--circuit", str(broken)])
    malformed = tmp_path / "malformed.json"
    malformed.write_text(json.dumps({"qubits": 10, "gates": [{"kind": "CNOT", "operands": [1]}]}))
    with pytest.raises(SystemExit, match="MalformedGate"):
        bqt_cli.main(["circuit", "--circuit", str(malformed)])


def test_circuit_degenerate_channel():
    with pytest.raises(SystemExit, match="DegenerateChannel"):
        bqt_cli.main(["circuit", "--p", "1", "--m", "1"])


def test_circuit_rejects_zero_shots():
    with pytest.raises(SystemExit, match="shots must be >= 1"):
        bqt_cli.main(["circuit", "--shots", "0"])
