import csv
import io
import json

import pytest

from bqt import bqt_cli


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fig1_single_point(capsys):
    bqt_cli.main(["fig1", "--p", "0.5", "--n", "3", "--m", "0"])
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "p,n,m,C_closed,C_wootters,abs_delta"
    rows = _csv(out)
    assert len(rows) == 1
    assert float(rows[0]["C_closed"]) == pytest.approx(1 / 3, abs=1e-10)
    assert float(rows[0]["abs_delta"]) < 1e-10


def test_fig1_w_limit(capsys):
    bqt_cli.main(["fig1", "--p", "0.999999", "--n", "4", "--m", "1"])
    row = _csv(capsys.readouterr().out)[0]
    assert float(row["C_closed"]) == pytest.approx(0.5, abs=1e-3)


def test_fig1_default_grid(capsys):
    bqt_cli.main(["fig1"])
    rows = _csv(capsys.readouterr().out)
    assert len(rows) == 21 * 4 * 2
    assert {row["n"] for row in rows} == {"3", "5", "10", "25"}
    assert max(float(row["abs_delta"]) for row in rows) < 1e-10


def test_fig1_degenerate_cell_is_data(capsys):
    bqt_cli.main(["fig1", "--p", "1", "--n", "3", "--m", "1"])
    row = _csv(capsys.readouterr().out)[0]
    assert row["C_closed"].startswith("DegenerateChannel")
    assert row["abs_delta"] == ""


def test_fig1_json_and_out(tmp_path):
    target = tmp_path / "fig1.json"
    bqt_cli.main(["fig1", "--p", "0,0.5", "--n", "3", "--m", "0", "--format", "json", "--out", str(target)])
    rows = json.loads(target.read_text())
    assert [row["p"] for row in rows] == [0.0, 0.5]
    assert rows[0]["C_closed"] == 0.0


def test_fig1_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"p": [0.5], "n": [3, 5], "m": [0]}))
    bqt_cli.main(["fig1", "--config", str(cfg), "--n", "3"])
    rows = _csv(capsys.readouterr().out)
    assert [(row["p"], row["n"]) for row in rows] == [("0.5", "3")]


def test_fig1_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(SystemExit, match="Unknown config keys: colour"):
        bqt_cli.main(["fig1", "--config", str(bad)])
    with pytest.raises(SystemExit, match="Failed to read config file"):
        bqt_cli.main(["fig1", "--config", str(tmp_path / "missing.json")])
    with pytest.raises(SystemExit, match="Invalid grid value"):
        bqt_cli.main(["fig1", "--p", "half"])
