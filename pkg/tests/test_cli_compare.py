import json

import pytest

from bqt import bqt_cli

GRID = ["--p", "0,0.5", "--n", "3", "--m", "0", "--theta-e", "0,0.5", "--theta-o", "0"]


def _row(lines, quantity):
    return next(line for line in lines if line.startswith(f"| {quantity} |"))


def test_compare_markdown(capsys):
    bqt_cli.main(["compare", *GRID])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# Printed formulas against first principles"
    assert "inconsistent" in _row(lines, "rho1_printed_trace")
    assert "| consistent |" in _row(lines, "concurrence_closed_vs_wootters")


def test_compare_json_only(tmp_path, capsys):
    target = tmp_path / "ledger.json"
    bqt_cli.main(["compare", *GRID, "--format", "json", "--out", str(target)])
    assert capsys.readouterr().out == ""
    data = json.loads(target.read_text())
    assert len(data["ledger"]) == 15
    assert data["grid"]["p"] == [0.0, 0.5]


def test_compare_markdown_with_json_copy(tmp_path, capsys):
    target = tmp_path / "ledger.json"
    bqt_cli.main(["compare", *GRID, "--out", str(target)])
    assert capsys.readouterr().out.startswith("# Printed formulas")
    ledger = {row["quantity"]: row for row in json.loads(target.read_text())["ledger"]}
    assert ledger["concurrence_closed_vs_wootters"]["verdict"] == "consistent"


def test_compare_empty_grid():
    with pytest.raises(SystemExit, match="Grid 'p' is empty"):
        bqt_cli.main(["compare", "--p", ""])


def test_compare_reports_printed_failures_and_extrema(capsys):
    bqt_cli.main(["compare", *GRID, "--points", "40"])
    lines = capsys.readouterr().out.splitlines()
    assert "printed-source QFI cells raise InvalidBloch" in _row(lines, "printed_qfi_invalid_bloch")
    assert "| consistent |" in _row(lines, "qfi_hss_minima_steps")
    assert _row(lines, "qfi_hss_maxima_steps")


def test_compare_rejects_empty_sweep():
    with pytest.raises(SystemExit, match="points must be >= 1"):
        bqt_cli.main(["compare", *GRID, "--points", "0"])
