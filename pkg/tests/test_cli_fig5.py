import csv
import io

import pytest

from bqt import bqt_cli


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fig5_panel_a(capsys):
    bqt_cli.main(["fig5", "--panel", "a", "--points", "20"])
    out = capsys.readouterr().out
    header = out.splitlines()[0].split(",")
    assert header == bqt_cli.FIG5_COLUMNS
    rows = _csv(out)
    assert len(rows) == 4 * 20
    for row in rows:
        assert "/" in row["extremum_steps"]


def test_fig5_panel_f_uses_sixth_of_pi(capsys):
    bqt_cli.main(["fig5", "--panel", "f", "--points", "4"])
    rows = _csv(capsys.readouterr().out)
    assert {(row["n"], row["m"]) for row in rows} == {("25", "1")}
    assert all(float(row["theta_o"]) == pytest.approx(1 / 6) for row in rows)


def test_fig5_single_cell(capsys):
    bqt_cli.main(
        ["fig5", "--p", "0.2", "--theta-e", "0.3", "--theta-o", "0", "--direction", "ab"]
    )
    row = _csv(capsys.readouterr().out)[0]
    qfi = float(row["QFI_pipeline"])
    hss = float(row["HSS_direct"])
    assert qfi > 0.0
    assert hss > 0.0
    assert row["flag_bloch"] == "false"


def test_fig5_printed_source_flags_bloch_ball(capsys):
    bqt_cli.main(
        [
            "fig5",
            "--p",
            "1",
            "--n",
            "3",
            "--m",
            "0",
            "--theta-e",
            "0.3",
            "--theta-o",
            "0",
            "--direction",
            "ab",
            "--bloch-source",
            "printed",
        ]
    )
    row = _csv(capsys.readouterr().out)[0]
    assert row["QFI_pipeline"].startswith("InvalidBloch")
    assert row["flag_bloch"] == "true"


def test_fig5_reports_printed_pipeline_failures(capsys):
    bqt_cli.main(["fig5", "--panel", "a", "--points", "20"])
    captured = capsys.readouterr()
    rows = _csv(captured.out)
    assert len(rows) == 80
    assert all(row["printed_invalid_bloch"] == "true" for row in rows)
    assert all(row["QFI_pipeline"] != "" and not row["QFI_pipeline"].startswith("InvalidBloch") for row in rows)
    assert "80/80 cells raise InvalidBloch" in captured.err
