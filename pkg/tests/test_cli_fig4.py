import csv
import io

import pytest

from bqt import bqt_cli


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fig4_panel_a(capsys):
    bqt_cli.main(["fig4", "--panel", "a", "--points", "5"])
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "direction,p,n,m,theta_e,theta_o,F_closed,F_oracle,flag_out_of_range"
    rows = _csv(out)
    assert len(rows) == 4 * 5
    assert {row["direction"] for row in rows} == {"ab"}
    assert {row["theta_o"] for row in rows} == {"0.0"}
    assert rows[4]["theta_e"] == "1.0"
    for row in rows:
        assert 0.0 <= float(row["F_oracle"]) <= 1.0 + 1e-9


def test_fig4_panel_d(capsys):
    bqt_cli.main(["fig4", "--panel", "d", "--points", "3"])
    rows = _csv(capsys.readouterr().out)
    assert {row["direction"] for row in rows} == {"ba"}
    assert {(row["n"], row["m"], row["theta_e"]) for row in rows} == {("25", "1", "1.0")}


def test_fig4_perfect_fidelity_cell(capsys):
    bqt_cli.main(
        ["fig4", "--p", "1", "--n", "3", "--m", "0", "--theta-e", "0", "--theta-o", "0", "--direction", "ab"]
    )
    rows = _csv(capsys.readouterr().out)
    assert len(rows) == 1
    assert float(rows[0]["F_closed"]) == pytest.approx(1.0, abs=1e-12)
    assert rows[0]["flag_out_of_range"] == "false"


def test_fig4_flags_printed_formula_above_one(capsys):
    bqt_cli.main(
        ["fig4", "--p", "1", "--n", "3", "--m", "0", "--theta-e", "0.5", "--theta-o", "0", "--direction", "ab"]
    )
    row = _csv(capsys.readouterr().out)[0]
    assert float(row["F_closed"]) == pytest.approx(2.0)
    assert row["flag_out_of_range"] == "true"


def test_fig4_both_directions_on_custom_grid(capsys):
    bqt_cli.main(["fig4", "--p", "0", "--theta-e", "0", "--theta-o", "0"])
    rows = _csv(capsys.readouterr().out)
    assert [row["direction"] for row in rows] == ["ab", "ba"]
    assert rows[1]["F_closed"].startswith("OutOfDomain")
    assert rows[1]["flag_out_of_range"] == ""


def test_fig4_bad_requests():
    with pytest.raises(SystemExit, match="Unknown panel 'z'"):
        bqt_cli.main(["fig4", "--panel", "z"])
    with pytest.raises(SystemExit, match="OutOfRange"):
        bqt_cli.main(["fig4", "--theta-e", "1.5"])
