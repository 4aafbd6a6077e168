import math

import numpy as np
import pytest

from bqt import fock_oracle
from bqt.errors import CutoffMismatch, CutoffTooSmall, DegenerateState, OutOfRange
from bqt.fock_oracle import coherent_fock, even_odd_fock, overlap

ETA_GRID = [0.1 + 0.1 * k for k in range(20)]


def test_required_cutoff_rule():
    assert fock_oracle.required_cutoff(0.0) == 1
    assert fock_oracle.required_cutoff(1.0) == math.ceil(1.0 + 10.0 * math.sqrt(2.0))
    assert fock_oracle.auto_cutoff(0.5) == fock_oracle.required_cutoff(0.5)


def test_vacuum():
    vac = coherent_fock(0.0, 8)
    np.testing.assert_array_equal(vac.amplitudes, np.eye(9)[0])
    assert vac.tail_bound == 0.0


def test_coherent_norm():
    state = coherent_fock(1.0, 32)
    assert state.norm_deviation < 1e-12
    assert state.tail_bound < 1e-12


@pytest.mark.parametrize("eta,cutoff", [(1.0, 2), (1.5, 4), (0.5, 0)])
def test_cutoff_too_small(eta, cutoff):
    with pytest.raises(CutoffTooSmall):
        coherent_fock(eta, cutoff)


def test_overlap_examples():
    state = coherent_fock(0.5, 40)
    assert overlap(state, state) == pytest.approx(1.0, abs=1e-12)
    mirrored = coherent_fock(-0.5, 40)
    assert abs(overlap(state, mirrored) - math.exp(-0.5)) < 1e-10
    u = coherent_fock(0.3, 40)
    v = coherent_fock(0.7, 40)
    assert abs(abs(overlap(u, v)) ** 2 - math.exp(-0.16)) < 1e-10


def test_overlap_cutoff_mismatch():
    with pytest.raises(CutoffMismatch):
        overlap(coherent_fock(0.5, 20), coherent_fock(0.5, 21))


def test_overlap_closed_form_on_grid():
    for eta in ETA_GRID:
        cutoff = fock_oracle.required_cutoff(2.0) + 10
        value = overlap(coherent_fock(eta, cutoff), coherent_fock(-eta, cutoff))
        assert abs(value - math.exp(-2.0 * eta * eta)) < 1e-10


def test_even_odd_orthonormal_on_grid():
    cutoff = 60
    for eta in ETA_GRID:
        even, odd = even_odd_fock(eta, cutoff)
        assert even.norm_deviation < 1e-10
        assert odd.norm_deviation < 1e-10
        assert abs(overlap(even, odd)) < 1e-12


def test_even_odd_parity_support():
    even, odd = even_odd_fock(1.0, 40)
    assert np.all(even.amplitudes[1::2] == 0)
    assert np.all(odd.amplitudes[0::2] == 0)


def test_even_odd_degenerate():
    with pytest.raises(DegenerateState):
        even_odd_fock(0.0, 8)


@pytest.mark.parametrize("eta,cutoff", [(0.6, 30), (1.5, 80)])
def test_validate_encoding(eta, cutoff):
    report = fock_oracle.validate_encoding(eta, cutoff)
    assert report["max_deviation"] < 1e-10
    assert report["a"] ** 2 + report["b"] ** 2 == pytest.approx(1.0)


def test_validate_encoding_cutoff_too_small():
    with pytest.raises(CutoffTooSmall):
        fock_oracle.validate_encoding(1.5, 4)


@pytest.mark.parametrize(
    "eta,n,expected",
    [(0.5, 3, math.exp(-1.5)), (0.0, 5, 1.0), (2.0, 2, math.exp(-16.0))],
)
def test_multipartite_gram(eta, n, expected):
    gram = fock_oracle.multipartite_gram(eta, n, 60)
    assert abs(gram[0, 1] - expected) < 1e-10
    assert abs(gram[0, 0] - 1.0) < 1e-10
    assert gram[0, 1] == pytest.approx(gram[1, 0].conjugate())


def test_multipartite_gram_rejects_single_mode():
    with pytest.raises(OutOfRange):
        fock_oracle.multipartite_gram(0.5, 1, 40)


def test_validation_table():
    rows = fock_oracle.validation_table([0.5, 1.0, 2.0])
    assert [row["error"] for row in rows] == ["", "", ""]
    assert fock_oracle.within_tolerance(rows)
    assert fock_oracle.max_deviation(rows) < 1e-10


def test_validation_table_records_errors():
    rows = fock_oracle.validation_table([0.0, 1.5], cutoff=4)
    assert rows[0]["error"].startswith("DegenerateState")
    assert rows[1]["error"]
    assert rows[1]["cutoff"] == 4
