import math

import numpy as np
import pytest

from bqt import simulator
from bqt.circuit import Circuit, Gate, RegisterInit, build_bqt_circuit, default_init
from bqt.coherent_core import ChannelParams, reduced_single_state
from bqt.config import TABLE3_OUTCOMES
from bqt.errors import MalformedGate, OutOfDomain, OutOfRange
from bqt.metrics import concurrence, uhlmann_fidelity
from bqt.protocol import TriggerPhase
from bqt.simulator import SimState, apply_gate

KET0 = np.diag([1.0, 0.0]).astype(complex)

TABLE3_CONFIGS = [
    ChannelParams(0.0, 3, 1),
    ChannelParams(1 - 1e-9, 3, 0),
]
TABLE3_TRIGGERS = TriggerPhase(0.0, math.pi)


def _table3(params):
    return build_bqt_circuit(params, TABLE3_TRIGGERS), default_init(params)


def _random_density(rng, qubits):
    dim = 2 ** qubits
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return SimState.from_density(rho / np.trace(rho), qubits)


def test_x_flips_ground_state():
    state = apply_gate(SimState.from_vector(np.array([1, 0]), 1), Gate("X", (0,)))
    np.testing.assert_allclose(state.tensor, [0, 1])


def test_h_twice_is_identity(rng):
    state = _random_density(rng, 2)
    twice = apply_gate(apply_gate(state, Gate("H", (1,))), Gate("H", (1,)))
    np.testing.assert_allclose(twice.tensor, state.tensor, atol=1e-12)


def test_cnot_makes_bell_pair():
    state = SimState.from_vector(np.array([1, 0, 0, 0]), 2)
    state = apply_gate(state, Gate("H", (0,)))
    state = apply_gate(state, Gate("CNOT", (0, 1)))
    assert concurrence(state.density_matrix()) == pytest.approx(1.0, abs=1e-10)


def test_apply_gate_leaves_input_untouched():
    state = SimState.from_vector(np.array([1, 0]), 1)
    apply_gate(state, Gate("X", (0,)))
    np.testing.assert_array_equal(state.tensor, [1, 0])


@pytest.mark.parametrize(
    "gate,inverse",
    [
        (Gate("X", (1,)), Gate("X", (1,))),
        (Gate("H", (0,)), Gate("H", (0,))),
        (Gate("RY", (2,), phase=0.7), Gate("RY", (2,), phase=-0.7)),
        (Gate("CNOT", (2, 0)), Gate("CNOT", (2, 0))),
        (Gate("CCNOT", (0, 2, 1)), Gate("CCNOT", (0, 2, 1))),
        (Gate("CZ", (1, 2)), Gate("CZ", (1, 2))),
        (Gate("CP", (0, 1), phase=1.3), Gate("CP", (0, 1), phase=-1.3)),
    ],
)
def test_gate_then_inverse(rng, gate, inverse):
    state = _random_density(rng, 3)
    moved = apply_gate(state, gate)
    assert moved.trace() == pytest.approx(1.0, abs=1e-12)
    back = apply_gate(moved, inverse)
    np.testing.assert_allclose(back.tensor, state.tensor, atol=1e-10)


def test_pure_and_density_paths_agree(rng):
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    pure = SimState.from_vector(psi, 3)
    mixed = SimState.from_density(np.outer(psi, psi.conj()), 3)
    for gate in (Gate("CCNOT", (2, 0, 1)), Gate("RY", (1,), phase=0.4), Gate("CP", (2, 0), phase=2.0)):
        pure = apply_gate(pure, gate)
        mixed = apply_gate(mixed, gate)
    np.testing.assert_allclose(pure.density_matrix(), mixed.density_matrix(), atol=1e-12)
    for q in range(3):
        np.testing.assert_allclose(pure.reduced(q), mixed.reduced(q), atol=1e-12)


def test_measure_with_given_outcome():
    state = apply_gate(SimState.from_vector(np.array([1, 0]), 1), Gate("H", (0,)))
    one = apply_gate(state, Gate("MEASURE", (0,), bit=2), outcome=1)
    assert one.bits == {2: 1}
    assert one.probability == pytest.approx(0.5)
    np.testing.assert_allclose(one.density_matrix(), np.diag([0, 1]), atol=1e-12)


def test_measure_samples_with_generator():
    state = SimState.from_vector(np.array([0, 1]), 1)
    measured = apply_gate(state, Gate("MEASURE", (0,), bit=0), rng=np.random.default_rng(3))
    assert measured.bits[0] == 1
    with pytest.raises(MalformedGate):
        apply_gate(state, Gate("MEASURE", (0,), bit=0))


def test_conditional_gates_follow_their_bit():
    state = SimState.from_vector(np.array([1, 0]), 1)
    skipped = apply_gate(state, Gate("COND-X", (0,), bit=0))
    np.testing.assert_array_equal(skipped.tensor, [1, 0])
    state.bits[0] = 1
    flipped = apply_gate(state, Gate("COND-X", (0,), bit=0))
    np.testing.assert_allclose(flipped.tensor, [0, 1])
    plus = SimState.from_vector(np.array([1, 1]) / math.sqrt(2), 1)
    plus.bits[4] = 1
    minus = apply_gate(plus, Gate("COND-Z", (0,), bit=4))
    np.testing.assert_allclose(minus.tensor, np.array([1, -1]) / math.sqrt(2))


def test_operand_outside_register():
    with pytest.raises(MalformedGate):
        apply_gate(SimState.from_vector(np.array([1, 0]), 1), Gate("X", (3,)))


def test_empty_circuit_on_ground_state():
    hist = simulator.run_exact(Circuit(qubits=4), RegisterInit(qubits=4))
    assert hist.outcomes == {"0000": 1.0}


def test_run_rejects_bad_requests():
    with pytest.raises(OutOfRange):
        simulator.run_exact(Circuit(qubits=4), RegisterInit(qubits=5))
    with pytest.raises(OutOfRange):
        simulator.run_exact(Circuit(qubits=4), RegisterInit(qubits=4), method="tableau")
    with pytest.raises(OutOfRange):
        simulator.run_shots(Circuit(qubits=4), RegisterInit(qubits=4), shots=0)


@pytest.mark.parametrize("params", TABLE3_CONFIGS)
def test_table3_exact_distribution(params):
    circuit, init = _table3(params)
    hist = simulator.run_exact(circuit, init, method="ensemble", validate=True)
    assert hist.support() == sorted(TABLE3_OUTCOMES)
    for key in TABLE3_OUTCOMES:
        assert hist.outcomes[key] == pytest.approx(0.25, abs=1e-9)


def test_table3_density_method_agrees():
    circuit, init = _table3(TABLE3_CONFIGS[0])
    dense = simulator.run_exact(circuit, init, method="density")
    sparse = simulator.run_exact(circuit, init, method="ensemble")
    assert dense.total_variation(sparse) < 1e-10


def test_shots_are_deterministic():
    circuit, init = _table3(TABLE3_CONFIGS[0])
    first = simulator.run_shots(circuit, init, 8192, seed=11)
    second = simulator.run_shots(circuit, init, 8192, seed=11)
    assert first == second
    assert first.to_dict()["seed"] == 11
    assert sum(first.outcomes.values()) == 8192


def test_shots_frequencies_near_quarter():
    circuit, init = _table3(TABLE3_CONFIGS[0])
    freqs = simulator.run_shots(circuit, init, 8192, seed=7).probabilities()
    for key in TABLE3_OUTCOMES:
        assert abs(freqs[key] - 0.25) < 0.015


def test_single_shot():
    circuit, init = _table3(TABLE3_CONFIGS[0])
    hist = simulator.run_shots(circuit, init, 1, seed=2)
    assert sum(hist.outcomes.values()) == 1
    assert set(hist.outcomes) <= set(TABLE3_OUTCOMES)


@pytest.mark.parametrize("params", TABLE3_CONFIGS)
def test_sampled_converges_to_exact(params):
    circuit, init = _table3(params)
    exact = simulator.run_exact(circuit, init)
    for seed in range(20):
        sampled = simulator.run_shots(circuit, init, 8192, seed=seed)
        assert sampled.total_variation(exact) < 0.03


def test_histogram_views():
    hist = simulator.Histogram(outcomes={"00": 3, "11": 1}, shots=4, seed=5, method="shots")
    assert hist.probabilities() == {"00": 0.75, "11": 0.25}
    assert hist.to_dict() == {"method": "shots", "outcomes": {"00": 3, "11": 1}, "shots": 4, "seed": 5}
    bars = hist.bars(width=4).splitlines()
    assert bars[0].startswith("00 ###")
    assert bars[1].endswith("0.2500")


ENDPOINTS = [
    TriggerPhase(0.0, 0.0),
    TriggerPhase(0.0, math.pi),
    TriggerPhase(math.pi, math.pi),
    TriggerPhase(math.pi, 0.0),
]


@pytest.mark.parametrize("params", [ChannelParams(0.0, 2, 0), ChannelParams(0.5, 2, 1)])
@pytest.mark.parametrize("triggers", ENDPOINTS)
def test_roundtrip_endpoints_on_maximally_entangled_pairs(params, triggers):
    report = simulator.teleport_roundtrip_check(params, triggers, strict=True)
    assert report.max_entangled
    assert report.rows
    assert sum(row["probability"] for row in report.rows) == pytest.approx(1.0)
    assert report.worst_deviation < 1e-6


def test_roundtrip_sender_branches_deliver_the_state():
    report = simulator.teleport_roundtrip_check(ChannelParams(0.0, 2, 0), TriggerPhase(0.0, 0.0))
    assert report.weights == {"to_bob": pytest.approx(1.0), "to_alice": pytest.approx(0.0)}
    for row in report.rows:
        assert row["fidelity_to_bob"] == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize(
    "params", [ChannelParams(0.0, 3, 1), ChannelParams(0.4, 3, 0), ChannelParams(0.4, 5, 2)]
)
def test_roundtrip_idle_endpoint_on_any_channel(params):
    report = simulator.teleport_roundtrip_check(params, TriggerPhase(math.pi, 0.0), strict=True)
    assert [row["outcome"] for row in report.rows] == ["0000"]
    assert report.worst_deviation < 1e-6


@pytest.mark.parametrize("triggers", [TriggerPhase(0.0, 0.0), TriggerPhase(math.pi, math.pi)])
def test_roundtrip_strict_rejects_firing_on_partial_entanglement(triggers):
    with pytest.raises(OutOfDomain):
        simulator.teleport_roundtrip_check(ChannelParams(0.0, 3, 1), triggers, strict=True)


def test_roundtrip_strict_rejects_interior_triggers():
    with pytest.raises(OutOfDomain):
        simulator.teleport_roundtrip_check(ChannelParams(0.0, 2, 0), TriggerPhase(0.7, 0.0), strict=True)


def test_roundtrip_report_runs_on_generic_channel():
    report = simulator.teleport_roundtrip_check(ChannelParams(0.0, 3, 1), TriggerPhase(0.0, 0.0))
    assert not report.max_entangled
    assert sum(row["probability"] for row in report.rows) == pytest.approx(1.0)
    for row in report.rows:
        assert 0.0 <= row["fidelity_to_bob"] <= 1.0 + 1e-9
        assert 0.0 <= row["fidelity_to_alice"] <= 1.0 + 1e-9
    assert set(report.averaged) == {"to_bob", "to_alice"}


@pytest.mark.parametrize("p", [0.0, 0.5, 1 - 1e-9])
def test_sender_record_follows_the_channel(p):
    params = ChannelParams(p, 3, 0)
    circuit = build_bqt_circuit(params, TriggerPhase(0.0, 0.0))
    hist = simulator.run_exact(circuit, default_init(params)).outcomes
    flipped = hist.get("0100", 0.0) + hist.get("1100", 0.0)
    assert flipped == pytest.approx(reduced_single_state(params, mode="trace")[1, 1].real, abs=1e-9)
    assert hist.get("1000", 0.0) + hist.get("1100", 0.0) == pytest.approx(0.5, abs=1e-9)
    assert set(hist) <= {"0000", "0100", "1000", "1100"}


def test_outcome_table_changes_with_overlap():
    tables = []
    for p in (0.0, 1 - 1e-9):
        params = ChannelParams(p, 3, 0)
        circuit = build_bqt_circuit(params, TriggerPhase(0.0, 0.0))
        tables.append(simulator.run_exact(circuit, default_init(params)))
    assert tables[0].outcomes["0100"] == pytest.approx(0.25, abs=1e-9)
    assert tables[1].probabilities().get("0100", 0.0) < 1e-6
    assert tables[0].total_variation(tables[1]) == pytest.approx(0.5, abs=1e-6)


@pytest.mark.parametrize("theta_e", [0.0, 1.0, 2.2, math.pi])
def test_alice_record_rate_follows_her_trigger(theta_e):
    params = ChannelParams(0.0, 2, 0)
    circuit = build_bqt_circuit(params, TriggerPhase(theta_e, 0.0))
    hist = simulator.run_exact(circuit, default_init(params)).outcomes
    fired = sum(value for key, value in hist.items() if key[0] == "1")
    assert fired == pytest.approx((1 + math.cos(theta_e)) / 4, abs=1e-9)


def test_identity_circuit_keeps_the_data_qubit():
    init = default_init(ChannelParams(0.2, 3, 0))
    records = simulator.run_branches(Circuit(qubits=10), init, keep=(3,))
    assert list(records) == ["0000"]
    assert uhlmann_fidelity(KET0, records["0000"].state(3)) == pytest.approx(1.0, abs=1e-9)
