"""Exact and sampled execution of :class:`bqt.circuit.Circuit` objects.

States are numpy tensors with one axis per qubit (two per qubit for density
tensors), and gates act through ``tensordot`` on the axes they touch, so a
ten-qubit density matrix never has to be formed as a 1024x1024 Kronecker
product.  Mid-circuit measurements split the run into branches that are
followed depth first; sampling only happens on top of the exact branch
distribution.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .circuit import ROLES, Circuit, Gate, RegisterInit, build_bqt_circuit, channel_init, default_init
from .coherent_core import ChannelParams
from .config import BRANCH_DROP, DEFAULT_SEED, MAX_QUBITS, SIM_PSD_TOL, SIM_TRACE_TOL
from .errors import MalformedGate, MalformedState, OutOfDomain, OutOfRange, ResourceLimit
from .metrics import concurrence, uhlmann_fidelity
from .protocol import ProtocolConfig, success_weights, teleported_states

_S = 1.0 / math.sqrt(2.0)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[_S, _S], [_S, -_S]], dtype=complex)


def ry(phi: float) -> np.ndarray:
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def controlled(u: np.ndarray, controls: int = 1) -> np.ndarray:
    """Return ``u`` controlled on ``controls`` leading qubits being ``|1>``."""
    dim = u.shape[0] * 2 ** controls
    out = np.eye(dim, dtype=complex)
    out[dim - u.shape[0]:, dim - u.shape[0]:] = u
    return out


def gate_matrix(gate: Gate) -> np.ndarray:
    """Return the unitary of a non-classical ``gate`` on its operands in order."""
    kind = gate.kind
    if kind == "X":
        return X
    if kind == "H":
        return H
    if kind == "RY":
        return ry(gate.phase)
    if kind == "CNOT":
        return controlled(X)
    if kind == "CCNOT":
        return controlled(X, 2)
    if kind == "CZ":
        return controlled(Z)
    if kind == "CP":
        return controlled(np.diag([1.0, np.exp(1j * gate.phase)]))
    raise MalformedGate(f"{kind} has no unitary")


@dataclass
class SimState:
    """Register state of one branch with its classical record.

    ``tensor`` has ``qubits`` axes for a pure state and ``2 * qubits`` axes
    (rows then columns) for a density state.  ``probability`` is the weight
    of the branch that led here.
    """

    tensor: np.ndarray
    qubits: int
    pure: bool
    bits: Dict[int, int] = field(default_factory=dict)
    probability: float = 1.0

    @classmethod
    def from_density(cls, rho: np.ndarray, qubits: int) -> "SimState":
        if qubits > MAX_QUBITS:
            raise ResourceLimit(f"{qubits} qubits exceed the limit of {MAX_QUBITS}")
        return cls(np.asarray(rho, dtype=complex).reshape((2,) * (2 * qubits)), qubits, False)

    @classmethod
    def from_vector(cls, psi: np.ndarray, qubits: int) -> "SimState":
        if qubits > MAX_QUBITS:
            raise ResourceLimit(f"{qubits} qubits exceed the limit of {MAX_QUBITS}")
        return cls(np.asarray(psi, dtype=complex).reshape((2,) * qubits), qubits, True)

    def copy(self) -> "SimState":
        return SimState(self.tensor.copy(), self.qubits, self.pure, dict(self.bits), self.probability)

    def density_matrix(self) -> np.ndarray:
        dim = 2 ** self.qubits
        if self.pure:
            psi = self.tensor.reshape(dim)
            return np.outer(psi, psi.conj())
        return self.tensor.reshape(dim, dim)

    def trace(self) -> float:
        if self.pure:
            return float(np.vdot(self.tensor, self.tensor).real)
        return float(np.trace(self.density_matrix()).real)

    def reduced(self, qubit: int) -> np.ndarray:
        """Return the single-qubit state of ``qubit``."""
        if self.pure:
            m = np.moveaxis(self.tensor, qubit, 0).reshape(2, -1)
            return m @ m.conj().T
        k = self.qubits
        t = np.moveaxis(self.tensor, (qubit, k + qubit), (0, 1))
        rest = 2 ** (k - 1)
        return np.einsum("abii->ab", t.reshape(2, 2, rest, rest))

    def check(self, psd: bool = False) -> None:
        """Raise :class:`MalformedState` if the state left its invariants."""
        trace = self.trace()
        if abs(trace - 1.0) > SIM_TRACE_TOL:
            raise MalformedState(f"trace drifted to {trace!r}")
        if not self.pure:
            rho = self.density_matrix()
            if np.max(np.abs(rho - rho.conj().T)) > SIM_TRACE_TOL:
                raise MalformedState("density lost Hermiticity")
            if psd and np.linalg.eigvalsh(rho).min() < -SIM_PSD_TOL:
                raise MalformedState("density lost positivity")


def _apply_unitary(state: SimState, u: np.ndarray, qubits: Sequence[int]) -> None:
    r = len(qubits)
    op = u.reshape((2,) * (2 * r))
    in_axes = list(range(r, 2 * r))
    t = np.tensordot(op, state.tensor, axes=(in_axes, list(qubits)))
    t = np.moveaxis(t, list(range(r)), list(qubits))
    if not state.pure:
        k = state.qubits
        cols = [k + q for q in qubits]
        t = np.tensordot(op.conj(), t, axes=(in_axes, cols))
        t = np.moveaxis(t, list(range(r)), cols)
    state.tensor = t


def _project(state: SimState, qubit: int, outcome: int) -> float:
    """Project ``qubit`` onto ``outcome`` in place and return its probability."""
    keep = [slice(None)] * state.tensor.ndim
    drop = list(keep)
    drop[qubit] = 1 - outcome
    t = state.tensor.copy()
    t[tuple(drop)] = 0.0
    if not state.pure:
        drop = list(keep)
        drop[state.qubits + qubit] = 1 - outcome
        t[tuple(drop)] = 0.0
    state.tensor = t
    prob = state.trace()
    if prob > 0.0:
        if state.pure:
            state.tensor = t / math.sqrt(prob)
        else:
            state.tensor = t / prob
    return prob


def apply_gate(
    state: SimState,
    gate: Gate,
    outcome: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> SimState:
    """Return ``state`` after ``gate``.

    A MEASURE needs either the ``outcome`` to project on or a generator to
    sample it from; the result is recorded in ``bits``.
    """
    for q in gate.operands:
        if not 0 <= q < state.qubits:
            raise MalformedGate(f"{gate.kind} operand {q} outside register of {state.qubits}")
    new = state.copy()
    if gate.kind == "MEASURE":
        if outcome is None:
            if rng is None:
                raise MalformedGate("MEASURE needs an outcome or a random generator")
            p1 = float(new.reduced(gate.operands[0])[1, 1].real) / new.trace()
            outcome = int(rng.random() < p1)
        prob = _project(new, gate.operands[0], outcome)
        new.bits[gate.bit] = outcome
        new.probability *= prob
        return new
    if gate.kind in ("COND-X", "COND-Z"):
        if new.bits.get(gate.bit, 0) == 1:
            _apply_unitary(new, X if gate.kind == "COND-X" else Z, gate.operands)
        return new
    _apply_unitary(new, gate_matrix(gate), gate.operands)
    return new


def _branches(
    state: SimState, gates: Sequence[Gate], start: int, validate: bool
) -> Iterator[SimState]:
    for index in range(start, len(gates)):
        gate = gates[index]
        if gate.kind == "MEASURE":
            for outcome in (0, 1):
                branch = apply_gate(state, gate, outcome=outcome)
                if branch.probability > BRANCH_DROP:
                    yield from _branches(branch, gates, index + 1, validate)
            return
        state = apply_gate(state, gate)
        if validate:
            state.check(psd=state.qubits <= 8)
    yield state


def _outcome_key(bits: Dict[int, int], outcome_bits: Sequence[int]) -> str:
    return "".join(str(bits.get(b, 0)) for b in outcome_bits)


def _starts(circuit: Circuit, init: RegisterInit, method: str) -> List[SimState]:
    if init.qubits != circuit.qubits:
        raise OutOfRange(f"init has {init.qubits} qubits, circuit has {circuit.qubits}")
    if method not in ("auto", "density", "ensemble"):
        raise OutOfRange(f"unknown simulation method {method!r}")
    if method != "density":
        members = init.ensemble()
        if method == "ensemble" or len(members) <= 16:
            logging.debug("simulating %d pure component(s)", len(members))
            starts = []
            for weight, psi in members:
                state = SimState.from_vector(psi, circuit.qubits)
                state.probability = weight
                starts.append(state)
            return starts
    logging.debug("simulating the full density tensor")
    return [SimState(init.density(), circuit.qubits, False)]


@dataclass
class BranchRecord:
    """Accumulated weight and unnormalised single-qubit states of one outcome."""

    probability: float = 0.0
    states: Dict[int, np.ndarray] = field(default_factory=dict)

    def state(self, qubit: int) -> np.ndarray:
        return self.states[qubit] / self.probability


def run_branches(
    circuit: Circuit,
    init: RegisterInit,
    keep: Sequence[int] = (),
    method: str = "auto",
    validate: bool = False,
) -> Dict[str, BranchRecord]:
    """Run every measurement branch and collect them by outcome string."""
    records: Dict[str, BranchRecord] = {}
    for start in _starts(circuit, init, method):
        for final in _branches(start, circuit.gates, 0, validate):
            key = _outcome_key(final.bits, circuit.outcome_bits)
            record = records.setdefault(key, BranchRecord())
            record.probability += final.probability
            for q in keep:
                rho = final.probability * final.reduced(q)
                record.states[q] = record.states.get(q, 0) + rho
    return records


@dataclass(frozen=True)
class Histogram:
    """Outcome distribution: probabilities when exact, counts when sampled."""

    outcomes: Dict[str, float]
    shots: Optional[int] = None
    seed: Optional[int] = None
    method: str = "exact"

    def probabilities(self) -> Dict[str, float]:
        if self.shots is None:
            return dict(self.outcomes)
        return {key: count / self.shots for key, count in self.outcomes.items()}

    def support(self, tol: float = 1e-12) -> List[str]:
        return sorted(key for key, value in self.probabilities().items() if value > tol)

    def total_variation(self, other: "Histogram") -> float:
        mine, theirs = self.probabilities(), other.probabilities()
        keys = set(mine) | set(theirs)
        return 0.5 * sum(abs(mine.get(k, 0.0) - theirs.get(k, 0.0)) for k in keys)

    def to_dict(self) -> Dict[str, object]:
        data: Dict[str, object] = {"method": self.method, "outcomes": dict(sorted(self.outcomes.items()))}
        if self.shots is not None:
            data["shots"] = self.shots
            data["seed"] = self.seed
        return data

    def bars(self, width: int = 40) -> str:
        """Return a text bar chart of the probabilities."""
        lines = []
        for key, value in sorted(self.probabilities().items()):
            lines.append(f"{key} {'#' * int(round(value * width)):<{width}} {value:.4f}")
        return "\n".join(lines)


def run_exact(
    circuit: Circuit,
    init: RegisterInit,
    method: str = "auto",
    validate: bool = False,
) -> Histogram:
    """Return the exact outcome distribution of ``circuit`` on ``init``."""
    records = run_branches(circuit, init, method=method, validate=validate)
    total = sum(r.probability for r in records.values())
    if abs(total - 1.0) > 1e-9:
        logging.warning("branch probabilities sum to %r", total)
    outcomes = {key: r.probability for key, r in sorted(records.items())}
    return Histogram(outcomes=outcomes, method="exact")


def run_shots(
    circuit: Circuit,
    init: RegisterInit,
    shots: int,
    seed: int = DEFAULT_SEED,
    method: str = "auto",
) -> Histogram:
    """Sample ``shots`` outcomes from the exact distribution with a seeded generator."""
    if shots < 1:
        raise OutOfRange(f"shots must be >= 1, got {shots}")
    exact = run_exact(circuit, init, method=method)
    keys = sorted(exact.outcomes)
    probs = np.array([exact.outcomes[k] for k in keys])
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    outcomes = {k: int(c) for k, c in zip(keys, counts) if c > 0}
    return Histogram(outcomes=outcomes, shots=shots, seed=seed, method="shots")


# Concurrence a firing endpoint needs before the circuit has to reproduce the protocol.
MAX_ENTANGLED = 1.0 - 1e-9
ENDPOINT_TOL = 1e-12


@dataclass
class RoundtripReport:
    """Per-branch fidelities plus the branch-averaged comparison.

    The protocol predicts the ensemble left after the storage read-out, so
    :attr:`worst_deviation` compares the branch-averaged data qubits; the
    rows show how each branch contributes.
    """

    rows: List[Dict[str, object]]
    averaged: Dict[str, float]
    weights: Dict[str, float]
    max_entangled: bool

    @property
    def worst_deviation(self) -> float:
        return max((abs(1.0 - f) for f in self.averaged.values()), default=0.0)


def _at_endpoint(value: float) -> bool:
    return value <= ENDPOINT_TOL or value >= 1.0 - ENDPOINT_TOL


def _check_roundtrip_domain(p_e: float, p_o: float, entanglement: float) -> None:
    if not (_at_endpoint(p_e) and _at_endpoint(p_o)):
        raise OutOfDomain(
            f"circuit and protocol are compared at trigger endpoints only, got P_e={p_e:.6g}, P_o={p_o:.6g}"
        )
    if max(p_e, p_o) > ENDPOINT_TOL and entanglement < MAX_ENTANGLED:
        raise OutOfDomain(
            f"a firing trigger needs a maximally entangled channel pair, concurrence is {entanglement:.6g}"
        )


def teleport_roundtrip_check(
    params: ChannelParams,
    triggers,
    circuit: Optional[Circuit] = None,
    init: Optional[RegisterInit] = None,
    method: str = "auto",
    strict: bool = False,
) -> RoundtripReport:
    """Compare the received data qubits with the protocol's teleported states.

    ``qr[6]`` is scored against the state Bob should hold (Alice's even state
    sent over) and ``qr[3]`` against the state Alice should hold, with the
    success weights taken from the trigger populations the circuit prepares.

    The circuit teleports through the channel pair, so it reproduces the
    protocol exactly when no trigger fires, or when the triggers sit at
    their endpoints and the pair is maximally entangled (``n = 2`` with odd
    ``m``, or ``n = 2``, ``m`` even and ``p = 0``).  With ``strict`` any other
    request raises :class:`OutOfDomain`; otherwise the report is returned
    for inspection.
    """
    config = ProtocolConfig(params, triggers, weight_mode="trace")
    weights = success_weights(config)
    entanglement = concurrence(channel_init(params))
    if strict:
        _check_roundtrip_domain(weights.p_e, weights.p_o, entanglement)
    circuit = circuit or build_bqt_circuit(params, triggers)
    init = init or default_init(params)
    even_q, odd_q = ROLES["Even"], ROLES["Odd"]
    expected = teleported_states(config)
    records = run_branches(circuit, init, keep=(even_q, odd_q), method=method)

    rows: List[Dict[str, object]] = []
    at_bob = np.zeros((2, 2), dtype=complex)
    at_alice = np.zeros((2, 2), dtype=complex)
    for key, record in sorted(records.items()):
        if record.probability <= BRANCH_DROP:
            continue
        at_bob += record.states[odd_q]
        at_alice += record.states[even_q]
        rows.append(
            {
                "outcome": key,
                "probability": record.probability,
                "fidelity_to_bob": uhlmann_fidelity(expected.rho_out_o, record.state(odd_q)),
                "fidelity_to_alice": uhlmann_fidelity(expected.rho_out_e, record.state(even_q)),
            }
        )
    total = sum(row["probability"] for row in rows)
    averaged = {
        "to_bob": uhlmann_fidelity(expected.rho_out_o, at_bob / total),
        "to_alice": uhlmann_fidelity(expected.rho_out_e, at_alice / total),
    }
    report = RoundtripReport(
        rows=rows,
        averaged=averaged,
        weights={"to_bob": expected.weight_o, "to_alice": expected.weight_e},
        max_entangled=entanglement >= MAX_ENTANGLED,
    )
    logging.debug("roundtrip %s %s: worst deviation %.3g", params, triggers, report.worst_deviation)
    return report


__all__ = [
    "SimState",
    "gate_matrix",
    "apply_gate",
    "BranchRecord",
    "run_branches",
    "Histogram",
    "run_exact",
    "run_shots",
    "RoundtripReport",
    "teleport_roundtrip_check",
]
