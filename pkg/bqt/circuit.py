"""Declarative description of the ten-qubit teleportation circuit.

A circuit is plain data: an ordered list of :class:`Gate` records over a
register whose roles are fixed by :data:`ROLES`.  The default circuit comes
from :func:`build_bqt_circuit`; alternates can be loaded from JSON
description files without touching the simulator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .coherent_core import ChannelParams, reduced_pair_state
from .config import EIGEN_DROP, MAX_QUBITS
from .errors import MalformedGate, MalformedState, ResourceLimit
from .metrics import check_density

# Register roles: triggers at the ends, storage next to them, data inside and
# the shared channel pair in the middle.
ROLES: Dict[str, int] = {
    "T_e": 0,
    "S_e2": 1,
    "S_e1": 2,
    "Even": 3,
    "psi_a": 4,
    "psi_b": 5,
    "Odd": 6,
    "S_o1": 7,
    "S_o2": 8,
    "T_o": 9,
}
# Outcome strings read (S_e1, S_e2, S_o1, S_o2) left to right.
STORAGE_BITS = (0, 1, 2, 3)
READOUT_BITS = (4, 5)

ARITY = {
    "X": 1,
    "H": 1,
    "RY": 1,
    "CNOT": 2,
    "CCNOT": 3,
    "CZ": 2,
    "CP": 2,
    "MEASURE": 1,
    "COND-X": 1,
    "COND-Z": 1,
}
PHASED = ("RY", "CP")
CLASSICAL = ("MEASURE", "COND-X", "COND-Z")


@dataclass(frozen=True)
class Gate:
    """One instruction; ``bit`` is the classical bit written or read."""

    kind: str
    operands: Tuple[int, ...]
    phase: Optional[float] = None
    bit: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in ARITY:
            raise MalformedGate(f"unknown gate kind {self.kind!r}")
        operands = tuple(int(q) for q in self.operands)
        object.__setattr__(self, "operands", operands)
        if len(operands) != ARITY[self.kind]:
            raise MalformedGate(
                f"{self.kind} takes {ARITY[self.kind]} operand(s), got {len(operands)}"
            )
        if len(set(operands)) != len(operands):
            raise MalformedGate(f"{self.kind} operands must be distinct, got {operands}")
        if self.kind in PHASED:
            if self.phase is None or not math.isfinite(float(self.phase)):
                raise MalformedGate(f"{self.kind} needs a finite phase")
            object.__setattr__(self, "phase", float(self.phase))
        elif self.phase is not None:
            raise MalformedGate(f"{self.kind} takes no phase")
        if self.kind in CLASSICAL:
            if self.bit is None or int(self.bit) < 0:
                raise MalformedGate(f"{self.kind} needs a classical bit")
            object.__setattr__(self, "bit", int(self.bit))
        elif self.bit is not None:
            raise MalformedGate(f"{self.kind} takes no classical bit")

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind, "operands": list(self.operands)}
        if self.phase is not None:
            data["phase"] = self.phase
        if self.bit is not None:
            data["bit"] = self.bit
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Gate":
        try:
            return cls(
                kind=str(data["kind"]),
                operands=tuple(data["operands"]),
                phase=data.get("phase"),
                bit=data.get("bit"),
            )
        except (KeyError, TypeError) as exc:
            raise MalformedGate(f"gate record {data!r} is incomplete") from exc


@dataclass
class Circuit:
    qubits: int
    gates: List[Gate] = field(default_factory=list)
    roles: Dict[str, int] = field(default_factory=lambda: dict(ROLES))
    outcome_bits: Tuple[int, ...] = STORAGE_BITS

    def __post_init__(self) -> None:
        if self.qubits > MAX_QUBITS:
            raise ResourceLimit(f"{self.qubits} qubits exceed the limit of {MAX_QUBITS}")
        if self.qubits < 1:
            raise MalformedGate("a circuit needs at least one qubit")
        for gate in self.gates:
            for q in gate.operands:
                if not 0 <= q < self.qubits:
                    raise MalformedGate(f"{gate.kind} operand {q} outside register of {self.qubits}")
        self.outcome_bits = tuple(int(b) for b in self.outcome_bits)

    def count(self, kind: Optional[str] = None) -> int:
        """Return the number of gates, or of gates of ``kind``."""
        if kind is None:
            return len(self.gates)
        return sum(1 for gate in self.gates if gate.kind == kind)

    def measured_bits(self) -> List[int]:
        return sorted({gate.bit for gate in self.gates if gate.kind == "MEASURE"})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "qubits": self.qubits,
            "roles": dict(self.roles),
            "outcome_bits": list(self.outcome_bits),
            "gates": [gate.to_dict() for gate in self.gates],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Circuit":
        if "qubits" not in data or "gates" not in data:
            raise MalformedGate("circuit description needs 'qubits' and 'gates'")
        roles = {str(k): int(v) for k, v in data.get("roles", ROLES).items()}
        if sorted(roles.values()) != list(range(len(roles))):
            raise MalformedGate("role map must be a bijection onto the register")
        return cls(
            qubits=int(data["qubits"]),
            gates=[Gate.from_dict(g) for g in data["gates"]],
            roles=roles,
            outcome_bits=tuple(data.get("outcome_bits", STORAGE_BITS)),
        )


def load_circuit(path: str | Path) -> Circuit:
    """Load a circuit description file."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return Circuit.from_dict(data)


def save_circuit(circuit: Circuit, path: str | Path) -> str:
    """Write ``circuit`` to ``path`` and return the path."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(circuit.to_dict(), fh, indent=2)
    return str(path)


def channel_init(params: ChannelParams) -> np.ndarray:
    """Return the joint state of the channel pair ``qr[4], qr[5]``."""
    return reduced_pair_state(params)


@dataclass
class RegisterInit:
    """Product initial state: density ``factors`` on qubit groups, ``|0>`` elsewhere."""

    qubits: int
    factors: List[Tuple[Tuple[int, ...], np.ndarray]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.qubits > MAX_QUBITS:
            raise ResourceLimit(f"{self.qubits} qubits exceed the limit of {MAX_QUBITS}")
        seen: List[int] = []
        checked = []
        for group, rho in self.factors:
            group = tuple(int(q) for q in group)
            rho = check_density(rho)
            if rho.shape != (2 ** len(group),) * 2:
                raise MalformedState(f"factor on {group} has shape {rho.shape}")
            if any(q in seen or not 0 <= q < self.qubits for q in group):
                raise MalformedState(f"factor qubits {group} overlap or leave the register")
            seen.extend(group)
            checked.append((group, rho))
        self.factors = checked

    def _groups(self) -> List[Tuple[Tuple[int, ...], np.ndarray]]:
        covered = {q for group, _ in self.factors for q in group}
        ground = np.array([[1, 0], [0, 0]], dtype=complex)
        groups = list(self.factors)
        groups.extend(((q,), ground) for q in range(self.qubits) if q not in covered)
        return groups

    def _order(self, groups) -> List[int]:
        return [q for group, _ in groups for q in group]

    def density(self) -> np.ndarray:
        """Return the full density tensor with axes ``(rows..., cols...)`` in qubit order."""
        groups = self._groups()
        rho = np.ones((1, 1), dtype=complex)
        for _, factor in groups:
            rho = np.kron(rho, factor)
        order = self._order(groups)
        k = self.qubits
        tensor = rho.reshape((2,) * (2 * k))
        perm = [order.index(q) for q in range(k)]
        return np.transpose(tensor, perm + [k + i for i in perm])

    def ensemble(self) -> List[Tuple[float, np.ndarray]]:
        """Return ``(weight, state tensor)`` pairs whose mixture is :meth:`density`."""
        groups = self._groups()
        parts = []
        for _, factor in groups:
            w, v = np.linalg.eigh(factor)
            parts.append([(float(w[i]), v[:, i]) for i in range(len(w)) if w[i] > EIGEN_DROP])
        order = self._order(groups)
        perm = [order.index(q) for q in range(self.qubits)]
        members: List[Tuple[float, np.ndarray]] = [(1.0, np.ones(1, dtype=complex))]
        for part in parts:
            members = [(wa * wb, np.kron(va, vb)) for wa, va in members for wb, vb in part]
        return [
            (w, np.transpose(vec.reshape((2,) * self.qubits), perm)) for w, vec in members
        ]


def default_init(
    params: ChannelParams,
    input_even: Optional[np.ndarray] = None,
    input_odd: Optional[np.ndarray] = None,
) -> RegisterInit:
    """Return the register with the data inputs and the channel pair loaded."""
    even = np.array([[1, 0], [0, 0]], dtype=complex) if input_even is None else input_even
    odd = np.array([[0, 0], [0, 1]], dtype=complex) if input_odd is None else input_odd
    return RegisterInit(
        qubits=len(ROLES),
        factors=[
            ((ROLES["Even"],), even),
            ((ROLES["psi_a"], ROLES["psi_b"]), channel_init(params)),
            ((ROLES["Odd"],), odd),
        ],
    )


def _swap(a: int, b: int) -> List[Gate]:
    return [Gate("CNOT", (a, b)), Gate("CNOT", (b, a)), Gate("CNOT", (a, b))]


def _exclusive(fires: int, idle: int, target: int) -> List[Gate]:
    """Toggle ``target`` when ``fires`` is set and ``idle`` is clear."""
    return [Gate("X", (idle,)), Gate("CCNOT", (fires, idle, target)), Gate("X", (idle,))]


def _parity_block(control: int, target: int, phase: float) -> List[Gate]:
    """H, CZ, CP, CZ, H on ``target``; an X on it when ``control`` is set and ``phase`` is pi."""
    return [
        Gate("H", (target,)),
        Gate("CZ", (control, target)),
        Gate("CP", (control, target), phase=phase),
        Gate("CZ", (control, target)),
        Gate("H", (target,)),
    ]


def build_bqt_circuit(params: ChannelParams, triggers, final_readout: bool = False) -> Circuit:
    """Return the default teleportation circuit for ``params`` and ``triggers``.

    ``triggers`` is a :class:`bqt.protocol.TriggerPhase`.  Each trigger is
    prepared as ``cos(theta/2)|0> + sin(theta/2)|1>``; Alice sends on ``|0>``
    and Bob on ``|1>``, so Alice fires with probability ``cos^2(theta_e/2)``
    and Bob with ``sin^2(theta_o/2)``.  A transfer only completes when exactly
    one side fires.  Only the CP phase depends on ``params`` and only the RY
    angles on the triggers, so the gate list has the same shape for every
    configuration.
    """
    r = ROLES
    t_e, s_e2, s_e1, even = r["T_e"], r["S_e2"], r["S_e1"], r["Even"]
    a, b = r["psi_a"], r["psi_b"]
    odd, s_o1, s_o2, t_o = r["Odd"], r["S_o1"], r["S_o2"], r["T_o"]
    phase = math.pi * (params.m % 2)

    gates: List[Gate] = [
        # Step 2: triggers
        Gate("X", (t_e,)),
        Gate("X", (t_o,)),
        Gate("RY", (t_e,), phase=triggers.theta_e - math.pi),
        Gate("RY", (t_o,), phase=triggers.theta_o - math.pi),
        # Alice fires on |0>
        Gate("X", (t_e,)),
        # Step 3: data onto the channel halves
        Gate("CCNOT", (t_e, even, a)),
        Gate("CCNOT", (t_o, odd, b)),
        Gate("H", (even,)),
        Gate("H", (odd,)),
        # Step 4 and 5, Alice to Bob; S_o1 holds the flag until Bob records
        *_exclusive(t_e, t_o, s_o1),
        Gate("CCNOT", (s_o1, a, s_e2)),
        *_parity_block(s_o1, b, phase),
        *_exclusive(t_e, t_o, s_o1),
        # Bob to Alice; S_e1 holds the flag until Alice records
        *_exclusive(t_o, t_e, s_e1),
        Gate("CCNOT", (s_e1, b, s_o1)),
        *_parity_block(s_e1, a, phase),
        *_exclusive(t_o, t_e, s_e1),
        Gate("CCNOT", (t_e, even, s_e1)),
        Gate("CCNOT", (t_o, odd, s_o2)),
        # Step 6: read the storage register, hand over, correct
        Gate("MEASURE", (s_e1,), bit=0),
        Gate("MEASURE", (s_e2,), bit=1),
        Gate("MEASURE", (s_o1,), bit=2),
        Gate("MEASURE", (s_o2,), bit=3),
        *_swap(a, even),
        *_swap(b, odd),
        Gate("COND-X", (odd,), bit=1),
        Gate("COND-Z", (odd,), bit=0),
        Gate("COND-X", (even,), bit=2),
        Gate("COND-Z", (even,), bit=3),
    ]
    if final_readout:
        gates.append(Gate("MEASURE", (even,), bit=READOUT_BITS[0]))
        gates.append(Gate("MEASURE", (odd,), bit=READOUT_BITS[1]))
    return Circuit(qubits=len(ROLES), gates=gates)


__all__ = [
    "ROLES",
    "STORAGE_BITS",
    "READOUT_BITS",
    "ARITY",
    "Gate",
    "Circuit",
    "load_circuit",
    "save_circuit",
    "channel_init",
    "RegisterInit",
    "default_init",
    "build_bqt_circuit",
]
