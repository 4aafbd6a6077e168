"""Bidirectional teleportation pipeline over the coherent channel.

Alice sends her even coherent state to Bob while Bob sends his odd coherent
state to Alice.  Each side holds a trigger qubit prepared at phase ``theta``;
the success weights of the two triggers mix the transmitted state with the
channel residue ``rho_1``.  This module evaluates the teleported states, their
fidelities (printed closed forms and the Uhlmann oracle) and the trigger-phase
QFI / HSS through the single-qubit Bloch pipeline.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .coherent_core import (
    ChannelParams,
    lambda_factor,
    normalization_factor,
    one_plus,
    power,
    printed_single_coefficient,
    reduced_single_state,
)
from .config import FIGURE_P, TRIGGER_STEP
from .errors import BQTError, OutOfDomain, OutOfRange, describe
from .metrics import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    ParamFamily,
    bloch_vector,
    check_density,
    density_from_bloch,
    hss,
    qfi_bloch,
    uhlmann_fidelity,
)


class Direction:
    AB = "ab"
    BA = "ba"
    ALL = (AB, BA)


WEIGHT_MODES = ("closed", "half-angle", "trace")
GROUPINGS = ("inner", "outer")
RHO1_MODES = ("trace", "paper")
BLOCH_SOURCES = ("printed", "state")

KET0 = np.array([[1, 0], [0, 0]], dtype=complex)
KET1 = np.array([[0, 0], [0, 1]], dtype=complex)


def _check_direction(direction: str) -> str:
    if direction not in Direction.ALL:
        raise OutOfRange(f"direction must be 'ab' or 'ba', got {direction!r}")
    return direction


def _check_choice(name: str, value: str, allowed: Sequence[str]) -> str:
    if value not in allowed:
        raise OutOfRange(f"{name} must be one of {', '.join(allowed)}, got {value!r}")
    return value


@dataclass(frozen=True)
class TriggerPhase:
    """Trigger angles of Alice (``theta_e``) and Bob (``theta_o``) in radians."""

    theta_e: float
    theta_o: float

    def __post_init__(self) -> None:
        for name in ("theta_e", "theta_o"):
            value = float(getattr(self, name))
            if not -1e-12 <= value <= math.pi + 1e-12:
                raise OutOfRange(f"{name} must lie in [0, pi], got {value}")
            object.__setattr__(self, name, value)

    def angle(self, direction: str) -> float:
        """Return the angle estimated in ``direction``."""
        return self.theta_e if _check_direction(direction) == Direction.AB else self.theta_o


@dataclass
class ProtocolConfig:
    channel: ChannelParams
    triggers: TriggerPhase
    rho1_mode: str = "trace"
    input_even: np.ndarray = field(default_factory=lambda: KET0.copy())
    input_odd: np.ndarray = field(default_factory=lambda: KET1.copy())
    weight_mode: str = "closed"
    grouping: str = "inner"

    def __post_init__(self) -> None:
        _check_choice("rho1_mode", self.rho1_mode, RHO1_MODES)
        _check_choice("weight_mode", self.weight_mode, WEIGHT_MODES)
        _check_choice("grouping", self.grouping, GROUPINGS)
        self.input_even = check_density(self.input_even)
        self.input_odd = check_density(self.input_odd)
        if self.input_even.shape != (2, 2) or self.input_odd.shape != (2, 2):
            raise OutOfRange("input states must be single-qubit densities")

    @property
    def inputs(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return the (even, odd) input states Alice and Bob send."""
        return self.input_even, self.input_odd


@dataclass(frozen=True)
class SuccessWeights:
    """Clamped success weights with the values they were clamped from."""

    p_e: float
    p_o: float
    raw_e: float
    raw_o: float
    mode: str

    @property
    def clamped(self) -> bool:
        return self.raw_e != self.p_e or self.raw_o != self.p_o


@dataclass
class TeleportOutcome:
    rho_out_e: np.ndarray
    rho_out_o: np.ndarray
    weights: SuccessWeights
    weight_e: float
    weight_o: float
    rho1: np.ndarray
    fidelities: Dict[str, Dict[str, object]] = field(default_factory=dict)


@dataclass(frozen=True)
class BlochReport:
    """Bloch vector of a teleported state and its trigger-phase derivative."""

    r: np.ndarray
    dr: np.ndarray

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.r))

    @property
    def valid(self) -> bool:
        return self.radius <= 1.0 + 1e-9


@dataclass(frozen=True)
class HssReport:
    hss: float
    paper_relation: float
    deviation: float


def trigger_state(theta: float) -> np.ndarray:
    """Return the trigger density ``cos(theta/2)|0> + sin(theta/2)|1>``."""
    if not -1e-12 <= theta <= math.pi + 1e-12:
        raise OutOfRange(f"trigger angle must lie in [0, pi], got {theta}")
    return _trigger_density(theta)


def _trigger_density(theta: float) -> np.ndarray:
    return density_from_bloch((math.sin(theta), 0.0, math.cos(theta)))


def _raw_weight(theta: float, p: float, mode: str, target: np.ndarray) -> float:
    if mode == "closed":
        return 0.5 * (1.0 - p) * (1.0 - 2.0 * math.cos(theta) * math.sin(theta))
    if mode == "half-angle":
        return 0.5 * (1.0 - p) * (1.0 - 2.0 * math.cos(theta / 2) * math.sin(theta / 2))
    return float(np.trace(_trigger_density(theta) @ target).real)


def weights_at(
    channel: ChannelParams,
    theta_e: float,
    theta_o: float,
    mode: str,
    input_even: np.ndarray = KET0,
    input_odd: np.ndarray = KET1,
) -> SuccessWeights:
    raw_e = _raw_weight(theta_e, channel.p, mode, input_even)
    raw_o = _raw_weight(theta_o, channel.p, mode, input_odd)
    p_e = min(1.0, max(0.0, raw_e))
    p_o = min(1.0, max(0.0, raw_o))
    if p_e != raw_e or p_o != raw_o:
        logging.debug("success weights clamped from (%r, %r)", raw_e, raw_o)
    return SuccessWeights(p_e, p_o, raw_e, raw_o, mode)


def success_weights(config: ProtocolConfig) -> SuccessWeights:
    """Return ``(P_e, P_o)`` for ``config`` in its weight mode."""
    return weights_at(
        config.channel,
        config.triggers.theta_e,
        config.triggers.theta_o,
        config.weight_mode,
        config.input_even,
        config.input_odd,
    )


def _mix(
    weights: SuccessWeights,
    rho1: np.ndarray,
    input_even: np.ndarray,
    input_odd: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, float, float]:
    weight_e = weights.p_o * (1.0 - weights.p_e)
    weight_o = weights.p_e * (1.0 - weights.p_o)
    rho_out_e = weight_e * input_odd + (1.0 - weight_e) * rho1
    rho_out_o = weight_o * input_even + (1.0 - weight_o) * rho1
    return rho_out_e, rho_out_o, weight_e, weight_o


def teleported_states(config: ProtocolConfig) -> TeleportOutcome:
    """Return both teleported outputs with their fidelity record."""
    rho1 = reduced_single_state(config.channel, mode=config.rho1_mode)
    weights = success_weights(config)
    rho_out_e, rho_out_o, weight_e, weight_o = _mix(
        weights, rho1, config.input_even, config.input_odd
    )
    outcome = TeleportOutcome(rho_out_e, rho_out_o, weights, weight_e, weight_o, rho1)
    for direction in Direction.ALL:
        record: Dict[str, object] = {}
        try:
            record["closed"] = fidelity_closed_form(direction, config.channel, config.triggers)
        except BQTError as exc:
            record["closed"] = describe(exc)
        if config.rho1_mode == "trace":
            record["oracle"] = _oracle(direction, outcome, config)
        outcome.fidelities[direction] = record
    return outcome


def fidelity_closed_form(direction: str, channel: ChannelParams, triggers: TriggerPhase) -> float:
    """Evaluate the printed fidelity expression for ``direction``, unclamped.

    Parameters
    ----------
    direction:
        ``"ab"`` (Alice to Bob) or ``"ba"`` (Bob to Alice).
    channel:
        Channel parameters; the ``1 + p^n cos(m pi)`` denominator must not vanish.
    triggers:
        Trigger angles in radians.

    Returns
    -------
    float
        The raw value; it may leave ``[0, 1]``.
    """
    _check_direction(direction)
    p, n, c = channel.p, channel.n, channel.cos_m
    normalization_factor(channel)
    denom = one_plus(p, n, c)
    se = math.sin(triggers.theta_e)
    so = math.sin(triggers.theta_o)
    if direction == Direction.AB:
        lam = lambda_factor(channel)
        head = (1 + p) ** 2 * (1 + se) * (1 + p + (1 - p) * so) / 8.0
        tail = lam * (p * p - 1) / (32.0 * denom)
        tail *= (1 + p) * so - p - 3 + (1 + p) ** 2 * se * ((p - 1) * so - 1 - p)
        value = head + tail
    else:
        if p == 0.0:
            raise OutOfDomain("Bob-to-Alice closed form divides by p^2 and is undefined at p = 0")
        scale = (p - 1) / (32.0 * p * p * denom)
        lead = p * p * (3 + p * p) + power(p, n) * c * (1 + 3 * p * p)
        body = p * p + 2 * p - 3 + (1 + p) ** 2 * se - (p * p - 1) * (1 + se) * so
        value = scale * lead * body
    if not 0.0 <= value <= 1.0:
        logging.debug("closed-form fidelity %s = %r outside [0, 1] at %s %s", direction, value, channel, triggers)
    return float(value)


def _oracle(direction: str, outcome: TeleportOutcome, config: ProtocolConfig) -> float:
    if direction == Direction.AB:
        return uhlmann_fidelity(config.input_even, outcome.rho_out_o)
    return uhlmann_fidelity(config.input_odd, outcome.rho_out_e)


def fidelity_oracle(direction: str, config: ProtocolConfig) -> float:
    """Return the Uhlmann fidelity between the sent state and what arrives."""
    _check_direction(direction)
    if config.rho1_mode != "trace":
        raise OutOfRange("the fidelity oracle needs the partial-trace rho1")
    rho1 = reduced_single_state(config.channel, mode="trace")
    weights = success_weights(config)
    rho_out_e, rho_out_o, weight_e, weight_o = _mix(
        weights, rho1, config.input_even, config.input_odd
    )
    outcome = TeleportOutcome(rho_out_e, rho_out_o, weights, weight_e, weight_o, rho1)
    return _oracle(direction, outcome, config)


def _kappa(channel: ChannelParams, grouping: str) -> float:
    if grouping == "inner":
        return printed_single_coefficient(channel)
    return lambda_factor(channel) / (4.0 * one_plus(channel.p, channel.n, 1.0) * channel.cos_m)


def printed_components(
    direction: str,
    channel: ChannelParams,
    theta_e: float,
    theta_o: float,
    weight_mode: str = "closed",
    grouping: str = "inner",
) -> np.ndarray:
    """Return the printed Bloch components of the state received in ``direction``."""
    weights = weights_at(channel, theta_e, theta_o, weight_mode)
    kappa = _kappa(channel, grouping)
    to_bob = weights.p_e * (1.0 - weights.p_o)
    to_alice = weights.p_o * (1.0 - weights.p_e)
    lead = to_bob if direction == Direction.AB else to_alice
    return np.array([2.0 * lead + (1.0 - lead) * kappa, -2.0 * (1.0 - lead) * kappa, -to_alice])


def state_components(
    direction: str,
    channel: ChannelParams,
    theta_e: float,
    theta_o: float,
    weight_mode: str = "closed",
    inputs: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> np.ndarray:
    """Return the Bloch vector of the partial-trace teleported output itself.

    ``inputs`` are the (even, odd) states sent, ``|0>`` and ``|1>`` by default;
    pass :attr:`ProtocolConfig.inputs` to follow a configuration.
    """
    input_even, input_odd = inputs if inputs is not None else (KET0, KET1)
    rho1 = reduced_single_state(channel, mode="trace")
    weights = weights_at(channel, theta_e, theta_o, weight_mode, input_even, input_odd)
    rho_out_e, rho_out_o, _, _ = _mix(weights, rho1, input_even, input_odd)
    return bloch_vector(rho_out_o if direction == Direction.AB else rho_out_e)


def _component_fn(
    direction: str,
    channel: ChannelParams,
    triggers: TriggerPhase,
    source: str,
    weight_mode: str,
    grouping: str,
    inputs: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> Callable[[float], np.ndarray]:
    _check_direction(direction)
    _check_choice("source", source, BLOCH_SOURCES)
    _check_choice("weight_mode", weight_mode, WEIGHT_MODES)
    _check_choice("grouping", grouping, GROUPINGS)
    if source == "printed" and inputs is not None:
        raise OutOfRange("the printed Bloch components assume the |0>, |1> inputs")

    def components(theta: float) -> np.ndarray:
        theta_e, theta_o = (
            (theta, triggers.theta_o) if direction == Direction.AB else (triggers.theta_e, theta)
        )
        if source == "printed":
            return printed_components(direction, channel, theta_e, theta_o, weight_mode, grouping)
        return state_components(direction, channel, theta_e, theta_o, weight_mode, inputs)

    return components


def teleported_bloch(
    direction: str,
    channel: ChannelParams,
    triggers: TriggerPhase,
    source: str = "printed",
    weight_mode: str = "closed",
    grouping: str = "inner",
    richardson: bool = False,
    inputs: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> BlochReport:
    """Return ``r`` and ``dr/dtheta`` of the received state at ``triggers``."""
    fn = _component_fn(direction, channel, triggers, source, weight_mode, grouping, inputs)
    theta = triggers.angle(direction)
    h = TRIGGER_STEP

    def diff(step: float) -> np.ndarray:
        return (fn(theta + step) - fn(theta - step)) / (2.0 * step)

    dr = (4.0 * diff(h / 2) - diff(h)) / 3.0 if richardson else diff(h)
    report = BlochReport(r=fn(theta), dr=dr)
    if not report.valid:
        logging.debug("Bloch vector |r|=%.6g leaves the ball at %s %s", report.radius, channel, triggers)
    return report


def trigger_family(
    direction: str,
    channel: ChannelParams,
    triggers: TriggerPhase,
    source: str = "state",
    weight_mode: str = "closed",
    grouping: str = "inner",
    inputs: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> ParamFamily:
    """Return the received state as a density family of the estimated trigger angle."""
    fn = _component_fn(direction, channel, triggers, source, weight_mode, grouping, inputs)
    return ParamFamily(lambda theta: density_from_bloch(fn(theta)))


def qfi_trigger(
    direction: str,
    channel: ChannelParams,
    triggers: TriggerPhase,
    source: str = "printed",
    weight_mode: str = "closed",
    grouping: str = "inner",
    richardson: bool = False,
    inputs: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> float:
    """Return the QFI of the estimated trigger phase through the Bloch formula.

    The printed source leaves the Bloch ball on every fig5 panel cell and
    raises :class:`InvalidBloch` there; ``source="state"`` differentiates the
    teleported output itself.
    """
    report = teleported_bloch(
        direction, channel, triggers, source, weight_mode, grouping, richardson, inputs
    )
    return qfi_bloch(report.r, report.dr)


def hss_trigger(
    direction: str,
    channel: ChannelParams,
    triggers: TriggerPhase,
    source: str = "printed",
    weight_mode: str = "closed",
    grouping: str = "inner",
    richardson: bool = False,
    inputs: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> HssReport:
    """Return the HSS of the estimated trigger phase next to ``sqrt(QFI)/2``."""
    report = teleported_bloch(
        direction, channel, triggers, source, weight_mode, grouping, richardson, inputs
    )
    dx, dy, dz = report.dr
    drho = (dx * PAULI_X + dy * PAULI_Y + dz * PAULI_Z) / 2
    speed = hss(drho)
    relation = 0.5 * math.sqrt(qfi_bloch(report.r, report.dr))
    return HssReport(hss=speed, paper_relation=relation, deviation=abs(speed - relation))


@dataclass(frozen=True)
class SweepOptions:
    rho1_mode: str = "trace"
    weight_mode: str = "closed"
    grouping: str = "inner"
    source: str = "printed"
    richardson: bool = False


def _cell_fidelity_closed(direction, channel, triggers, options):
    return fidelity_closed_form(direction, channel, triggers)


def _cell_fidelity_oracle(direction, channel, triggers, options):
    config = ProtocolConfig(
        channel, triggers, rho1_mode=options.rho1_mode, weight_mode=options.weight_mode
    )
    return fidelity_oracle(direction, config)


def _bloch_kwargs(options: SweepOptions) -> Dict[str, object]:
    return {
        "source": options.source,
        "weight_mode": options.weight_mode,
        "grouping": options.grouping,
        "richardson": options.richardson,
    }


def _cell_qfi(direction, channel, triggers, options):
    return qfi_trigger(direction, channel, triggers, **_bloch_kwargs(options))


def _cell_hss(direction, channel, triggers, options):
    return hss_trigger(direction, channel, triggers, **_bloch_kwargs(options)).hss


def _cell_hss_relation(direction, channel, triggers, options):
    return hss_trigger(direction, channel, triggers, **_bloch_kwargs(options)).paper_relation


def _cell_radius(direction, channel, triggers, options):
    return teleported_bloch(direction, channel, triggers, **_bloch_kwargs(options)).radius


QUANTITIES: Dict[str, Callable] = {
    "fidelity_closed": _cell_fidelity_closed,
    "fidelity_oracle": _cell_fidelity_oracle,
    "qfi": _cell_qfi,
    "hss": _cell_hss,
    "hss_relation": _cell_hss_relation,
    "bloch_radius": _cell_radius,
}


@dataclass
class SweepTable:
    """Rows in grid order; a cell holds a float or ``"<ErrorName>: message"``."""

    columns: List[str]
    rows: List[Dict[str, object]]

    def column(self, name: str) -> List[object]:
        return [row[name] for row in self.rows]

    def numeric(self, name: str) -> np.ndarray:
        """Return column ``name`` with error cells as NaN."""
        return np.array([v if isinstance(v, float) else math.nan for v in self.column(name)])

    def errors(self) -> List[str]:
        found = []
        for row in self.rows:
            for value in row.values():
                if isinstance(value, str) and ": " in value:
                    found.append(value)
        return found


def _evaluate_cell(
    direction: str,
    channel: ChannelParams,
    triggers: TriggerPhase,
    quantities: Sequence[str],
    options: SweepOptions,
) -> Dict[str, object]:
    row: Dict[str, object] = {
        "direction": direction,
        "p": channel.p,
        "n": channel.n,
        "m": channel.m,
        "theta_e": triggers.theta_e,
        "theta_o": triggers.theta_o,
    }
    for name in quantities:
        try:
            row[name] = float(QUANTITIES[name](direction, channel, triggers, options))
        except BQTError as exc:
            row[name] = describe(exc)
    return row


def sweep(
    direction: str,
    channels: Sequence[ChannelParams],
    triggers: Sequence[TriggerPhase],
    quantity: str | Sequence[str],
    options: Optional[SweepOptions] = None,
    workers: Optional[int] = None,
) -> SweepTable:
    """Evaluate ``quantity`` over the channel x trigger grid.

    Cells run on a thread pool; the table comes back in grid order (channels
    outer, triggers inner) and per-cell failures are stored in the cell.
    """
    _check_direction(direction)
    quantities = [quantity] if isinstance(quantity, str) else list(quantity)
    for name in quantities:
        if name not in QUANTITIES:
            raise OutOfRange(f"unknown sweep quantity {name!r}")
    if not channels or not triggers:
        raise OutOfRange("sweep grids must be non-empty")
    options = options or SweepOptions()
    cells = list(itertools.product(channels, triggers))
    logging.info("sweep %s: %d cells, quantities %s", direction, len(cells), ",".join(quantities))

    def run(cell: Tuple[ChannelParams, TriggerPhase]) -> Dict[str, object]:
        return _evaluate_cell(direction, cell[0], cell[1], quantities, options)

    with ThreadPoolExecutor(max_workers=workers) as executor:
        rows = list(executor.map(run, cells))
    failures = sum(1 for row in rows for name in quantities if isinstance(row[name], str))
    if failures:
        logging.info("sweep %s: %d failed cells", direction, failures)
    columns = ["direction", "p", "n", "m", "theta_e", "theta_o", *quantities]
    return SweepTable(columns=columns, rows=rows)


def theta_grid(points: int) -> np.ndarray:
    """Return ``points`` equally spaced angles covering ``[0, pi]``."""
    if points < 1:
        raise OutOfRange(f"points must be >= 1, got {points}")
    if points == 1:
        return np.array([0.0])
    return np.linspace(0.0, math.pi, points)


def panel_grid(
    panel: Dict[str, object],
    points: int,
    p_values: Iterable[float] = FIGURE_P,
) -> Tuple[str, List[ChannelParams], List[TriggerPhase]]:
    """Expand a figure panel preset into its sweep grid.

    Preset angles are in units of pi; the ``None`` angle is the swept one.
    """
    direction = _check_direction(str(panel["direction"]))
    channels = [ChannelParams(p, int(panel["n"]), int(panel["m"])) for p in p_values]
    fixed_e, fixed_o = panel["theta_e"], panel["theta_o"]
    triggers = []
    for theta in theta_grid(points):
        theta_e = theta if fixed_e is None else float(fixed_e) * math.pi
        theta_o = theta if fixed_o is None else float(fixed_o) * math.pi
        triggers.append(TriggerPhase(theta_e, theta_o))
    return direction, channels, triggers


__all__ = [
    "Direction",
    "WEIGHT_MODES",
    "GROUPINGS",
    "RHO1_MODES",
    "BLOCH_SOURCES",
    "TriggerPhase",
    "ProtocolConfig",
    "SuccessWeights",
    "TeleportOutcome",
    "BlochReport",
    "HssReport",
    "trigger_state",
    "weights_at",
    "success_weights",
    "teleported_states",
    "fidelity_closed_form",
    "fidelity_oracle",
    "printed_components",
    "state_components",
    "teleported_bloch",
    "trigger_family",
    "qfi_trigger",
    "hss_trigger",
    "SweepOptions",
    "SweepTable",
    "QUANTITIES",
    "sweep",
    "theta_grid",
    "panel_grid",
]
