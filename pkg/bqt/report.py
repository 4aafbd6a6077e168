"""Printed-formula versus first-principles ledger behind ``bqt compare``."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .coherent_core import (
    ChannelParams,
    printed_pair_state,
    reduced_pair_state,
    reduced_single_state,
)
from .config import AGREE_TOL, FIG5_POINTS
from .errors import BQTError, InvalidBloch, OutOfRange, describe
from .metrics import concurrence, concurrence_closed_form, extremum_offsets, trend_correlation
from .protocol import (
    Direction,
    ProtocolConfig,
    SweepOptions,
    TriggerPhase,
    weights_at,
    fidelity_closed_form,
    fidelity_oracle,
    hss_trigger,
    qfi_trigger,
    sweep,
    teleported_bloch,
    theta_grid,
)
from .utils.formatting import format_number, markdown_table

LEDGER_COLUMNS = [
    "quantity",
    "cells",
    "errors",
    "max_abs_dev",
    "mean_abs_dev",
    "value",
    "verdict",
    "example",
]


@dataclass
class LedgerRow:
    quantity: str
    deviations: List[float] = field(default_factory=list)
    errors: int = 0
    tol: float = AGREE_TOL
    value: Optional[float] = None
    example: str = ""
    verdict_override: Optional[str] = None

    def add(self, deviation: float) -> None:
        self.deviations.append(abs(float(deviation)))

    @property
    def verdict(self) -> str:
        if self.verdict_override:
            return self.verdict_override
        if not self.deviations:
            return "no data"
        return "consistent" if max(self.deviations) < self.tol else "inconsistent"

    def as_dict(self) -> Dict[str, object]:
        devs = self.deviations
        return {
            "quantity": self.quantity,
            "cells": len(devs),
            "errors": self.errors,
            "max_abs_dev": max(devs) if devs else math.nan,
            "mean_abs_dev": float(np.mean(devs)) if devs else math.nan,
            "value": math.nan if self.value is None else self.value,
            "verdict": self.verdict,
            "example": self.example,
        }


def _channels(ps: Sequence[float], ns: Sequence[int], ms: Sequence[int]) -> List[ChannelParams]:
    return [ChannelParams(p, n, m) for p, n, m in itertools.product(ps, ns, ms)]


def _triggers(thetas_e: Sequence[float], thetas_o: Sequence[float]) -> List[TriggerPhase]:
    return [TriggerPhase(e, o) for e, o in itertools.product(thetas_e, thetas_o)]


def _state_rows(channels: Sequence[ChannelParams]) -> List[LedgerRow]:
    pair = LedgerRow("rho12_printed_trace")
    single = LedgerRow("rho1_printed_trace")
    single_entries = LedgerRow("rho1_printed_vs_partial_trace")
    wootters = LedgerRow("concurrence_closed_vs_wootters")
    for channel in channels:
        try:
            printed = printed_pair_state(channel)
            pair.add(np.trace(printed).real - np.trace(reduced_pair_state(channel)).real)
            paper = reduced_single_state(channel, mode="paper")
            trace = np.trace(paper).real
            single.add(trace - 1.0)
            if not single.example and abs(trace - 1.0) > AGREE_TOL:
                single.example = f"p={channel.p} n={channel.n} m={channel.m}: trace {format_number(trace)}"
            exact = reduced_single_state(channel, mode="trace")
            single_entries.add(np.max(np.abs(paper - exact)))
            wootters.add(concurrence_closed_form(channel) - concurrence(reduced_pair_state(channel)))
        except BQTError as exc:
            logging.info("state ledger skipped %s: %s", channel, exc)
            for row in (pair, single, single_entries, wootters):
                row.errors += 1
    return [pair, single, single_entries, wootters]


def _fidelity_rows(
    channels: Sequence[ChannelParams], triggers: Sequence[TriggerPhase]
) -> List[LedgerRow]:
    rows = []
    for direction in Direction.ALL:
        row = LedgerRow(f"fidelity_{direction}_closed_vs_oracle")
        outside = 0
        for channel, trig in itertools.product(channels, triggers):
            try:
                closed = fidelity_closed_form(direction, channel, trig)
                oracle = fidelity_oracle(direction, ProtocolConfig(channel, trig))
            except BQTError:
                row.errors += 1
                continue
            row.add(closed - oracle)
            if not 0.0 <= closed <= 1.0:
                outside += 1
                if not row.example:
                    row.example = (
                        f"p={channel.p} n={channel.n} m={channel.m} "
                        f"theta_e={format_number(trig.theta_e / math.pi)}pi "
                        f"theta_o={format_number(trig.theta_o / math.pi)}pi: "
                        f"closed {format_number(closed)} oracle {format_number(oracle)}"
                    )
        row.value = float(outside)
        rows.append(row)
    return rows


def _weight_rows(
    channels: Sequence[ChannelParams], triggers: Sequence[TriggerPhase]
) -> List[LedgerRow]:
    rows = []
    for mode in ("closed", "half-angle"):
        row = LedgerRow(f"weights_{mode}_vs_trace")
        clamps = 0
        for channel, trig in itertools.product(channels, triggers):
            printed = weights_at(channel, trig.theta_e, trig.theta_o, mode)
            exact = weights_at(channel, trig.theta_e, trig.theta_o, "trace")
            row.add(max(abs(printed.p_e - exact.p_e), abs(printed.p_o - exact.p_o)))
            clamps += int(printed.clamped)
        row.value = float(clamps)
        row.example = f"{clamps} clamped cell(s)"
        rows.append(row)
    return rows


def _extremum_rows(
    channels: Sequence[ChannelParams], triggers: Sequence[TriggerPhase], points: int
) -> List[LedgerRow]:
    """Co-location of the HSS extrema with the QFI extrema on full theta sweeps.

    One curve per channel, direction and fixed value of the other trigger;
    each HSS extremum is matched to the nearest QFI extremum of its kind.
    """
    maxima = LedgerRow("qfi_hss_maxima_steps", tol=1.5)
    minima = LedgerRow("qfi_hss_minima_steps", tol=1.5)
    worst = {"maxima": (-1.0, ""), "minima": (-1.0, "")}
    grid = theta_grid(points)
    for direction in Direction.ALL:
        if direction == Direction.AB:
            fixed_values = sorted({t.theta_o for t in triggers})
            sweeps = [[TriggerPhase(t, fixed) for t in grid] for fixed in fixed_values]
        else:
            fixed_values = sorted({t.theta_e for t in triggers})
            sweeps = [[TriggerPhase(fixed, t) for t in grid] for fixed in fixed_values]
        for fixed, curve_triggers in zip(fixed_values, sweeps):
            table = sweep(direction, channels, curve_triggers, ["qfi", "hss"], SweepOptions(source="state"))
            qfi, speed = table.numeric("qfi"), table.numeric("hss")
            for k, channel in enumerate(channels):
                curve = slice(k * points, (k + 1) * points)
                if not (np.all(np.isfinite(qfi[curve])) and np.all(np.isfinite(speed[curve]))):
                    maxima.errors += 1
                    minima.errors += 1
                    continue
                offsets = extremum_offsets(speed[curve], qfi[curve])
                label = (
                    f"p={channel.p} n={channel.n} m={channel.m} {direction} "
                    f"fixed={format_number(fixed / math.pi)}pi"
                )
                for kind, row in (("maxima", maxima), ("minima", minima)):
                    row.add(offsets[kind])
                    if offsets[kind] > worst[kind][0]:
                        worst[kind] = (offsets[kind], label)
    for kind, row in (("maxima", maxima), ("minima", minima)):
        steps, label = worst[kind]
        if row.deviations:
            row.value = steps
            row.example = f"{label}: {format_number(steps)} step(s)"
    return [maxima, minima]


def _speed_rows(
    channels: Sequence[ChannelParams], triggers: Sequence[TriggerPhase], points: int = FIG5_POINTS
) -> List[LedgerRow]:
    relation = LedgerRow("hss_vs_half_sqrt_qfi", tol=1e-8)
    validity = LedgerRow("printed_bloch_validity")
    invalid_qfi = LedgerRow("printed_qfi_invalid_bloch")
    rows = [relation, validity, invalid_qfi]
    valid = total = invalid = 0
    for direction in Direction.ALL:
        trend = LedgerRow(f"fidelity_qfi_trend_{direction}")
        fids: List[float] = []
        qfis: List[float] = []
        for channel, trig in itertools.product(channels, triggers):
            try:
                report = teleported_bloch(direction, channel, trig, source="printed")
                total += 1
                valid += int(report.valid)
                try:
                    qfi_trigger(direction, channel, trig, source="printed")
                except InvalidBloch:
                    invalid += 1
                speeds = hss_trigger(direction, channel, trig, source="state")
                relation.add(speeds.deviation)
                fid = fidelity_oracle(direction, ProtocolConfig(channel, trig))
                qfi = qfi_trigger(direction, channel, trig, source="state")
                fids.append(fid)
                qfis.append(qfi)
            except BQTError as exc:
                relation.errors += 1
                logging.debug("speed ledger cell failed: %s", describe(exc))
        trend.value = trend_correlation(fids, qfis)
        trend.verdict_override = "reported"
        trend.example = f"{len(fids)} cells, Pearson correlation"
        rows.append(trend)
    validity.value = valid / total if total else math.nan
    validity.verdict_override = "consistent" if total and valid == total else "inconsistent"
    validity.example = f"{valid}/{total} printed Bloch vectors inside the ball"
    invalid_qfi.value = float(invalid)
    invalid_qfi.verdict_override = "consistent" if total and not invalid else "inconsistent"
    invalid_qfi.example = f"{invalid}/{total} printed-source QFI cells raise InvalidBloch"
    return rows + _extremum_rows(channels, triggers, points)


def build_report(
    ps: Sequence[float],
    ns: Sequence[int],
    ms: Sequence[int],
    thetas_e: Sequence[float],
    thetas_o: Sequence[float],
    points: int = FIG5_POINTS,
) -> Dict[str, object]:
    """Return the compare ledger over the channel and trigger grids (angles in radians).

    ``points`` sets the resolution of the theta sweeps behind the extremum rows.
    """
    if not (ps and ns and ms and thetas_e and thetas_o):
        raise OutOfRange("compare grids must be non-empty")
    channels = _channels(ps, ns, ms)
    triggers = _triggers(thetas_e, thetas_o)
    rows = (
        _state_rows(channels)
        + _fidelity_rows(channels, triggers)
        + _weight_rows(channels, triggers)
        + _speed_rows(channels, triggers, points)
    )
    return {
        "grid": {
            "p": list(ps),
            "n": list(ns),
            "m": list(ms),
            "theta_e": [t / math.pi for t in thetas_e],
            "theta_o": [t / math.pi for t in thetas_o],
        },
        "ledger": [row.as_dict() for row in rows],
    }


def report_markdown(report: Dict[str, object]) -> str:
    lines = ["# Printed formulas against first principles", ""]
    return "\n".join(lines) + markdown_table(report["ledger"], LEDGER_COLUMNS)


__all__ = ["LEDGER_COLUMNS", "LedgerRow", "build_report", "report_markdown"]
