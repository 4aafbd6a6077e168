# bqt_cli.py - command line front end of the BQT workbench

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, List, Optional, Sequence

from . import fock_oracle, protocol, report, simulator
from .circuit import build_bqt_circuit, default_init, load_circuit, save_circuit
from .coherent_core import ChannelParams, reduced_pair_state
from .config import (
    DEFAULT_SEED,
    FIG1_M,
    FIG1_N,
    FIG1_P,
    FIG4_PANELS,
    FIG4_POINTS,
    FIG5_PANELS,
    FIG5_POINTS,
    FIGURE_P,
    TABLE3_REFERENCE,
)
from .errors import BQTError, describe
from .metrics import concurrence, concurrence_closed_form, extremum_offsets
from .protocol import Direction, SweepOptions, TriggerPhase
from .utils.formatting import csv_text, emit, format_number, json_text

FIG1_COLUMNS = ["p", "n", "m", "C_closed", "C_wootters", "abs_delta"]
FIG4_COLUMNS = ["direction", "p", "n", "m", "theta_e", "theta_o", "F_closed", "F_oracle", "flag_out_of_range"]
FIG5_COLUMNS = [
    "direction",
    "p",
    "n",
    "m",
    "theta_e",
    "theta_o",
    "QFI_pipeline",
    "HSS_direct",
    "HSS_paper_relation",
    "bloch_radius",
    "flag_bloch",
    "printed_invalid_bloch",
    "extremum_steps",
]
VALIDATE_COLUMNS = [
    "eta",
    "cutoff",
    "norm_deviation",
    "tail_bound",
    "overlap_deviation",
    "gram_deviation",
    "even_norm_deviation",
    "odd_norm_deviation",
    "orthogonality",
    "encoding_deviation",
    "error",
]
COMPARE_THETAS = (0.0, 1 / 6, 0.25, 0.5, 0.75, 1.0)
VALIDATE_ETAS = tuple(round(0.1 * k, 1) for k in range(1, 21))


@dataclass
class RunConfig:
    """Resolved run settings: flags first, then ``--config`` file values."""

    command: str = ""
    p: Optional[List[float]] = None
    n: Optional[List[int]] = None
    m: Optional[List[int]] = None
    theta_e: Optional[List[float]] = None
    theta_o: Optional[List[float]] = None
    direction: Optional[str] = None
    shots: Optional[int] = None
    seed: Optional[int] = None
    rho1_mode: Optional[str] = None
    format: Optional[str] = None
    out: Optional[str] = None
    panel: Optional[str] = None
    points: Optional[int] = None
    eta: Optional[List[float]] = None
    cutoff: Optional[str] = None
    circuit: Optional[str] = None
    save_circuit: Optional[str] = None
    bloch_source: Optional[str] = None
    weights: Optional[str] = None
    grouping: Optional[str] = None
    richardson: Optional[bool] = None
    workers: Optional[int] = None
    bars: Optional[bool] = None
    final_readout: Optional[bool] = None
    verbose: Optional[bool] = None


LIST_FLOAT = ("p", "theta_e", "theta_o", "eta")
LIST_INT = ("n", "m")


def _parse_list(value: Any, cast) -> List[Any]:
    if isinstance(value, (list, tuple)):
        items = list(value)
    else:
        items = [part for part in str(value).split(",") if part.strip()]
    try:
        return [cast(float(item)) if cast is int else cast(item) for item in items]
    except ValueError as exc:
        raise SystemExit(f"Invalid grid value: {exc}")


def load_run_config(path: str) -> Dict[str, Any]:
    """Return the key/value pairs of a JSON run-config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"Failed to read config file: {exc}")
    if not isinstance(data, dict):
        raise SystemExit("Invalid config file format")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise SystemExit(f"Unknown config keys: {', '.join(unknown)}")
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags with the optional ``--config`` file; explicit flags win."""
    values: Dict[str, Any] = {}
    if getattr(args, "config", None):
        values.update(load_run_config(args.config))
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    values["command"] = args.command
    for key in LIST_FLOAT:
        if values.get(key) is not None:
            values[key] = _parse_list(values[key], float)
    for key in LIST_INT:
        if values.get(key) is not None:
            values[key] = _parse_list(values[key], int)
    cfg = RunConfig(**values)
    for key in LIST_FLOAT + LIST_INT:
        if getattr(cfg, key) is not None and not getattr(cfg, key):
            raise SystemExit(f"Grid '{key}' is empty")
    if cfg.shots is not None and cfg.shots < 1:
        raise SystemExit("shots must be >= 1")
    return cfg


def _configure_logging(cfg: RunConfig) -> None:
    logging.basicConfig(level=logging.DEBUG if cfg.verbose else logging.WARNING, format="%(message)s")


def _emit_table(cfg: RunConfig, rows: List[Dict[str, Any]], columns: Sequence[str]) -> None:
    if (cfg.format or "csv") == "json":
        emit(json_text([{c: row.get(c, "") for c in columns} for row in rows]), cfg.out)
    else:
        emit(csv_text(rows, columns), cfg.out)


def _directions(cfg: RunConfig) -> List[str]:
    choice = cfg.direction or "both"
    return list(Direction.ALL) if choice == "both" else [choice]


def _options(cfg: RunConfig, source: str) -> SweepOptions:
    return SweepOptions(
        rho1_mode=cfg.rho1_mode or "trace",
        weight_mode=cfg.weights or "closed",
        grouping=cfg.grouping or "inner",
        source=cfg.bloch_source or source,
        richardson=bool(cfg.richardson),
    )


def _panel_names(cfg: RunConfig, presets: Dict[str, Dict[str, Any]], default: Sequence[str]) -> List[str]:
    if cfg.panel is None or cfg.panel == "all":
        return list(default)
    names = [name.strip() for name in cfg.panel.split(",") if name.strip()]
    for name in names:
        if name not in presets:
            raise SystemExit(f"Unknown panel '{name}'; choose from {', '.join(sorted(presets))}")
    return names


def _grids(cfg: RunConfig, presets: Dict[str, Dict[str, Any]], default_panels: Sequence[str], points: int):
    """Return ``(direction, channels, triggers)`` for panels or an explicit grid."""
    try:
        return list(_grid_specs(cfg, presets, default_panels, points))
    except BQTError as exc:
        raise SystemExit(describe(exc))


def _grid_specs(cfg: RunConfig, presets: Dict[str, Dict[str, Any]], default_panels: Sequence[str], points: int):
    if cfg.theta_e is None and cfg.theta_o is None:
        p_values = cfg.p if cfg.p is not None else FIGURE_P
        for name in _panel_names(cfg, presets, default_panels):
            panel = dict(presets[name])
            if cfg.n is not None:
                panel["n"] = cfg.n[0]
            if cfg.m is not None:
                panel["m"] = cfg.m[0]
            yield protocol.panel_grid(panel, cfg.points or points, p_values)
        return
    channels = [
        ChannelParams(p, n, m)
        for p in (cfg.p if cfg.p is not None else FIGURE_P)
        for n in (cfg.n or [3])
        for m in (cfg.m or [0])
    ]
    triggers = [
        TriggerPhase(e * math.pi, o * math.pi)
        for e in (cfg.theta_e or [0.0])
        for o in (cfg.theta_o or [0.0])
    ]
    for direction in _directions(cfg):
        yield direction, channels, triggers


def _pi_units(row: Dict[str, Any]) -> Dict[str, Any]:
    row = dict(row)
    row["theta_e"] = row["theta_e"] / math.pi
    row["theta_o"] = row["theta_o"] / math.pi
    return row


def cmd_fig1(args: argparse.Namespace) -> None:
    """Concurrence of the two-mode reduction: closed form against Wootters."""
    cfg = resolve_config(args)
    _configure_logging(cfg)
    rows = []
    for p in cfg.p or FIG1_P:
        for n in cfg.n or FIG1_N:
            for m in cfg.m or FIG1_M:
                row: Dict[str, Any] = {"p": p, "n": n, "m": m}
                try:
                    params = ChannelParams(p, n, m)
                    closed = concurrence_closed_form(params)
                    oracle = concurrence(reduced_pair_state(params))
                    row.update(C_closed=closed, C_wootters=oracle, abs_delta=abs(closed - oracle))
                except BQTError as exc:
                    row.update(C_closed=describe(exc), C_wootters="", abs_delta="")
                rows.append(row)
    _emit_table(cfg, rows, FIG1_COLUMNS)


def cmd_fig4(args: argparse.Namespace) -> None:
    """Closed-form and oracle fidelities over the fig4 panels or a custom grid."""
    cfg = resolve_config(args)
    _configure_logging(cfg)
    rows = []
    for direction, channels, triggers in _grids(cfg, FIG4_PANELS, "abcd", FIG4_POINTS):
        table = protocol.sweep(
            direction,
            channels,
            triggers,
            ["fidelity_closed", "fidelity_oracle"],
            _options(cfg, "printed"),
            cfg.workers,
        )
        for cell in table.rows:
            row = _pi_units(cell)
            closed = cell["fidelity_closed"]
            row["F_closed"] = closed
            row["F_oracle"] = cell["fidelity_oracle"]
            row["flag_out_of_range"] = (not 0.0 <= closed <= 1.0) if isinstance(closed, float) else ""
            rows.append(row)
    _emit_table(cfg, rows, FIG4_COLUMNS)


def _extremum_label(qfi: List[float], hss: List[float]) -> str:
    offsets = extremum_offsets(hss, qfi)
    return f"{format_number(offsets['maxima'])}/{format_number(offsets['minima'])}"


def _printed_failures(
    direction: str,
    channels: Sequence[ChannelParams],
    triggers: Sequence[TriggerPhase],
    options: SweepOptions,
    workers: Optional[int],
) -> List[bool]:
    """Return, per cell, whether the printed Bloch pipeline raises InvalidBloch."""
    printed = protocol.sweep(direction, channels, triggers, "qfi", replace(options, source="printed"), workers)
    return [str(cell["qfi"]).startswith("InvalidBloch") for cell in printed.rows]


def cmd_fig5(args: argparse.Namespace) -> None:
    """Trigger-phase QFI and HSS over the fig5 panels or a custom grid."""
    cfg = resolve_config(args)
    _configure_logging(cfg)
    options = _options(cfg, "state")
    rows = []
    invalid = 0
    for direction, channels, triggers in _grids(cfg, FIG5_PANELS, "abcd", FIG5_POINTS):
        table = protocol.sweep(
            direction,
            channels,
            triggers,
            ["qfi", "hss", "hss_relation", "bloch_radius"],
            options,
            cfg.workers,
        )
        failures = _printed_failures(direction, channels, triggers, options, cfg.workers)
        invalid += sum(failures)
        qfi = table.numeric("qfi")
        hss = table.numeric("hss")
        span = len(triggers)
        for start in range(0, len(table.rows), span):
            label = _extremum_label(list(qfi[start:start + span]), list(hss[start:start + span]))
            for cell, failed in zip(table.rows[start:start + span], failures[start:start + span]):
                row = _pi_units(cell)
                radius = cell["bloch_radius"]
                row.update(
                    QFI_pipeline=cell["qfi"],
                    HSS_direct=cell["hss"],
                    HSS_paper_relation=cell["hss_relation"],
                    flag_bloch=(radius > 1.0 + 1e-9) if isinstance(radius, float) else "",
                    printed_invalid_bloch=failed,
                    extremum_steps=label,
                )
                rows.append(row)
    print(
        f"# fig5: {invalid}/{len(rows)} cells raise InvalidBloch under the printed Bloch pipeline; "
        f"QFI_pipeline uses the {options.source} source",
        file=sys.stderr,
    )
    _emit_table(cfg, rows, FIG5_COLUMNS)


def cmd_circuit(args: argparse.Namespace) -> None:
    """Exact and sampled outcome statistics of the ten-qubit circuit."""
    cfg = resolve_config(args)
    _configure_logging(cfg)
    p = (cfg.p or [0.0])[0]
    n = (cfg.n or [3])[0]
    m = (cfg.m or [1])[0]
    theta_e = (cfg.theta_e or [0.0])[0]
    theta_o = (cfg.theta_o or [1.0])[0]
    try:
        params = ChannelParams(p, n, m)
        triggers = TriggerPhase(theta_e * math.pi, theta_o * math.pi)
        if cfg.circuit:
            try:
                circuit = load_circuit(cfg.circuit)
            except (OSError, json.JSONDecodeError) as exc:
                raise SystemExit(f"Failed to read circuit file: {exc}")
        else:
            circuit = build_bqt_circuit(params, triggers, final_readout=bool(cfg.final_readout))
        if cfg.save_circuit:
            try:
                save_circuit(circuit, cfg.save_circuit)
            except OSError as exc:
                raise SystemExit(f"Failed to write circuit file: {exc}")
        init = default_init(params)
        exact = simulator.run_exact(circuit, init)
        sampled = None
        if cfg.shots:
            seed = DEFAULT_SEED if cfg.seed is None else cfg.seed
            sampled = simulator.run_shots(circuit, init, cfg.shots, seed)
    except BQTError as exc:
        raise SystemExit(describe(exc))

    if (cfg.format or "json") == "csv":
        rows = []
        for key in sorted(set(exact.outcomes) | set(sampled.outcomes if sampled else {})):
            rows.append(
                {
                    "outcome": key,
                    "exact": exact.outcomes.get(key, 0.0),
                    "count": sampled.outcomes.get(key, 0) if sampled else "",
                }
            )
        emit(csv_text(rows, ["outcome", "exact", "count"]), cfg.out)
    else:
        data: Dict[str, Any] = {
            "config": {"p": p, "n": n, "m": m, "theta_e": theta_e, "theta_o": theta_o},
            "exact": exact.to_dict(),
            "table3_reference": TABLE3_REFERENCE,
        }
        if sampled is not None:
            data["sampled"] = sampled.to_dict()
        emit(json_text(data), cfg.out)
    if cfg.bars:
        print((sampled or exact).bars())


def cmd_compare(args: argparse.Namespace) -> None:
    """Ledger of printed formulas against their first-principles counterparts."""
    cfg = resolve_config(args)
    _configure_logging(cfg)
    ps = cfg.p if cfg.p is not None else list(FIGURE_P)
    ns = cfg.n if cfg.n is not None else [3, 25]
    ms = cfg.m if cfg.m is not None else [0, 1]
    thetas_e = [t * math.pi for t in (cfg.theta_e if cfg.theta_e is not None else COMPARE_THETAS)]
    thetas_o = [t * math.pi for t in (cfg.theta_o if cfg.theta_o is not None else COMPARE_THETAS)]
    try:
        data = report.build_report(ps, ns, ms, thetas_e, thetas_o, cfg.points or FIG5_POINTS)
    except BQTError as exc:
        raise SystemExit(describe(exc))
    if cfg.format == "json":
        emit(json_text(data), cfg.out)
        return
    print(report.report_markdown(data), end="")
    if cfg.out:
        emit(json_text(data), cfg.out)


def cmd_validate(args: argparse.Namespace) -> None:
    """Fock-space checks of the coherent and cat-state algebra."""
    cfg = resolve_config(args)
    _configure_logging(cfg)
    etas = cfg.eta or list(VALIDATE_ETAS)
    cutoff = None
    if cfg.cutoff not in (None, "auto"):
        try:
            cutoff = int(cfg.cutoff)
        except ValueError:
            raise SystemExit(f"cutoff must be an integer or 'auto', got {cfg.cutoff!r}")
    rows = fock_oracle.validation_table(etas, cutoff)
    _emit_table(cfg, rows, VALIDATE_COLUMNS)
    worst = fock_oracle.max_deviation(rows)
    failed = sum(1 for row in rows if row["error"])
    print(f"max deviation: {format_number(worst)}; failed rows: {failed}", file=sys.stderr)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run-config file; explicit flags override it")
    p.add_argument("--format", choices=["csv", "json"], help="Output format")
    p.add_argument("--out", help="Output path (stdout when omitted)")
    p.add_argument("--verbose", action="store_true", default=None, help="Debug logging")


def _add_channel(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", help="Overlap values, comma separated")
    p.add_argument("--n", help="Mode counts, comma separated")
    p.add_argument("--m", help="Parity indices, comma separated")


def _add_triggers(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta-e", dest="theta_e", help="Alice's trigger angles in units of pi")
    p.add_argument("--theta-o", dest="theta_o", help="Bob's trigger angles in units of pi")


def _add_figure(p: argparse.ArgumentParser) -> None:
    p.add_argument("--panel", help="Panel letters, comma separated, or 'all'")
    p.add_argument("--points", type=int, help="Angles per sweep")
    p.add_argument("--direction", choices=["ab", "ba", "both"], help="Custom-grid direction")
    p.add_argument("--rho1-mode", dest="rho1_mode", choices=list(protocol.RHO1_MODES))
    p.add_argument("--weights", choices=list(protocol.WEIGHT_MODES), help="Success-weight formula")
    p.add_argument("--grouping", choices=list(protocol.GROUPINGS), help="Printed Bloch denominator")
    p.add_argument("--bloch-source", dest="bloch_source", choices=list(protocol.BLOCH_SOURCES))
    p.add_argument("--richardson", action="store_true", default=None, help="Richardson derivatives")
    p.add_argument("--workers", type=int, help="Sweep threads")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bqt",
        description="Bidirectional teleportation workbench over multipartite coherent channels",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fig1 = sub.add_parser("fig1", help="Concurrence against the overlap")
    _add_common(p_fig1)
    _add_channel(p_fig1)
    p_fig1.set_defaults(func=cmd_fig1)

    p_fig4 = sub.add_parser("fig4", help="Teleportation fidelities")
    _add_common(p_fig4)
    _add_channel(p_fig4)
    _add_triggers(p_fig4)
    _add_figure(p_fig4)
    p_fig4.set_defaults(func=cmd_fig4)

    p_fig5 = sub.add_parser("fig5", help="Trigger-phase QFI and HSS")
    _add_common(p_fig5)
    _add_channel(p_fig5)
    _add_triggers(p_fig5)
    _add_figure(p_fig5)
    p_fig5.set_defaults(func=cmd_fig5)

    p_circuit = sub.add_parser("circuit", help="Simulate the ten-qubit circuit")
    _add_common(p_circuit)
    _add_channel(p_circuit)
    _add_triggers(p_circuit)
    p_circuit.add_argument("--shots", type=int, help="Sampled shots")
    p_circuit.add_argument("--seed", type=int, help="Sampling seed")
    p_circuit.add_argument("--circuit", help="Circuit description file to run")
    p_circuit.add_argument("--save-circuit", dest="save_circuit", help="Write the circuit used")
    p_circuit.add_argument("--final-readout", dest="final_readout", action="store_true", default=None)
    p_circuit.add_argument("--bars", action="store_true", default=None, help="Print text bars")
    p_circuit.set_defaults(func=cmd_circuit)

    p_compare = sub.add_parser("compare", help="Printed formulas against first principles")
    _add_common(p_compare)
    _add_channel(p_compare)
    _add_triggers(p_compare)
    p_compare.add_argument("--points", type=int, help="Angles per extremum sweep")
    p_compare.set_defaults(func=cmd_compare)

    p_validate = sub.add_parser("validate", help="Fock-space validation of the encoding")
    _add_common(p_validate)
    p_validate.add_argument("--eta", help="Coherent amplitudes, comma separated")
    p_validate.add_argument("--cutoff", help="Photon-number cutoff or 'auto'")
    p_validate.set_defaults(func=cmd_validate)

    return parser


def main(argv: Optional[List[str]] = None) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()


__all__ = [
    "main",
    "build_parser",
    "RunConfig",
    "load_run_config",
    "resolve_config",
    "cmd_fig1",
    "cmd_fig4",
    "cmd_fig5",
    "cmd_circuit",
    "cmd_compare",
    "cmd_validate",
]
