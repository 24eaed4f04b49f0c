"""Command line runner.

    converterless run --scenario startup --out out/
    converterless run --config my_run.toml --duration 0
    converterless oracle --config my_run.toml

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from converterless.config import (BUILTIN_SCENARIOS, ConfigError, RunConfig, load_config,
                                  parse_config, read_seed_order)
from converterless.electrolyser_stack import StackState
from converterless.metrics_cost import cost_comparison
from converterless.mppt_controller import ControllerState
from converterless.pv_model import CalibrationError, PvParams, calibrate, pv_mpp
from converterless.sim_engine import Scenario, Segment, Simulation, steady_state_oracle

log = logging.getLogger("converterless")

EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 2, 3, 4

CSV_FIELDS = ["t_s", "irradiance_wm2", "v_bus_v", "i_a", "p_w", "n_active", "max_delta_sta"]


def csv_header(n_total: int) -> list[str]:
    return CSV_FIELDS + [f"sta_cell_{k}" for k in range(n_total)]


@dataclass
class PlateauReport:
    segment: Segment
    n_star: int
    p_star: float
    v_mpp: float
    p_mpp: float
    band: list[int]
    ticks_to_band: int | None
    mean_power: float | None


def oracle_powers(pv: PvParams, cfg: RunConfig, g: float) -> list[float]:
    return [steady_state_oracle(pv, cfg.cell, n, g).p for n in range(1, cfg.n_total + 1)]


def plateau_reports(sim: Simulation, pv: PvParams, cfg: RunConfig,
                    powers: list[tuple[float, float]]) -> list[PlateauReport]:
    """Per irradiance segment: oracle optimum and the active-count band the controller settled in.

    The band is every active count seen from the first tick that lands within
    one cell of the oracle optimum to the end of the segment.
    """
    reports = []
    duration = sim.scenario.duration
    for seg in sim.scenario.irradiance:
        if seg.start > duration or (seg.start == duration and not seg.include_start):
            continue
        p_n = oracle_powers(pv, cfg, seg.value)
        n_star = int(np.argmax(p_n)) + 1
        v_mpp, p_mpp = pv_mpp(pv, seg.value)
        counts = [n for t, n in sim.tick_log if seg.contains(t)]
        entry = next((k for k, n in enumerate(counts) if abs(n - n_star) <= 1), None)
        band, mean_p = [], None
        if entry is not None:
            band = sorted(set(counts[entry:]))
            t_entry = [t for t, _ in sim.tick_log if seg.contains(t)][entry]
            settled = [p for t, p in powers if seg.contains(t) and t > t_entry]
            mean_p = float(np.mean(settled)) if settled else None
        reports.append(PlateauReport(seg, n_star, p_n[n_star - 1], v_mpp, p_mpp, band,
                                     None if entry is None else entry + 1, mean_p))
    return reports


def _interval(seg: Segment) -> str:
    lo = "[" if seg.include_start else "("
    hi = "]" if seg.include_end else ")"
    return f"{lo}{seg.start:g}, {seg.end:g}{hi}"


def write_summary(path: Path, cfg: RunConfig, sim: Simulation, reports: list[PlateauReport],
                  final_max_delta: float | None):
    cost = cost_comparison(cfg.cost)
    lines = [f"scenario: {cfg.scenario_name}",
             f"duration_s: {sim.scenario.duration:g}",
             f"n_total: {cfg.n_total}",
             ""]
    for r in reports:
        band = "{" + ", ".join(map(str, r.band)) + "}" if r.band else "not reached"
        lines += [
            f"plateau {_interval(r.segment)} s at {r.segment.value:g} W/m2",
            f"  active-cell band: {band}",
            f"  ticks to band: {r.ticks_to_band if r.ticks_to_band is not None else '-'}",
            f"  oracle optimum: n = {r.n_star}, p = {r.p_star:.3f} W",
            f"  PV MPP: v = {r.v_mpp:.3f} V, p = {r.p_mpp:.3f} W",
        ]
        if r.mean_power is not None:
            lines.append(f"  mean tracked power: {r.mean_power:.3f} W "
                         f"({100 * r.mean_power / r.p_mpp:.2f}% of PV MPP)")
    lines += ["",
              f"final max delta STA: {final_max_delta:.6f}" if final_max_delta is not None
              else "final max delta STA: -",
              "",
              f"cost with converter: {cost.cost_with:.2f}",
              f"cost without converter: {cost.cost_without:.2f}",
              f"savings: {cost.savings:.2f}",
              f"savings pct: {cost.pct:.3f}%",
              ""]
    path.write_text("\n".join(lines))


def run_scenario(cfg: RunConfig) -> int:
    """Run one configuration, writing ``timeseries.csv`` and ``summary.txt``."""
    try:
        pv = calibrate(cfg.anchors)
        stack = StackState.initial(cfg.n_total, cfg.seed_order)
    except (CalibrationError, ValueError) as exc:
        key = f"pv.{exc.anchor}" if isinstance(exc, CalibrationError) else "seed-order"
        print(f"config error: {key}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    sim = Simulation(cfg.scenario, pv, cfg.cell, ControllerState(), stack=stack,
                     sta_divisor=cfg.sta_divisor)
    powers = []
    final_max_delta = None
    try:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        with open(cfg.out_dir / "timeseries.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(csv_header(cfg.n_total))
            try:
                for rec in sim.records():
                    writer.writerow([repr(rec.t), repr(rec.irradiance), repr(rec.v_bus),
                                     repr(rec.i), repr(rec.p), rec.n_active,
                                     repr(rec.max_delta_sta), *map(repr, rec.sta)])
                    powers.append((rec.t, rec.p))
                    final_max_delta = rec.max_delta_sta
            except (ArithmeticError, ValueError) as exc:
                print(f"numerical failure at step t={sim.t:.6g} s: {exc}",
                      file=sys.stderr)
                return EXIT_NUMERIC
        reports = plateau_reports(sim, pv, cfg, powers)
        write_summary(cfg.out_dir / "summary.txt", cfg, sim, reports, final_max_delta)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    log.info("wrote %s", cfg.out_dir)
    return 0


def oracle_report(cfg: RunConfig, out=None) -> int:
    """Print steady-state stack power for every cell count at each irradiance level."""
    out = out or sys.stdout
    try:
        pv = calibrate(cfg.anchors)
    except CalibrationError as exc:
        print(f"config error: pv.{exc.anchor}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    levels = sorted({seg.value for seg in cfg.scenario.irradiance}, reverse=True)
    for g in levels:
        p_n = oracle_powers(pv, cfg, g)
        best = int(np.argmax(p_n))
        print(f"irradiance {g:g} W/m2", file=out)
        print(f"{'n':>4} {'v_bus_V':>10} {'i_A':>9} {'p_W':>10}", file=out)
        for n in range(1, cfg.n_total + 1):
            op = steady_state_oracle(pv, cfg.cell, n, g)
            mark = "  *" if n - 1 == best else ""
            print(f"{n:>4} {op.v_bus:>10.3f} {op.i:>9.4f} {op.p:>10.3f}{mark}", file=out)
        print(file=out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="converterless", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="simulate a scenario and write CSV + summary")
    src = run_p.add_mutually_exclusive_group()
    src.add_argument("--scenario", choices=sorted(BUILTIN_SCENARIOS))
    src.add_argument("--config", type=Path)
    run_p.add_argument("--out", type=Path)
    run_p.add_argument("--duration", type=float)
    run_p.add_argument("--dt", type=float)
    run_p.add_argument("--seed-order", type=Path,
                       help="file listing cell indices in tie-break priority order")

    oracle_p = sub.add_parser("oracle", help="print steady-state power for every cell count")
    oracle_p.add_argument("--config", type=Path)
    oracle_p.add_argument("--scenario", choices=sorted(BUILTIN_SCENARIOS))
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {}
    if args.command == "run":
        overrides = {"duration": args.duration, "dt": args.dt}
    try:
        if args.config is not None:
            cfg = load_config(args.config, **overrides)
        else:
            scenario = {"name": args.scenario} if args.scenario else {}
            cfg = parse_config({"scenario": scenario}, **overrides)
        if args.command == "run":
            if args.out is not None:
                cfg.out_dir = args.out
            if args.seed_order is not None:
                cfg.seed_order = read_seed_order(args.seed_order)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "run":
        return run_scenario(cfg)
    return oracle_report(cfg)


if __name__ == "__main__":
    sys.exit(main())
