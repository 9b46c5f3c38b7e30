"""Command-line entry point.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or validation error.
Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Iterable, Optional, Sequence

from .danger import DangerConfig, Policy
from .detector import DetectorConfig
from .harness import (
    PRESETS,
    ScenarioFormatError,
    ScenarioSpecError,
    compute_metrics,
    energy_report,
    generate_scenario,
    load_scenario,
    make_preset,
    preset_report,
    run_pipeline,
    save_scenario,
    score_trace,
    write_trace,
)
from .harness.energy import DRIVE_HOURS, ENERGY_PRESETS
from .harness.io import dump_record
from .montecarlo import McConfig, analytic_p_danger, brute_force_p_danger, load_slope, run_simulation

SEED_ENV = "HEADLIGHT_SIM_SEED"
EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _fmt(value) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format(round(value, 6), "g")
    return str(value)


def _emit(records: Iterable[dict], fmt: str, out) -> None:
    """Write records either as JSON lines or as aligned ``key  value`` blocks."""
    for rec in records:
        if fmt == "jsonl":
            out.write(dump_record(rec) + "\n")
            continue
        kind = rec.get("kind", "")
        fields = {k: v for k, v in rec.items() if k != "kind"}
        width = max((len(k) for k in fields), default=0)
        out.write(f"[{kind}]\n")
        for k, v in fields.items():
            out.write(f"  {k.ljust(width)}  {_fmt(v)}\n")


def _emit_table(kind: str, columns: Sequence[str], rows: Sequence[Sequence], fmt: str, out) -> None:
    if fmt == "jsonl":
        for row in rows:
            out.write(dump_record({"kind": kind, **dict(zip(columns, row))}) + "\n")
        return
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    out.write(f"[{kind}]\n")
    out.write("  " + "  ".join(c.rjust(w) for c, w in zip(columns, widths)) + "\n")
    for r in cells:
        out.write("  " + "  ".join(v.rjust(w) for v, w in zip(r, widths)) + "\n")


def _energy_rows(report) -> list[list]:
    return [[r.headlight, r.watts, r.used_wh, r.baseline_wh, r.saved_wh] for r in report.rows]


ENERGY_COLUMNS = ("headlight", "watts", "used_wh", "baseline_wh", "saved_wh")


# --- subcommands -----------------------------------------------------------

def cmd_gen(args, out) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.actors:
        try:
            with open(args.actors, encoding="utf-8") as fh:
                actors = json.load(fh)
        except OSError as exc:
            print(f"error: cannot read actor file: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        except json.JSONDecodeError as exc:
            raise UsageError(f"actor file is not valid JSON: {exc}") from None
        if not isinstance(actors, list):
            raise UsageError("actors: expected a list of actor objects")
        if args.noise:
            actors = [dict(a, noise=args.noise) if isinstance(a, dict) else a for a in actors]
        scenario = generate_scenario(
            actors, args.duration, args.rate, seed, name=args.name or "custom",
            vehicle_width_m=args.width, reaction_time_s=args.reaction_time,
        )
    else:
        scenario = make_preset(args.preset, seed, noise=args.noise, frame_rate_hz=args.rate,
                               reaction_time_s=args.reaction_time, vehicle_width_m=args.width)
        if args.name:
            scenario.name = args.name
    try:
        save_scenario(scenario, args.output)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    dangerous = sum(o.dangerous for ft in scenario.ground_truth for o in ft.objects)
    _emit([{
        "kind": "scenario",
        "name": scenario.name,
        "path": args.output,
        "frames": len(scenario.frames),
        "duration_s": scenario.duration_s,
        "seed": scenario.seed,
        "dangerous_truth_frames": dangerous,
    }], args.format, out)
    return EXIT_OK


def _detector_cfg(args) -> DetectorConfig:
    return DetectorConfig(
        cluster_radius=args.cluster_radius,
        min_cluster_points=args.min_points,
        max_match_displacement=args.gate,
        cost_weight_displacement=args.w_disp,
        cost_weight_iou=args.w_iou,
        process_noise=args.process_noise,
        measurement_noise=args.meas_noise,
        velocity_measurement_noise=args.vel_noise,
        ego_sign=args.ego_sign,
    )


def cmd_run(args, out) -> int:
    det_cfg = _detector_cfg(args)
    if args.matching_radius <= 0:
        raise UsageError("--matching-radius must be positive")
    try:
        scenario = load_scenario(args.scenario)
    except OSError as exc:
        print(f"error: cannot read {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ScenarioFormatError as exc:
        print(f"error: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    width = args.width if args.width is not None else scenario.vehicle_width_m
    danger_cfg = DangerConfig(args.reaction_time, width, Policy(args.policy))

    trace = run_pipeline(scenario, det_cfg, danger_cfg, args.tau)
    if args.trace:
        try:
            with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
                write_trace(trace, fh, {"policy": args.policy, "tau_s": args.tau})
        except OSError as exc:
            print(f"error: cannot write trace: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
    cm = score_trace(trace, scenario.ground_truth, args.matching_radius)
    metrics = compute_metrics(cm)
    energy = energy_report(trace.on_time_s, trace.total_time_s, beam=args.beam)

    _emit([
        {
            "kind": "run",
            "scenario": scenario.name,
            "policy": args.policy,
            "frames": len(trace.frames),
            "total_time_s": trace.total_time_s,
            "on_time_s": trace.on_time_s,
            "light_on_fraction": energy.fraction_on,
            "accepted_messages": trace.accepted_messages,
            "transitions": len(trace.transitions),
            "dangerous_verdicts": sum(v.dangerous for f in trace.frames for v in f.verdicts),
        },
        {"kind": "confusion", "tp": cm.tp, "fp": cm.fp, "fn": cm.fn, "tn": cm.tn},
        {"kind": "metrics", **metrics.as_dict()},
    ], args.format, out)
    _emit_table("energy", ENERGY_COLUMNS, _energy_rows(energy), args.format, out)
    return EXIT_OK


def cmd_montecarlo(args, out) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        cfg = McConfig(args.n, args.alpha, args.max_load, args.trials, seed, args.width)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    result = run_simulation(cfg, workers=args.workers)
    _emit_table("load", ("load", "mean_fraction"), list(zip(result.loads, result.averages)), args.format, out)
    summary = {
        "kind": "summary",
        "n": cfg.n,
        "alpha": cfg.alpha,
        "max_load": cfg.max_load,
        "trials": cfg.num_trials,
        "seed": cfg.seed,
        "grand_mean": result.grand_mean,
        "pooled_fraction": result.pooled_fraction,
        "analytic": analytic_p_danger(cfg.n) if cfg.alpha == 1 else None,
        "brute_force": brute_force_p_danger(cfg.n, cfg.alpha) if cfg.n <= 10_000 else None,
    }
    if cfg.max_load >= 3:
        fit = load_slope(result)
        summary.update(slope=fit.slope, slope_ci_low=fit.ci_low, slope_ci_high=fit.ci_high)
    _emit([summary], args.format, out)
    return EXIT_OK


def cmd_energy(args, out) -> int:
    if args.scenario:
        report = preset_report(args.scenario, beam=args.beam)
        label = args.scenario
    else:
        if args.on_time is None:
            raise UsageError("give --scenario or --on-time")
        total = args.total_time if args.total_time is not None else DRIVE_HOURS * 3600.0
        try:
            report = energy_report(args.on_time, total, beam=args.beam)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        label = "custom"
    _emit([{
        "kind": "energy_case",
        "case": label,
        "beam": report.beam,
        "on_time_s": report.on_time_s,
        "total_time_s": report.total_time_s,
        "fraction_on": report.fraction_on,
    }], args.format, out)
    _emit_table("energy", ENERGY_COLUMNS, _energy_rows(report), args.format, out)
    return EXIT_OK


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="headlight-sim", description=__doc__.splitlines()[0])
    parser.add_argument("--timing", action="store_true", help="print elapsed wall time to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("table", "jsonl"), default="table")

    g = sub.add_parser("gen", help="generate a scenario file")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=PRESETS, default="approach")
    src.add_argument("--actors", help="JSON file with a list of actor scripts")
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    g.add_argument("--duration", type=float, default=10.0, help="seconds (custom actors only)")
    g.add_argument("--rate", type=float, default=10.0, help="frame rate in Hz")
    g.add_argument("--noise", type=float, default=0.0, help="per-frame position jitter (m)")
    g.add_argument("--width", type=float, default=2.0, help="vehicle width w (m)")
    g.add_argument("--reaction-time", type=float, default=3.0)
    g.add_argument("--name")
    common(g)
    g.set_defaults(func=cmd_gen)

    d = DetectorConfig()
    r = sub.add_parser("run", help="play a scenario through the pipeline and score it")
    r.add_argument("scenario")
    r.add_argument("--policy", choices=[p.value for p in Policy], default="current")
    r.add_argument("--tau", type=float, default=3.0, help="light timer (s)")
    r.add_argument("--reaction-time", type=float, default=3.0)
    r.add_argument("--width", type=float, default=None, help="vehicle width w (default: from scenario)")
    r.add_argument("--cluster-radius", type=float, default=d.cluster_radius)
    r.add_argument("--min-points", type=int, default=d.min_cluster_points)
    r.add_argument("--gate", type=float, default=d.max_match_displacement, help="max match displacement (m)")
    r.add_argument("--w-disp", type=float, default=d.cost_weight_displacement)
    r.add_argument("--w-iou", type=float, default=d.cost_weight_iou)
    r.add_argument("--process-noise", type=float, default=d.process_noise)
    r.add_argument("--meas-noise", type=float, default=d.measurement_noise)
    r.add_argument("--vel-noise", type=float, default=d.velocity_measurement_noise)
    r.add_argument("--ego-sign", type=float, choices=(1.0, -1.0), default=d.ego_sign)
    r.add_argument("--matching-radius", type=float, default=1.0)
    r.add_argument("--beam", choices=("high", "low"), default="high")
    r.add_argument("--trace", help="write the full per-frame trace here (JSON lines)")
    common(r)
    r.set_defaults(func=cmd_run)

    m = sub.add_parser("montecarlo", help="random-object danger fraction sweep")
    m.add_argument("--n", type=int, default=60, help="upper bound of unif{1,n} for distance and speed")
    m.add_argument("--alpha", type=float, default=1.0, help="reaction time factor")
    m.add_argument("--max-load", type=int, default=100)
    m.add_argument("--trials", type=int, default=1000)
    m.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    m.add_argument("--width", type=float, default=2.0)
    m.add_argument("--workers", type=int, default=1)
    common(m)
    m.set_defaults(func=cmd_montecarlo)

    e = sub.add_parser("energy", help="headlight energy for a lit time")
    e.add_argument("--scenario", choices=tuple(ENERGY_PRESETS))
    e.add_argument("--on-time", type=float, help="lit seconds")
    e.add_argument("--total-time", type=float, help=f"seconds (default {DRIVE_HOURS} h)")
    e.add_argument("--beam", choices=("high", "low"), default="high")
    common(e)
    e.set_defaults(func=cmd_energy)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        code = args.func(args, out)
    except (UsageError, ScenarioSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # config validation surfaces as ValueError before any work happens
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
