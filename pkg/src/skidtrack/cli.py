"""Command-line harness.

Commands:
    validate  check controller gains against the feasibility conditions
    run       execute the configured experiment grid, write CSVs + summaries
    compare   paired statistics between two run output directories
    sweep     re-run the grid over a list of values for one config key

Exit codes: 0 success, 1 infeasible gains, 2 configuration or usage error,
3 numerical failure during simulation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import config as cfg
from .controller import gamma1_bound, validate_gains
from .errors import (
    ConfigError,
    InfeasibleGains,
    MismatchedRuns,
    NumericalFailure,
    SkidtrackError,
)
from .metrics import summarize_record
from .simulate import ExperimentRecord, read_record_csv, run_experiment, write_record_csv
from .stats import METRIC_NAMES, compare

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skidtrack",
        description="benchmark harness for slip-compensated sliding-mode tracking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", metavar="PATH", help="flat-key config file")
        p.add_argument("--preset", choices=cfg.PRESETS, help="named default set")
        p.add_argument("--seed", type=int, help="override run.seed")

    p_val = sub.add_parser("validate", help="check gain feasibility")
    add_common(p_val)

    p_run = sub.add_parser("run", help="run the experiment grid")
    add_common(p_run)
    p_run.add_argument("--out", metavar="DIR", default="out", help="output directory")
    p_run.add_argument("--jobs", type=int, default=1, help="parallel workers")

    p_cmp = sub.add_parser("compare", help="paired comparison of two run dirs")
    p_cmp.add_argument("baseline", metavar="DIR_A")
    p_cmp.add_argument("variant", metavar="DIR_B")
    p_cmp.add_argument("--out", metavar="DIR", default=None, help="where to write reports")

    p_swp = sub.add_parser("sweep", help="sweep one config key over values")
    add_common(p_swp)
    p_swp.add_argument("--param", required=True, metavar="KEY")
    p_swp.add_argument("--values", required=True, metavar="V1,V2,...")
    p_swp.add_argument("--out", metavar="DIR", default="sweep-out")
    p_swp.add_argument("--jobs", type=int, default=1)
    return parser


def _load_config(args) -> cfg.HarnessConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["run.seed"] = args.seed
    return cfg.load_config(
        path=args.config, preset=args.preset, cli_overrides=overrides
    )


def cmd_validate(args) -> int:
    conf = _load_config(args)
    gains = conf.gains()
    findings = validate_gains(gains)
    if findings:
        for line in findings:
            print(f"INFEASIBLE: {line}")
        return EXIT_INFEASIBLE
    print("gains feasible")
    print(
        "advisory: gamma1 additionally obeys a state-dependent bound; "
        f"at |eps1| = 0.3 it is {gamma1_bound(0.3, gains):.4g}"
    )
    return EXIT_OK


def _job_list(conf: cfg.HarnessConfig, out_dir: str):
    jobs = []
    base = conf["run.seed"]
    for t_idx, (traj, count) in enumerate(conf.trajectory_plan()):
        for r_idx in range(count):
            slip_seed, plant_seed, est_seed = cfg.derive_seeds(base, t_idx, r_idx)
            for controller in conf.controllers():
                jobs.append(
                    {
                        "values": dict(conf.values),
                        "kind": traj.kind,
                        "duration": traj.duration,
                        "run_index": r_idx,
                        "controller": controller,
                        "slip_seed": slip_seed,
                        "plant_seed": plant_seed,
                        "est_seed": est_seed,
                        "out_dir": out_dir,
                    }
                )
    return jobs


def _execute_job(job: dict) -> str:
    """Run one experiment and write its CSV + summary; returns the CSV path."""
    conf = cfg.HarnessConfig(job["values"])
    from .trajectories import TrajectorySpec

    traj = TrajectorySpec.make(job["kind"], job["duration"])
    record = run_experiment(
        traj,
        conf.slip_config(job["slip_seed"]),
        conf.gains(),
        conf.estimator_config(job["est_seed"]),
        conf.envelope(),
        dt=conf["run.dt"],
        plant_seed=None if conf["plant.nominal"] else job["plant_seed"],
        compensate=(job["controller"] == "smc-ss"),
        x0_true=conf["plant.x0_true"],
        substeps=conf["run.substeps"],
    )
    record.meta["run_index"] = job["run_index"]
    stem = f"{job['kind']}-{job['controller']}-r{job['run_index']:02d}"
    csv_path = os.path.join(job["out_dir"], stem + ".csv")
    write_record_csv(record, csv_path)
    summary = {
        "meta": record.meta,
        "metrics": summarize_record(record).as_dict(),
        "final_dis_cm": float(record["dis"][-1] * 100.0),
    }
    with open(os.path.join(job["out_dir"], stem + ".json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


def cmd_run(args) -> int:
    conf = _load_config(args)
    findings = validate_gains(conf.gains())
    if findings:
        for line in findings:
            print(f"INFEASIBLE: {line}")
        return EXIT_INFEASIBLE
    os.makedirs(args.out, exist_ok=True)
    jobs = _job_list(conf, args.out)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            paths = list(pool.map(_execute_job, jobs))
    else:
        paths = [_execute_job(job) for job in jobs]
    for path in paths:
        print(f"wrote {path}")
    print(f"{len(paths)} records in {args.out}")
    return EXIT_OK


def _load_run_dir(directory: str) -> list[ExperimentRecord]:
    records = []
    try:
        names = sorted(os.listdir(directory))
    except OSError as exc:
        raise ConfigError(f"cannot list {directory!r}: {exc}") from exc
    for name in names:
        if not name.endswith(".csv"):
            continue
        stem = name[:-4]
        json_path = os.path.join(directory, stem + ".json")
        if not os.path.exists(json_path):
            raise ConfigError(f"missing summary sidecar for {name}")
        with open(json_path) as fh:
            meta = json.load(fh)["meta"]
        columns = read_record_csv(os.path.join(directory, name))
        records.append(ExperimentRecord(meta=meta, columns=columns))
    if not records:
        raise ConfigError(f"no records found in {directory!r}")
    return records


def _sort_key(record: ExperimentRecord):
    return (record.meta["trajectory"], record.meta.get("run_index", 0))


def cmd_compare(args) -> int:
    records_a = [r for r in _load_run_dir(args.baseline) if r.meta["controller"] == "smc"]
    records_b = [r for r in _load_run_dir(args.variant) if r.meta["controller"] == "smc-ss"]
    records_a.sort(key=_sort_key)
    records_b.sort(key=_sort_key)
    result = compare(records_a, records_b)

    lines = ["# Paired comparison (baseline: smc, variant: smc-ss)", ""]
    for scope, table in [*result.per_trajectory.items(), ("overall", result.overall)]:
        lines.append(f"## {scope}")
        lines.append("| metric | baseline | variant | improvement % |")
        lines.append("|---|---|---|---|")
        for name in METRIC_NAMES:
            a, b, imp = table[name]
            lines.append(f"| {name} | {a:.2f} | {b:.2f} | {imp:+.2f} |")
        lines.append("")
    lines.append(
        f"aligned-ranks statistic {result.far.statistic:.4f}, "
        f"chi-square p = {result.far.p_value:.4g}; "
        f"permutation p = {result.permutation_p:.4g} ({result.permutation_method}); "
        f"Finner-adjusted = {result.finner_adjusted[0]:.4g}; "
        f"significant at alpha = {result.alpha}: {result.significant}"
    )
    report = "\n".join(lines)
    print(report)

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "comparison.md"), "w") as fh:
            fh.write(report + "\n")
        payload = {
            "n_pairs": result.n_pairs,
            "per_trajectory": {
                scope: {m: list(v) for m, v in table.items()}
                for scope, table in result.per_trajectory.items()
            },
            "overall": {m: list(v) for m, v in result.overall.items()},
            "far_statistic": result.far.statistic,
            "far_p_value": result.far.p_value,
            "far_degenerate": result.far.degenerate,
            "permutation_p": result.permutation_p,
            "permutation_method": result.permutation_method,
            "finner_adjusted": result.finner_adjusted,
            "alpha": result.alpha,
            "significant": result.significant,
        }
        with open(os.path.join(args.out, "comparison.json"), "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    conf = _load_config(args)
    if args.param not in cfg.SCHEMA:
        raise ConfigError(f"unknown sweep key {args.param!r}")
    raw_values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not raw_values:
        raise ConfigError("sweep needs at least one value")
    os.makedirs(args.out, exist_ok=True)

    rows = []
    for raw in raw_values:
        point = conf.with_overrides({args.param: cfg._parse_value(args.param, raw)})
        findings = validate_gains(point.gains())
        if findings:
            for line in findings:
                print(f"INFEASIBLE at {args.param} = {raw}: {line}")
            return EXIT_INFEASIBLE
        point_dir = os.path.join(args.out, f"{args.param.replace('.', '_')}={raw}")
        os.makedirs(point_dir, exist_ok=True)
        jobs = _job_list(point, point_dir)
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                list(pool.map(_execute_job, jobs))
        else:
            for job in jobs:
                _execute_job(job)
        records = _load_run_dir(point_dir)
        by_controller: dict[str, list[float]] = {}
        for record in records:
            by_controller.setdefault(record.meta["controller"], []).append(
                summarize_record(record).mean_dis_cm
            )
        row = {"value": raw}
        for name, vals in sorted(by_controller.items()):
            row[f"mean_dis_cm[{name}]"] = sum(vals) / len(vals)
        rows.append(row)

    header = ["value"] + sorted(k for k in rows[0] if k != "value")
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(
                row["value"] if name == "value" else "%.9g" % row[name]
                for name in header
            )
        )
    sweep_csv = os.path.join(args.out, "sweep.csv")
    with open(sweep_csv, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"wrote {sweep_csv}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    handlers = {
        "validate": cmd_validate,
        "run": cmd_run,
        "compare": cmd_compare,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[args.command](args)
    except InfeasibleGains as exc:
        print(f"INFEASIBLE: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, MismatchedRuns) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SkidtrackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
