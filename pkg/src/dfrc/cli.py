"""Command line entry point: ``dfrc run|sweep|report``."""

from __future__ import annotations

import argparse
import sys
from collections import defaultdict
from pathlib import Path

from . import cost
from .config import ExperimentConfig
from .errors import DFRCError
from .harness import FAILURES_FILE, RESULTS_FILE, best_of_sweep, read_rows, run_experiment


def _execute(args, sweep: bool) -> int:
    cfg = ExperimentConfig.load(args.config).with_overrides(args.seed, args.out_dir)
    rows = run_experiment(cfg, sweep=sweep, jobs=args.jobs)
    failed = sum(not r.ok for r in rows)
    print(f"{len(rows) - failed} rows -> {cfg.out_dir / RESULTS_FILE}")
    if failed:
        print(f"{failed} failed grid points -> {cfg.out_dir / FAILURES_FILE}")
    return 0


def _report(args) -> int:
    rows = read_rows(args.results)
    if not rows:
        print("no rows")
        return 1
    groups = defaultdict(list)
    for r in rows:
        groups[(r.task, r.node_kind, r.snr_db)].append(r)
    print(f"{'task':<11} {'node':<13} {'snr_db':>6} {'rows':>5} {'best N':>7} {'tau_ph_ps':>9} "
          f"{'test':>10} {'train_s':>11} {'power_mw':>9}")
    for (task, kind, snr), grp in sorted(groups.items(), key=lambda kv: tuple(str(x) for x in kv[0])):
        b = best_of_sweep(grp)
        print(f"{task:<11} {kind:<13} {'' if snr is None else f'{snr:g}':>6} {len(grp):>5} {b.N:>7} "
              f"{'' if b.tau_ph_ps is None else f'{b.tau_ph_ps:g}':>9} {b.test_metric:>10.4f} "
              f"{b.train_time_s_model:>11.4g} {'' if b.power_mw is None else f'{b.power_mw:.2f}':>9}")
    if args.costs:
        print()
        print("state-collection time per 1000 training samples (loop delay x samples):")
        base = cost.LOOP_DELAY_S["silicon_mr"]
        for kind, tau in cost.LOOP_DELAY_S.items():
            t = cost.training_time(cost.TimingParams(tau, 1000))["state_collection_s"]
            print(f"  {kind:<13} tau={tau:.3g} s  collect={t:.4g} s  ratio vs silicon_mr={tau / base:.4g}")
        for name in ("silicon_mr_calibrated", "all_optical_mzi"):
            b = cost.total_power_mw(cost.preset(name))
            ref = b.get("reference_total_mw")
            print(f"  power {name:<22} laser={b['laser_dbm']:.2f} dBm total={b['total_mw']:.2f} mW"
                  + (f" (reference {ref} mW)" if ref is not None else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfrc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "evaluate the single configured point for each seed"),
                        ("sweep", "evaluate the full N x tau_ph x SNR x seed grid")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", type=Path)
        p.add_argument("--seed", type=int, default=None, help="override the seed list with one seed")
        p.add_argument("--out-dir", type=Path, default=None)
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p = sub.add_parser("report", help="summarize a results CSV")
    p.add_argument("results", type=Path)
    p.add_argument("--costs", action="store_true", help="also print timing and power models")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            return _report(args)
        return _execute(args, sweep=args.command == "sweep")
    except (DFRCError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
