"""Command-line sweeps over (n, alpha, gamma) writing figure-ready CSV.

Exit status: 0 success, 1 I/O failure, 2 invalid configuration,
3 simulation aborted.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from ._backend import BACKEND
from .config import SweepSpec, build_spec, dump_settings, parse_text
from .errors import ParseError, SimulationAbort, ValidationError
from .sim import MECHANISMS, run_experiment

log = logging.getLogger("wptrelay")

OUTPUT_DIR_ENV = "WPTRELAY_OUTPUT_DIR"
CSV_COLUMNS = ("n", "alpha", "gamma", "mechanism", "outage_prob", "mean_power_cond_w",
               "mean_power_uncond_w", "mean_harvested_w", "mean_surplus_w", "trials", "seed")

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_ABORT = 0, 1, 2, 3


def _power(x: float) -> str:
    return f"{x:.8e}"


def _prob(x: float) -> str:
    return f"{x:.9g}"


def manifest_path(output_path: str) -> Path:
    return Path(output_path + ".manifest")


def selection_path(output_path: str) -> Path:
    p = Path(output_path)
    return p.with_name(f"{p.stem}_selection{p.suffix or '.csv'}")


def compute_rows(spec: SweepSpec, quiet: bool = True):
    """Run every cell; return ``(main_rows, selection_rows)`` as lists of lists."""
    rows, sel_rows = [], []
    cells = spec.cells
    for idx, (n, alpha, gamma) in enumerate(cells, start=1):
        config = spec.config_for(n, alpha, gamma)
        metrics = run_experiment(config)
        if not quiet:
            log.info("cell %d/%d n=%d alpha=%g gamma=%g: myerson outage %.4f",
                     idx, len(cells), n, alpha, gamma, metrics["myerson"].outage_prob)
        for mech in MECHANISMS:
            m = metrics[mech]
            rows.append([str(n), f"{alpha:g}", f"{gamma:g}", mech, _prob(m.outage_prob),
                         _power(m.mean_source_power_cond), _power(m.mean_source_power_uncond),
                         _power(m.mean_harvested), _power(m.mean_surplus),
                         str(metrics.trial_count), str(config.seed)])
            if spec.mode == "selection-freq":
                sel_rows.append([str(n), f"{alpha:g}", f"{gamma:g}", mech]
                                + [_prob(f) for f in m.selection_freq]
                                + [str(metrics.trial_count), str(config.seed)])
    return rows, sel_rows


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_outputs(spec: SweepSpec, rows, sel_rows) -> None:
    out = Path(spec.output_path)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True)
    out.write_text(_csv_text(CSV_COLUMNS, rows), encoding="utf-8")
    if spec.mode == "selection-freq":
        k = spec.base.n_candidates
        header = ["n", "alpha", "gamma", "mechanism"] + [f"freq_{i + 1}" for i in range(k)] \
            + ["trials", "seed"]
        selection_path(spec.output_path).write_text(_csv_text(header, sel_rows), encoding="utf-8")
    manifest = (f"# wptrelay {__version__} run manifest; kernels: {BACKEND}\n"
                f"# reload with: wptrelay --config {manifest_path(spec.output_path).name}\n"
                "# vickrey rows use the source's own cost min(p_s, p_max) as reserve price\n"
                + dump_settings(spec))
    manifest_path(spec.output_path).write_text(manifest, encoding="utf-8")


def run_sweep(spec: SweepSpec, quiet: bool = True) -> int:
    """Run the sweep and write the CSV(s) plus manifest; return the exit status."""
    try:
        rows, sel_rows = compute_rows(spec, quiet)
    except SimulationAbort as exc:
        log.error("simulation aborted: %s", exc)
        return EXIT_ABORT
    try:
        write_outputs(spec, rows, sel_rows)
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wptrelay", description="Monte Carlo sweeps of WPT-incentivised relay auctions.")
    p.add_argument("--config", metavar="PATH", help="flat key = value config file")
    p.add_argument("--out", metavar="PATH", help="output CSV path")
    p.add_argument("--trials", type=int, metavar="N", help="override sim.n_trials")
    p.add_argument("--seed", type=int, metavar="N", help="override sim.seed")
    p.add_argument("--mode", choices=("sweep", "selection-freq"), help="override run.mode")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        given = {}
        if args.config:
            given = parse_text(Path(args.config).read_text(encoding="utf-8"))
        if args.trials is not None:
            given["sim.n_trials"] = args.trials
        if args.seed is not None:
            given["sim.seed"] = args.seed
        if args.mode is not None:
            given["run.mode"] = args.mode
        if args.out is not None:
            given["output.path"] = args.out
        elif "output.path" not in given and os.environ.get(OUTPUT_DIR_ENV):
            given["output.path"] = str(Path(os.environ[OUTPUT_DIR_ENV]) / "results.csv")
        spec = build_spec(given)
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_IO
    except (ParseError, ValidationError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_INVALID
    if not args.quiet:
        log.info("%d cells x %d trials (kernels: %s) -> %s",
                 len(spec.cells), spec.base.n_trials, BACKEND, spec.output_path)
    return run_sweep(spec, quiet=args.quiet)


if __name__ == "__main__":
    sys.exit(main())
