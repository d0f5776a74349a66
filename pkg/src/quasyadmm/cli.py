"""Command-line entry point and CSV metrics emission.

Usage:
    quasyadmm run --config run.toml [--seed N] [--mode quantized|exact|refined] [--out path]
    quasyadmm sweep --config run.toml --deltas 1/100,1/1000

Each run writes one CSV row per iteration with the header
``k,error,consensus_steps,lagrangian_gap,delta_used``; a sweep additionally
writes a summary CSV with one plateau row per quantization level.  Setting
QUASYADMM_TRACE=1 dumps every simulator delivery to ``<out>.trace.csv``.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import statistics
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import admm
from .config import ConfigError, RunConfig, load_config
from .quant import parse_rational

CSV_HEADER = "k,error,consensus_steps,lagrangian_gap,delta_used"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def records_to_csv(records: Sequence[admm.IterationRecord], path: str | Path) -> Path:
    path = Path(path)
    lines = [CSV_HEADER]
    for rec in records:
        gap = "" if rec.lagrangian_gap is None else repr(rec.lagrangian_gap)
        lines.append(
            f"{rec.k},{rec.error!r},{rec.consensus_steps},{gap},{rec.delta_used}"
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def records_from_csv(path: str | Path) -> list[admm.IterationRecord]:
    lines = Path(path).read_text().strip().split("\n")
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: unexpected CSV header {lines[0] if lines else ''!r}")
    records = []
    for line in lines[1:]:
        k, error, steps, gap, delta = line.split(",")
        records.append(
            admm.IterationRecord(
                k=int(k),
                error=float(error),
                consensus_steps=int(steps),
                lagrangian_gap=None if gap == "" else float(gap),
                delta_used=Fraction(delta),
            )
        )
    return records


def plateau_level(records: Sequence[admm.IterationRecord]) -> float:
    """Median error over the last 20% of iterations (robust to oscillation)."""
    tail = max(1, len(records) // 5)
    return float(statistics.median(rec.error for rec in records[-tail:]))


@contextlib.contextmanager
def _trace_sink(out_path: Path):
    if os.environ.get("QUASYADMM_TRACE") != "1":
        yield None
        return
    trace_path = out_path.with_name(out_path.name + ".trace.csv")
    with open(trace_path, "w") as fh:
        fh.write("eta,sender,receiver,kind,value\n")

        def trace(eta, sender, receiver, kind, value):
            fh.write(f"{eta},{sender},{receiver},{kind},{value}\n")

        yield trace


def run_experiment(config: RunConfig) -> Path:
    """Run one configuration and write its per-iteration CSV."""
    out_path = Path(config.out)
    with _trace_sink(out_path) as trace:
        result = admm.run(config, trace=trace)
    return records_to_csv(result.records, out_path)


def sweep(config: RunConfig, deltas: Sequence[Fraction]) -> tuple[list[Path], Path]:
    """Run the base config once per quantization level; summarize plateaus."""
    if len(deltas) < 2:
        raise ConfigError(f"sweep needs at least 2 deltas, got {len(deltas)}")
    base = Path(config.out)
    stem, suffix = base.stem, base.suffix or ".csv"
    paths = []
    summary_lines = ["delta,plateau"]
    for delta in deltas:
        out = base.with_name(f"{stem}_delta_{delta.numerator}_{delta.denominator}{suffix}")
        cfg = config.with_overrides(delta=Fraction(delta), out=str(out))
        path = run_experiment(cfg)
        plateau = plateau_level(records_from_csv(path))
        summary_lines.append(f"{delta},{plateau!r}")
        paths.append(path)
    summary = base.with_name(f"{stem}_summary{suffix}")
    summary.write_text("\n".join(summary_lines) + "\n")
    return paths, summary


def _parse_deltas(text: str) -> list[Fraction]:
    try:
        return [parse_rational(chunk) for chunk in text.split(",") if chunk.strip()]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasyadmm",
        description="Asynchronous distributed ADMM with quantized communication",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment and write its CSV")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--mode", choices=("quantized", "exact", "refined"), default=None)
    p_run.add_argument("--out", default=None)

    p_sweep = sub.add_parser("sweep", help="run the config once per quantization level")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--deltas", required=True,
                         help="comma-separated rationals, e.g. 1/100,1/1000")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--mode", choices=("quantized", "exact", "refined"), default=None)
    p_sweep.add_argument("--out", default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        config = config.with_overrides(seed=args.seed, mode=args.mode, out=args.out)
        if args.command == "run":
            path = run_experiment(config)
            print(path)
        else:
            deltas = _parse_deltas(args.deltas)
            if len(deltas) < 2:
                raise ConfigError("sweep needs at least 2 deltas")
            paths, summary = sweep(config, deltas)
            for p in paths:
                print(p)
            print(summary)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
