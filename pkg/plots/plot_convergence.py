#!/usr/bin/env python3
"""Render convergence figures from experiment CSVs.

Usage:
    plot_convergence.py --out fig2.png curve1.csv:label1 curve2.csv:label2 ...

Each curve argument is a CSV path with an optional ':label' suffix (default:
the file stem).  The CSVs must carry the experiment schema
``k,error,consensus_steps,lagrangian_gap,delta_used``.  The figure plots
error against iteration on a log y-axis, one labeled curve per file, and a
JSON sidecar next to the image records every plotted series plus its plateau
(median error over the last 20% of iterations) for downstream checks.
Inputs are never modified.
"""

import argparse
import csv
import json
import statistics
import sys
from pathlib import Path

EXPECTED_HEADER = ["k", "error", "consensus_steps", "lagrangian_gap", "delta_used"]


class CurveError(Exception):
    pass


def parse_curve_arg(arg):
    path, sep, label = arg.rpartition(":")
    if not sep:
        path, label = arg, ""
    if not label:
        label = Path(path if path else arg).stem
    if not path:
        path = arg
    return Path(path), label


def load_curve(path, label):
    if not path.exists():
        raise CurveError(f"{path}: no such file")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CurveError(f"{path}: empty CSV") from None
        if header != EXPECTED_HEADER:
            raise CurveError(f"{path}: unexpected header {header!r}")
        ks, errors = [], []
        for row in reader:
            if not row:
                continue
            ks.append(int(row[0]))
            errors.append(float(row[1]))
    if not ks:
        raise CurveError(f"{path}: no data rows")
    tail = max(1, len(errors) // 5)
    return {
        "label": label,
        "csv": str(path),
        "k": ks,
        "error": errors,
        "plateau": statistics.median(errors[-tail:]),
    }


def render(curves, out_image):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.5, 5.0))
    for curve in curves:
        ax.plot(curve["k"], curve["error"], label=curve["label"], linewidth=1.2)
    ax.set_yscale("log")
    ax.set_xlabel("iteration k")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_image)
    plt.close(fig)

    sidecar = Path(out_image).with_suffix(".json")
    sidecar.write_text(json.dumps({"image": str(out_image), "curves": curves}, indent=1))
    return sidecar


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument("curves", nargs="+", metavar="CSV[:LABEL]")
    args = parser.parse_args(argv)
    try:
        curves = [load_curve(*parse_curve_arg(arg)) for arg in args.curves]
        sidecar = render(curves, args.out)
    except CurveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.out}\n{sidecar}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
