#!/usr/bin/env python3
"""Plot the CSV outputs of a training/harness run.

Usage:
    plot_metrics.py <rundir> [--out <dir>]

Reads metrics.csv / episodes.csv / ablation.csv / length_report.csv when
present. With matplotlib installed, writes PNGs next to the data; otherwise
prints a text summary.
"""

import argparse
import csv
import os
import sys


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("rundir")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    out = args.out or args.rundir

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        plt = None

    metrics = os.path.join(args.rundir, "metrics.csv")
    if os.path.exists(metrics):
        rows = read_csv(metrics)
        for split in ("train", "val"):
            acc = [float(r["accuracy"]) for r in rows if r["split"] == split]
            if plt:
                plt.plot(acc, label=split)
            else:
                tail = acc[-1] if acc else float("nan")
                print(f"{split}: {len(acc)} epochs, final accuracy {tail:.4f}")
        if plt:
            plt.xlabel("epoch")
            plt.ylabel("accuracy")
            plt.legend()
            plt.savefig(os.path.join(out, "metrics.png"), dpi=120)
            plt.close()
            print("wrote metrics.png")

    for name, xcol, ycols in (
        ("episodes.csv", "episodes", ["accuracy", "macro_f1"]),
        ("length_report.csv", "bucket", ["accuracy"]),
    ):
        path = os.path.join(args.rundir, name)
        if not os.path.exists(path):
            continue
        rows = read_csv(path)
        if plt:
            for y in ycols:
                ys = [float(r[y]) for r in rows if r[y] not in ("na", "")]
                plt.plot(ys, marker="o", label=y)
            plt.xlabel(xcol)
            plt.legend()
            stem = os.path.splitext(name)[0]
            plt.savefig(os.path.join(out, stem + ".png"), dpi=120)
            plt.close()
            print(f"wrote {stem}.png")
        else:
            print(f"{name}: {len(rows)} rows")

    ablation = os.path.join(args.rundir, "ablation.csv")
    if os.path.exists(ablation):
        for r in read_csv(ablation):
            print(f"{r['mode']:<12} acc {float(r['accuracy']):.4f} "
                  f"macro-F1 {float(r['macro_f1']):.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
