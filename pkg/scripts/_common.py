"""Shared bits for the experiment scripts: argument parsing and CSV/plot output."""

from __future__ import annotations

import argparse
import csv
import sys


def parser(description: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--plot", help="also save a figure to this path (needs matplotlib)")
    return p


def write_csv(path: str | None, header: list[str], rows) -> None:
    fh = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format(v, ".10g") if isinstance(v, float) else v for v in row])
    finally:
        if path:
            fh.close()


def pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt
