"""Turn deltagauss sweep/evolve CSVs into figures.

The renderer computes nothing: it trusts the CSV columns, which must match
the producing command's contract exactly (a mismatch is a hard error that
names the offending columns).  Modes:

  fig1     columns A,B,T,abs_err        -> one T(B) curve per A value
  fig2     columns A,B,T,T_apr,ratio    -> one ratio(B) curve per A value,
                                           plus a reference line at ratio = 1
  density  columns x,re_psi,im_psi,density -> density vs x
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

COLUMN_CONTRACTS = {
    "fig1": ["A", "B", "T", "abs_err"],
    "fig2": ["A", "B", "T", "T_apr", "ratio"],
    "density": ["x", "re_psi", "im_psi", "density"],
}


class SchemaError(ValueError):
    """The CSV does not match the column contract of the requested mode."""


@dataclass(frozen=True)
class FigureJob:
    input_csv: Path
    mode: str
    output_image: Path
    log_x: bool = False
    y_limits: tuple | None = None
    vector: bool = False

    def __post_init__(self):
        if self.mode not in COLUMN_CONTRACTS:
            raise SchemaError(
                f"unknown mode {self.mode!r}; expected one of {sorted(COLUMN_CONTRACTS)}"
            )
        object.__setattr__(self, "input_csv", Path(self.input_csv))
        object.__setattr__(self, "output_image", Path(self.output_image))
        if self.y_limits is not None:
            lo, hi = (float(v) for v in self.y_limits)
            if not lo < hi:
                raise SchemaError(f"y limits must satisfy lo < hi, got ({lo}, {hi})")
            object.__setattr__(self, "y_limits", (lo, hi))


def load_table(path: Path, mode: str) -> dict:
    """Read and validate a contract CSV; returns column name -> float array."""
    expected = COLUMN_CONTRACTS[mode]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty, expected header {expected}") from None
        if header != expected:
            raise SchemaError(
                f"{path}: column mismatch for mode {mode!r}: expected {expected}, got {header}"
            )
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows under header {expected}")
    data = np.asarray(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(expected)}


def _series_by_a(table: dict):
    """Split rows into per-A series, preserving first-appearance order."""
    order = []
    for a in table["A"]:
        if a not in order:
            order.append(a)
    for a in order:
        mask = table["A"] == a
        yield a, table["B"][mask], mask


def build_figure(job: FigureJob):
    """Build the matplotlib figure for a job without saving it."""
    table = load_table(job.input_csv, job.mode)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))

    if job.mode == "fig1":
        for a, b, mask in _series_by_a(table):
            ax.plot(b, table["T"][mask], label=f"A={a:g}")
        ax.set_xlabel("B")
        ax.set_ylabel("T")
        ax.legend()
    elif job.mode == "fig2":
        ax.axhline(1.0, color="0.4", linestyle="--", linewidth=1.0)
        for a, b, mask in _series_by_a(table):
            ax.plot(b, table["ratio"][mask], label=f"A={a:g}")
        ax.set_xlabel("B")
        ax.set_ylabel("T / T_apr")
        ax.legend()
    else:
        ax.plot(table["x"], table["density"])
        ax.set_xlabel("x")
        ax.set_ylabel("|psi|^2")

    if job.log_x:
        ax.set_xscale("log")
    if job.y_limits is not None:
        ax.set_ylim(*job.y_limits)
    fig.tight_layout()
    return fig


def render(job: FigureJob) -> Path:
    """Render the job and write the image file (PNG, or SVG when vector)."""
    fig = build_figure(job)
    try:
        fig.savefig(job.output_image, format="svg" if job.vector else "png", dpi=150)
    finally:
        plt.close(fig)
    return job.output_image
