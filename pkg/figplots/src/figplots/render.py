"""Render line-grid figures from availability-sweep and gap-profile CSV files.

This package is a pure consumer: it never recomputes model quantities.  Every
point that ends up on an axis is a value read verbatim from the input CSV.
Rows are split into one image per scheduling variant, panels within an image
by a grouping key, and lines within a panel by a second key.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SWEEP_HEADER = ("lambda", "mu", "B", "variant", "C", "gamma", "gamma_product", "effective_gamma")
GAP_HEADER = ("lambda", "mu", "variant", "B", "C", "gap")

# value column plotted on the y axis for each recognized schema
VALUE_COLUMN = {SWEEP_HEADER: "gamma", GAP_HEADER: "gap"}

IMAGE_SUFFIXES = (".png", ".svg")


@dataclass(frozen=True)
class FigureSpec:
    """One rendering job.

    input_csv / output_image are paths; the image suffix picks the format.
    panel_key groups rows into side-by-side panels and line_key groups rows
    within a panel into lines.  Keys name CSV columns, except the derived
    key "mu_over_lambda" which is computed per row as mu / lambda.
    log_scale switches the y axis to logarithmic.
    """

    input_csv: str
    output_image: str
    panel_key: str = "mu_over_lambda"
    line_key: str = "lambda"
    log_scale: bool = False


@dataclass
class RenderResult:
    """What was drawn, read back from the matplotlib line objects."""

    images: dict[str, dict[tuple[str, str], tuple[np.ndarray, np.ndarray]]] = field(default_factory=dict)
    value_column: str = ""
    x_column: str = "B"


def read_table(path: str | Path) -> tuple[tuple[str, ...], list[dict[str, float | str]]]:
    """Read a CSV into (header, rows); numeric cells become floats."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise ValueError(f"{path}: empty file, no header row") from None
        rows = []
        for raw in reader:
            if len(raw) != len(header):
                raise ValueError(f"{path}: row has {len(raw)} cells, header has {len(header)}")
            row: dict[str, float | str] = {}
            for name, cell in zip(header, raw):
                if name == "variant":
                    row[name] = cell
                else:
                    row[name] = float(cell)
            rows.append(row)
    return header, rows


def _resolve_key(key: str, header: tuple[str, ...], rows: list[dict]) -> None:
    """Attach derived columns in place; reject keys that resolve to nothing."""
    if key == "mu_over_lambda":
        for row in rows:
            lam = row["lambda"]
            # grid ratios like 0.05 survive rounding; avoids float-noise group splits
            row[key] = round(row["mu"] / lam, 12) if lam else math.inf
        return
    if key not in header:
        raise ValueError(f"unknown grouping key {key!r}; columns are {list(header)}")


def _variant_path(output_image: str | Path, variant: str) -> Path:
    out = Path(output_image)
    if out.suffix.lower() not in IMAGE_SUFFIXES:
        raise ValueError(f"output image must end in one of {IMAGE_SUFFIXES}, got {out.suffix!r}")
    return out.with_name(f"{out.stem}_{variant}{out.suffix}")


def render(spec: FigureSpec) -> RenderResult:
    """Draw one image per variant in the CSV and return the plotted arrays.

    The returned RenderResult maps each written image path to a dict keyed by
    (panel label, line label) whose values are the x and y arrays pulled back
    out of the figure via Axes.get_lines, so callers can verify the plot
    against the CSV without touching the image file.
    """
    header, rows = read_table(spec.input_csv)
    if header not in VALUE_COLUMN:
        raise ValueError(
            f"{spec.input_csv}: unrecognized schema {list(header)}; "
            f"expected {list(SWEEP_HEADER)} or {list(GAP_HEADER)}"
        )
    if not rows:
        raise ValueError(f"{spec.input_csv}: no data rows")
    value_col = VALUE_COLUMN[header]

    _resolve_key(spec.panel_key, header, rows)
    _resolve_key(spec.line_key, header, rows)

    variants = sorted({str(row["variant"]) for row in rows})
    result = RenderResult(value_column=value_col)

    for variant in variants:
        vrows = [row for row in rows if row["variant"] == variant]
        panel_values = sorted({row[spec.panel_key] for row in vrows})
        ncols = min(len(panel_values), 3)
        nrows_fig = math.ceil(len(panel_values) / ncols)
        fig, axes = plt.subplots(
            nrows_fig, ncols, figsize=(4.2 * ncols, 3.4 * nrows_fig), squeeze=False
        )
        flat_axes = axes.ravel()
        plotted: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]] = {}

        for ax, pval in zip(flat_axes, panel_values):
            panel_label = f"{spec.panel_key}={pval:g}"
            prows = [row for row in vrows if row[spec.panel_key] == pval]
            line_values = sorted({row[spec.line_key] for row in prows})
            for lval in line_values:
                pts = sorted(
                    ((row["B"], row[value_col]) for row in prows if row[spec.line_key] == lval)
                )
                xs = np.array([p[0] for p in pts], dtype=float)
                ys = np.array([p[1] for p in pts], dtype=float)
                ax.plot(xs, ys, marker="o", markersize=3, label=f"{spec.line_key}={lval:g}")
            ax.set_xlabel("B")
            ax.set_ylabel(value_col)
            ax.set_title(f"{variant}, {panel_label}")
            if spec.log_scale:
                ax.set_yscale("log")
            ax.legend(fontsize=8)
            # read the data back out of the artists rather than trusting our inputs
            for line in ax.get_lines():
                key = (panel_label, line.get_label())
                plotted[key] = (np.asarray(line.get_xdata(), dtype=float),
                                np.asarray(line.get_ydata(), dtype=float))

        for ax in flat_axes[len(panel_values):]:
            ax.set_visible(False)

        out_path = _variant_path(spec.output_image, variant)
        fig.tight_layout()
        fig.savefig(out_path)
        plt.close(fig)
        result.images[str(out_path)] = plotted

    return result


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="figplots", description="Render figures from sweep or gap CSV files."
    )
    parser.add_argument("--input", required=True, help="input CSV path")
    parser.add_argument("--output", required=True, help="output image path (.png or .svg)")
    parser.add_argument("--panel-key", default="mu_over_lambda")
    parser.add_argument("--line-key", default="lambda")
    parser.add_argument("--log-scale", action="store_true")
    args = parser.parse_args(argv)

    spec = FigureSpec(
        input_csv=args.input,
        output_image=args.output,
        panel_key=args.panel_key,
        line_key=args.line_key,
        log_scale=args.log_scale,
    )
    try:
        result = render(spec)
    except (ValueError, OSError) as exc:
        print(f"figplots: {exc}", file=sys.stderr)
        return 2
    for path in result.images:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
