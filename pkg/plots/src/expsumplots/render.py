"""Render figures from expsumlab experiment CSVs.

Three batch plot kinds, one per documented CSV schema:

- exponent-ladder: log-log scatter of |S| against X from the experiments
  schema, with a least-squares fit recomputed here (closed-form normal
  equations, independent of the producer) and reference slopes drawn as
  guide lines.  When a fit CSV from `expsumlab exp fit` is supplied, the
  recomputed slope must match it to 1e-6.
- discrepancy: per-residue arithmetic-progression discrepancies.
- ratio-histogram: histogram of pair-correlation ratios with an optional
  vertical marker (e.g. a calibrated ceiling); the marker value always
  comes from the caller, never from constants baked in here.

The primary library is consumed only through its file formats; this module
reads CSV and writes images.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


class SchemaMismatch(Exception):
    """Input CSV does not carry the columns the plot kind needs."""


class FitMismatch(Exception):
    """Recomputed slope disagrees with the producer's fit output."""


PLOT_KINDS = ("exponent-ladder", "discrepancy", "ratio-histogram")

FIT_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    kind: str
    output_image: str
    reference_slopes: tuple[float, ...] = ()
    fit_csv: str | None = None
    reference_line: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in PLOT_KINDS:
            raise SchemaMismatch(f"unknown plot kind {self.kind!r}; expected one of {PLOT_KINDS}")


@dataclass(frozen=True)
class RenderResult:
    output_image: str
    fitted_slope: float | None
    annotations: tuple[str, ...]


def _read_rows(path: str, required: tuple[str, ...]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaMismatch(f"{path}: empty CSV, no header row")
        for col in required:
            if col not in reader.fieldnames:
                raise SchemaMismatch(f"{path}: missing column '{col}'")
        rows = list(reader)
    if not rows:
        raise SchemaMismatch(f"{path}: no data rows")
    return rows


def least_squares_slope(xs: list[float], ys: list[float]) -> tuple[float, float]:
    """Closed-form simple linear regression (slope, intercept)."""
    n = len(xs)
    if n < 2 or max(xs) == min(xs):
        raise SchemaMismatch("need at least two distinct abscissa values to fit")
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, my - slope * mx


def _read_fit_slope(path: str) -> float:
    rows = _read_rows(path, ("slope",))
    return float(rows[0]["slope"])


def _render_exponent_ladder(spec: PlotSpec, ax) -> tuple[float, list[str]]:
    rows = _read_rows(spec.input_csv, ("X", "abs"))
    xs = [math.log(float(r["X"])) for r in rows]
    ys = [math.log(float(r["abs"])) for r in rows]
    slope, intercept = least_squares_slope(xs, ys)
    if spec.fit_csv is not None:
        expected = _read_fit_slope(spec.fit_csv)
        if abs(slope - expected) > FIT_TOLERANCE:
            raise FitMismatch(
                f"recomputed slope {slope:.9f} differs from fit output {expected:.9f} "
                f"by more than {FIT_TOLERANCE}")
    ax.plot(xs, ys, "o", label="data")
    grid = [min(xs), max(xs)]
    ax.plot(grid, [slope * x + intercept for x in grid], "-",
            label=f"fit slope = {slope:.6f}")
    annotations = [f"slope = {slope:.6f}"]
    for ref in spec.reference_slopes:
        anchor = ys[0] - ref * xs[0]
        ax.plot(grid, [ref * x + anchor for x in grid], "--",
                label=f"reference slope = {ref:g}")
        annotations.append(f"reference slope = {ref:g}")
    ax.set_xlabel("log X")
    ax.set_ylabel("log |S|")
    ax.legend()
    return slope, annotations


def _render_discrepancy(spec: PlotSpec, ax) -> list[str]:
    rows = _read_rows(spec.input_csv, ("kernel_id", "re"))
    labels = []
    values = []
    for i, r in enumerate(rows):
        kid = r["kernel_id"]
        labels.append(int(kid.split(":")[1]) if ":" in kid else i)
        values.append(float(r["re"]))
    ax.plot(labels, values, "-", lw=0.8)
    ax.axhline(0.0, color="gray", lw=0.5)
    ax.set_xlabel("residue class")
    ax.set_ylabel("discrepancy")
    return [f"residues = {len(values)}"]


def _render_ratio_histogram(spec: PlotSpec, ax) -> list[str]:
    rows = _read_rows(spec.input_csv, ("ratio_to_sqrtq",))
    ratios = [float(r["ratio_to_sqrtq"]) for r in rows]
    ax.hist(ratios, bins=max(5, len(ratios) // 10))
    ax.set_xlabel("|sum| / sqrt(q)")
    ax.set_ylabel("count")
    annotations = [f"samples = {len(ratios)}"]
    if spec.reference_line is not None:
        ax.axvline(spec.reference_line, color="red", ls="--",
                   label=f"ceiling = {spec.reference_line:g}")
        ax.legend()
        annotations.append(f"ceiling = {spec.reference_line:g}")
    return annotations


def render(spec: PlotSpec) -> RenderResult:
    """Render one figure; returns the output path and any recomputed slope."""
    fig, ax = plt.subplots(figsize=(7, 5))
    try:
        slope = None
        if spec.kind == "exponent-ladder":
            slope, annotations = _render_exponent_ladder(spec, ax)
        elif spec.kind == "discrepancy":
            annotations = _render_discrepancy(spec, ax)
        else:
            annotations = _render_ratio_histogram(spec, ax)
        ax.set_title(", ".join(annotations))
        fig.tight_layout()
        fig.savefig(spec.output_image, dpi=120)
    finally:
        plt.close(fig)
    return RenderResult(spec.output_image, slope, tuple(annotations))


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="expsumplots",
                                 description="render figures from expsumlab CSVs")
    ap.add_argument("--input", required=True)
    ap.add_argument("--kind", required=True, choices=PLOT_KINDS)
    ap.add_argument("--out", required=True)
    ap.add_argument("--reference-slope", type=float, action="append", default=[])
    ap.add_argument("--fit-csv", default=None)
    ap.add_argument("--reference-line", type=float, default=None)
    args = ap.parse_args(argv)
    try:
        result = render(PlotSpec(args.input, args.kind, args.out,
                                 tuple(args.reference_slope), args.fit_csv,
                                 args.reference_line))
    except (SchemaMismatch, FitMismatch, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.output_image}: {'; '.join(result.annotations)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
