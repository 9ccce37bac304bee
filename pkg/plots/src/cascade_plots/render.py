"""Render cascade-lab CSV outputs into figures.

Three kinds:
  sweep    mean wrong count vs q (log x), one series per n, CI bands;
           the q = 0 row becomes a dashed reference level per series.
  compare  one bar per topology/strategy row with CI whiskers.
  scaling  loss vs ln n for every input series, with the reference curve
           min((1-p) log_{p/(1-p)} n / 2, sqrt(n)/2) overlaid.

The script never recomputes statistics: it draws exactly the numbers in the
CSVs.  Rendering is deterministic (fixed style, pinned PNG metadata) so
output images are diffable.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

KINDS = ("sweep", "compare", "scaling")

REQUIRED = {
    "sweep": ["n", "q", "mean_wrong", "ci95"],
    "compare": ["topology", "strategy", "n", "p", "mean_wrong", "ci95"],
    "scaling": ["n", "p"],  # plus one recognized loss column, checked separately
}
LOSS_COLUMNS = ("loss", "expected_wrong", "mean_wrong")

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "cascade-plots",
}
_METADATA = {"Software": "cascade-plots"}


class SchemaError(ValueError):
    """Input CSV does not carry the expected columns."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise SchemaError("at least one input CSV is required")


def _read_rows(path: str, kind: str) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in REQUIRED[kind] if col not in header]
        if missing:
            raise SchemaError(f"{path}: missing column {missing[0]!r} (header: {','.join(header)})")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    if kind == "scaling" and not any(c in header for c in LOSS_COLUMNS):
        raise SchemaError(f"{path}: missing column 'loss' (or one of {LOSS_COLUMNS})")
    return rows


def _save(fig, output: str) -> None:
    Path(output).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, metadata=_METADATA)
    plt.close(fig)


def render(spec: FigureSpec) -> dict:
    """Draw the figure; returns a structural summary used by tests and the CLI."""
    with plt.rc_context(_STYLE):
        if spec.kind == "sweep":
            return _render_sweep(spec)
        if spec.kind == "compare":
            return _render_compare(spec)
        return _render_scaling(spec)


def _render_sweep(spec: FigureSpec) -> dict:
    series: dict[int, list[tuple[float, float, float]]] = {}
    for path in spec.inputs:
        for row in _read_rows(path, "sweep"):
            series.setdefault(int(row["n"]), []).append(
                (float(row["q"]), float(row["mean_wrong"]), float(row["ci95"]))
            )
    fig, ax = plt.subplots()
    points = 0
    for n in sorted(series):
        rows = sorted(series[n])
        points = max(points, len(rows))
        qs = [q for q, _, _ in rows if q > 0]
        means = [m for q, m, _ in rows if q > 0]
        halfs = [h for q, _, h in rows if q > 0]
        (line,) = ax.plot(qs, means, marker="o", markersize=3, label=f"n = {n}")
        ax.fill_between(qs, [m - h for m, h in zip(means, halfs)], [m + h for m, h in zip(means, halfs)], alpha=0.2)
        zero = [m for q, m, _ in rows if q == 0]
        if zero:
            ax.axhline(zero[0], linestyle="--", linewidth=0.8, color=line.get_color())
    ax.set_xscale("log")
    ax.set_xlabel("connection probability q")
    ax.set_ylabel("expected wrong decisions")
    ax.legend()
    _save(fig, spec.output)
    return {"kind": "sweep", "series": len(series), "points_per_series": points}


def _render_compare(spec: FigureSpec) -> dict:
    labels, means, halfs = [], [], []
    for path in spec.inputs:
        for row in _read_rows(path, "compare"):
            labels.append(f"{row['topology']}\n{row['strategy']}")
            means.append(float(row["mean_wrong"]))
            halfs.append(float(row["ci95"]))
    fig, ax = plt.subplots()
    xs = range(len(labels))
    ax.bar(xs, means, yerr=halfs, capsize=3, color=plt.cm.tab10.colors[: len(labels)] if len(labels) <= 10 else None)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, fontsize=7)
    ax.set_ylabel("expected wrong decisions")
    _save(fig, spec.output)
    return {"kind": "compare", "bars": len(labels)}


def _reference_curve(n: float, p: float) -> float:
    return min((1.0 - p) * math.log(n) / math.log(p / (1.0 - p)) / 2.0, math.sqrt(n) / 2.0)


def _render_scaling(spec: FigureSpec) -> dict:
    fig, ax = plt.subplots()
    series = 0
    p_seen: list[float] = []
    all_n: list[float] = []
    for path in spec.inputs:
        rows = _read_rows(path, "scaling")
        col = next(c for c in LOSS_COLUMNS if c in rows[0])
        pts = sorted((float(r["n"]), float(r[col])) for r in rows)
        ax.plot([math.log(n) for n, _ in pts], [v for _, v in pts], marker="o", markersize=3, label=Path(path).stem)
        series += 1
        p_seen.extend(float(r["p"]) for r in rows)
        all_n.extend(n for n, _ in pts)
    p_ref = p_seen[0]
    lo, hi = math.log(min(all_n)), math.log(max(all_n))
    grid = [lo + (hi - lo) * k / 63 for k in range(64)]
    ax.plot(grid, [_reference_curve(math.exp(x), p_ref) for x in grid], linestyle=":", color="black",
            label=f"min((1-p)·log_r n/2, √n/2), p={p_ref:g}")
    ax.set_xlabel("ln n")
    ax.set_ylabel("expected wrong decisions")
    ax.legend(fontsize=7)
    _save(fig, spec.output)
    return {"kind": "scaling", "series": series}
