"""CSV and SVG report artifacts.

Numeric report columns use 17 significant digits; missing ratios are empty
cells.
"""

from __future__ import annotations

import csv
import math

import numpy as np

from . import svg
from .errors import InputError

SWEEP_COLUMNS = ("threshold", "far", "ts", "sensitivity", "specificity",
                 "hits", "false_alarms", "misses", "correct_rejections")


def fmt(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    return format(v, ".17g")


def write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def read_columns(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = {h: [] for h in header}
        for rec in reader:
            for h, v in zip(header, rec):
                cols[h].append(v)
    return cols


def write_probs(path, probs):
    write_rows(path, ("prob",), ([None if np.isnan(p) else float(p)] for p in probs))


def read_probs(path):
    cols = read_columns(path)
    if "prob" not in cols:
        raise InputError(f"{path}: expected a 'prob' column")
    out = []
    for i, v in enumerate(cols["prob"], start=1):
        try:
            out.append(float(v) if v.strip() else np.nan)
        except ValueError:
            raise InputError(f"{path}: row {i}: cannot parse {v!r} as a probability") from None
    return np.array(out)


CONFUSION_COLUMNS = ("threshold", "hits", "false_alarms", "misses", "correct_rejections",
                     "far", "ts", "sensitivity", "specificity")


def write_sweep(path, sweep):
    write_rows(path, SWEEP_COLUMNS, (
        (p.threshold, p.far, p.ts, p.sensitivity, p.specificity, p.confusion.hits,
         p.confusion.false_alarms, p.confusion.misses, p.confusion.correct_rejections)
        for p in sweep.points))


def write_roc(path, curve):
    write_rows(path, ("one_minus_specificity", "sensitivity"), curve.points)


def write_densities(path, dens_pos, dens_neg):
    rows = [(1, g, v) for g, v in zip(dens_pos.grid, dens_pos.values)]
    rows += [(0, g, v) for g, v in zip(dens_neg.grid, dens_neg.values)]
    write_rows(path, ("class", "grid", "value"), rows)


def write_histograms(path, tri):
    rows = []
    for cls, counts in ((1, tri.positive), (0, tri.negative)):
        for (lo, hi), c in zip(tri.bins, counts):
            rows.append((cls, lo, hi, c))
    write_rows(path, ("class", "bin_low", "bin_high", "count"), rows)


def write_compare(path, table):
    write_rows(path, ("threshold", "far_a", "ts_a", "far_b", "ts_b"), table.rows())


def write_svg(path, chart):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svg.render(chart))


def density_chart(dens_pos, dens_neg, title="Densities of the predicted probabilities"):
    return svg.Chart(title, "probability", "density", series=[
        svg.Series("non-convective (0)", dens_neg.grid.tolist(), dens_neg.values.tolist(), "#000000"),
        svg.Series("convective (1)", dens_pos.grid.tolist(), dens_pos.values.tolist(), "#d62728", "5,4"),
    ])


def threshold_chart(sweep):
    return svg.Chart("FAR and TS as a function of the threshold", "threshold", "score",
                     series=[svg.Series("FAR", sweep.thresholds.tolist(), sweep.column("far").tolist()),
                             svg.Series("TS", sweep.thresholds.tolist(), sweep.column("ts").tolist())],
                     xlim=(0.0, 1.0), ylim=(0.0, 1.0))


def tsfar_chart(curves, marks, title="FAR as a function of TS"):
    """``curves``: list of (label, sweep); ``marks``: list of (label, SweepPoint or None)."""
    series = [svg.Series(lbl, sw.column("ts").tolist(), sw.column("far").tolist()) for lbl, sw in curves]
    markers = []
    for i, (lbl, pt) in enumerate(marks):
        if pt is not None and pt.ts is not None and pt.far is not None:
            markers.append(svg.Marker(pt.ts, pt.far, f"{lbl} tau={pt.threshold:.3g}",
                                      svg.PALETTE[i % len(svg.PALETTE)]))
    return svg.Chart(title, "TS", "FAR", series=series, markers=markers, xlim=(0.0, 1.0), ylim=(0.0, 1.0))


def roc_chart(curves):
    series = [svg.Series(f"{lbl} (AUC={c.auc:.3f})", c.one_minus_specificity.tolist(), c.sensitivity.tolist())
              for lbl, c in curves]
    series.append(svg.Series("chance", [0.0, 1.0], [0.0, 1.0], "#888888", "3,3"))
    return svg.Chart("ROC curve", "1 - specificity", "sensitivity", series=series,
                     xlim=(0.0, 1.0), ylim=(0.0, 1.0))


def oob_chart(curve):
    t = [c[0] for c in curve]
    e = [c[1] for c in curve]
    return svg.Chart("Out-of-bag error as a function of the number of trees", "number of trees",
                     "OOB error", series=[svg.Series("OOB error", t, e)])
