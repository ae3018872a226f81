"""Labelled datasets: CSV I/O, class summaries, downsampling and synthetic data.

The on-disk layout is a comma-separated file whose first line is a header and
whose last column, ``cv``, holds the binary label (1 = positive / rare class).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._numeric import expit, round_half_up
from .errors import (
    CalibrationError,
    EmptyMinorityError,
    LabelError,
    ParseError,
    SchemaError,
    StructureError,
    WriteError,
)

LABEL_COLUMN = "cv"

# Temperature group, then morphological group.
APPENDIX_41 = (
    "TsBT.0.0",
    "toTmoyBT.0.0",
    "Tmin.0.30",
    "toTmin.0.0",
    "toTmin.0.15",
    "toTmin.0.30",
    "stTmoyTminBT.0.0",
    "stTmoyTminBT.0.15",
    "stTmoyTminST.0.0",
    "stTmoyTminST.0.15",
    "stTmoyTminST.0.30",
    "stTsTmoyBT.0.0",
    "stTsTmoyBT.0.15",
    "stTsTmoyBT.0.30",
    "stTsTmoyST.0.0",
    "stTsTmoyST.0.15",
    "stTsTmoyST.0.30",
    "Qgp95BT.0.0",
    "Qgp95BT.0.15",
    "Qgp95BT.0.30",
    "Qgp95BT.0.0.15",
    "Qgp95BT.0.15.30",
    "Gsp95ST.0.0.15",
    "Gsp95ST.0.15.30",
    "VtproT.0.0",
    "VtproT.0.0.15",
    "VtproT.0.15.30",
    "RdaBT.0.0",
    "RdaBT.0.15",
    "RdaBT.0.30",
    "RdaBT.0.0.15",
    "RdaBT.0.15.30",
    "SBT.0.0",
    "SBT.0.30",
    "SBT.0.0.15",
    "SBT.0.15.30",
    "SST.0.0",
    "SST.0.15",
    "SST.0.30",
    "SST.0.0.15",
    "SST.0.15.30",
)


@dataclass(frozen=True)
class SchemaDescriptor:
    canonical_names: tuple = APPENDIX_41

    def __post_init__(self):
        if len(self.canonical_names) != 41:
            raise SchemaError("schema must list exactly 41 names")
        if len(set(self.canonical_names)) != 41:
            raise SchemaError("schema names must be distinct")


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """An n x p numeric feature table with 0/1 labels and named columns.

    Arrays are copied and made read-only on construction.  Equality compares
    features, labels and column names exactly; ``provenance`` is informative
    only and does not take part in comparisons.
    """

    features: np.ndarray
    labels: np.ndarray
    column_names: tuple
    provenance: str = ""

    def __post_init__(self):
        X = np.array(self.features, dtype=np.float64)
        y = np.array(self.labels)
        names = tuple(str(c) for c in self.column_names)
        if X.ndim != 2:
            raise StructureError("features must be a 2-D array")
        n, p = X.shape
        if n < 1 or p < 1:
            raise StructureError(f"dataset needs n >= 1 and p >= 1, got {n}x{p}")
        if y.shape != (n,):
            raise StructureError(f"expected {n} labels, got shape {y.shape}")
        if not np.all((y == 0) | (y == 1)):
            bad = int(np.flatnonzero((y != 0) & (y != 1))[0])
            raise LabelError(f"label at row {bad} is not 0 or 1", row=bad)
        if not np.all(np.isfinite(X)):
            r, c = np.argwhere(~np.isfinite(X))[0]
            raise ParseError(f"non-finite value at row {r}, column {names[c] if c < len(names) else c}",
                             row=int(r), column=int(c))
        if len(names) != p:
            raise SchemaError(f"{len(names)} column names for {p} feature columns")
        if len(set(names)) != p:
            raise SchemaError("column names must be distinct")
        if LABEL_COLUMN in names:
            raise SchemaError(f"'{LABEL_COLUMN}' is reserved for the label column")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y.astype(np.int8)))
        object.__setattr__(self, "column_names", names)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def p(self):
        return self.features.shape[1]

    def column(self, name):
        return self.features[:, self.column_names.index(name)]

    def take(self, rows, provenance=None):
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(self.features[rows], self.labels[rows], self.column_names,
                       self.provenance if provenance is None else provenance)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.column_names == other.column_names
                and np.array_equal(self.features, other.features)
                and np.array_equal(self.labels, other.labels))

    __hash__ = None


@dataclass(frozen=True)
class ClassSummary:
    n_pos: int
    n_neg: int
    prevalence: float

    @property
    def n(self):
        return self.n_pos + self.n_neg


@dataclass(frozen=True)
class RebalanceSpec:
    ratio: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.ratio <= 1.0):
            raise ValueError(f"ratio must lie in (0, 1], got {self.ratio}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class SynthSpec:
    n: int
    p: int
    true_coefficients: tuple
    target_prevalence: float
    mislabel_rate: float = 0.0
    seed: int = 0
    column_names: tuple = field(default=None)
    pilot_size: int = 200_000

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        if len(self.true_coefficients) != self.p:
            raise ValueError(f"need {self.p} coefficients, got {len(self.true_coefficients)}")
        if not (0.0 < self.target_prevalence < 1.0):
            raise ValueError("target_prevalence must lie in (0, 1)")
        if not (0.0 <= self.mislabel_rate < 0.5):
            raise ValueError("mislabel_rate must lie in [0, 0.5)")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.column_names is not None and len(self.column_names) != self.p:
            raise ValueError("column_names must have p entries")


def _parse_float(text, row, col, name):
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"row {row}, column '{name}': cannot parse {text!r} as a number",
                         row=row, column=col) from None
    if not math.isfinite(v):
        raise ParseError(f"row {row}, column '{name}': non-finite value {text!r}",
                         row=row, column=col)
    return v


def load_csv(path):
    """Read a dataset whose last column is the ``cv`` label.

    Rows are numbered from 1 for the first data line in error messages.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or all(not h.strip() for h in header):
            raise SchemaError(f"{path}: missing header line")
        header = [h.strip() for h in header]
        if header[-1] != LABEL_COLUMN:
            raise SchemaError(f"{path}: last column must be '{LABEL_COLUMN}', got '{header[-1]}'")
        names = header[:-1]
        if not names:
            raise SchemaError(f"{path}: no feature columns")
        width = len(header)
        rows, labels = [], []
        for i, rec in enumerate(reader, start=1):
            if not rec:
                continue
            if len(rec) != width:
                raise StructureError(f"{path}: row {i} has {len(rec)} fields, expected {width}", row=i)
            rows.append([_parse_float(v, i, j, names[j]) for j, v in enumerate(rec[:-1])])
            lab = rec[-1].strip()
            try:
                lv = float(lab)
            except ValueError:
                raise LabelError(f"{path}: row {i}: label {lab!r} is not 0 or 1", row=i) from None
            if lv not in (0.0, 1.0):
                raise LabelError(f"{path}: row {i}: label {lab!r} is not 0 or 1", row=i)
            labels.append(int(lv))
    if not rows:
        raise StructureError(f"{path}: no data rows")
    return Dataset(np.array(rows, dtype=np.float64), np.array(labels, dtype=np.int8),
                   tuple(names), provenance=str(path))


def write_csv(data, path):
    """Write ``data`` in the loadable layout; floats use their shortest round-trip repr."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(data.column_names) + [LABEL_COLUMN])
            for row, lab in zip(data.features.tolist(), data.labels.tolist()):
                w.writerow([repr(v) for v in row] + [str(lab)])
    except OSError as exc:
        raise WriteError(f"cannot write {path}: {exc}") from exc


def class_counts(data):
    n_pos = int(np.count_nonzero(data.labels))
    n = int(data.labels.shape[0])
    return ClassSummary(n_pos, n - n_pos, n_pos / n)


def rebalance_indices(labels, spec):
    """Row indices kept by :func:`rebalance`: all positives, then sampled negatives."""
    labels = np.asarray(labels)
    pos = np.flatnonzero(labels == 1)
    neg = np.flatnonzero(labels == 0)
    if pos.size == 0:
        raise EmptyMinorityError("dataset has no minority (positive) observations")
    m = min(round_half_up(pos.size / spec.ratio), neg.size)
    rng = np.random.default_rng(spec.seed)
    chosen = np.sort(rng.choice(neg, size=m, replace=False))
    return np.concatenate([pos, chosen])


def rebalance(data, spec):
    """Keep every positive row and downsample negatives without replacement.

    The negative sample size is ``round(n_pos / ratio)`` capped at the number of
    negatives available.  Output is the positive block followed by the sampled
    negative block, each in original row order.
    """
    idx = rebalance_indices(data.labels, spec)
    return data.take(idx, provenance=f"rebalance(ratio={spec.ratio}, seed={spec.seed}) of {data.provenance}")


def default_coefficients(p, signal=3.0, seed=0):
    """Random coefficient direction scaled to Euclidean norm ``signal``."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0xC0EF,)))
    b = rng.standard_normal(p)
    return tuple((b * (signal / np.linalg.norm(b))).tolist())


def calibrate_intercept(scores, target, tol=1e-4, max_iter=200):
    """Bisection for the intercept making mean(sigmoid(a + scores)) equal ``target``."""
    lo, hi = -1.0, 1.0
    while np.mean(expit(lo + scores)) > target and lo > -1e6:
        lo *= 2.0
    while np.mean(expit(hi + scores)) < target and hi < 1e6:
        hi *= 2.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        m = float(np.mean(expit(mid + scores)))
        if abs(m - target) < tol:
            return mid
        if m < target:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(f"intercept bisection did not reach prevalence {target} in {max_iter} iterations")


def _streams(spec):
    return np.random.SeedSequence(spec.seed).spawn(3)


def synth_intercept(spec):
    """The intercept ``synth_generate`` uses for ``spec`` (calibrated on a pilot sample)."""
    beta = np.asarray(spec.true_coefficients, dtype=np.float64)
    pilot = np.random.default_rng(_streams(spec)[0]).standard_normal((spec.pilot_size, spec.p))
    return calibrate_intercept(pilot @ beta, spec.target_prevalence)


def synth_generate(spec):
    """Draw a logistic-model dataset with a calibrated intercept and optional label noise."""
    beta = np.asarray(spec.true_coefficients, dtype=np.float64)
    _, feat_ss, label_ss = _streams(spec)
    alpha = synth_intercept(spec)
    X = np.random.default_rng(feat_ss).standard_normal((spec.n, spec.p))
    rng = np.random.default_rng(label_ss)
    prob = expit(alpha + X @ beta)
    y = (rng.random(spec.n) < prob).astype(np.int8)
    flip = rng.random(spec.n) < spec.mislabel_rate
    y[flip] = 1 - y[flip]
    names = spec.column_names or tuple(f"x{j + 1}" for j in range(spec.p))
    return Dataset(X, y, names, provenance=f"synthetic(seed={spec.seed})")
