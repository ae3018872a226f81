"""Confusion matrices, FAR / TS / Se / Sp, threshold sweeps and ROC analysis.

Predictions are positive iff the probability is strictly greater than the
threshold.  Ratios whose denominator is zero are ``None`` (missing) rather
than 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabelsError, InputError


@dataclass(frozen=True)
class ConfusionMatrix:
    hits: int
    false_alarms: int
    misses: int
    correct_rejections: int

    @property
    def n(self):
        return self.hits + self.false_alarms + self.misses + self.correct_rejections


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    far: float | None
    ts: float | None
    sensitivity: float | None
    specificity: float | None
    confusion: ConfusionMatrix


@dataclass(frozen=True)
class ThresholdSweep:
    points: tuple

    @property
    def thresholds(self):
        return np.array([p.threshold for p in self.points])

    def column(self, name):
        """Values of a SweepPoint field as a float array (missing -> NaN)."""
        return np.array([np.nan if getattr(p, name) is None else getattr(p, name) for p in self.points])

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class RocCurve:
    one_minus_specificity: np.ndarray
    sensitivity: np.ndarray
    auc: float

    @property
    def points(self):
        return list(zip(self.one_minus_specificity.tolist(), self.sensitivity.tolist()))


def _check(probs, labels):
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.ndim != 1 or probs.shape != labels.shape:
        raise InputError(f"probabilities and labels must be 1-D of equal length, "
                         f"got {probs.shape} and {labels.shape}")
    if not np.all((labels == 0) | (labels == 1)):
        raise InputError("labels must be 0 or 1")
    return probs, labels.astype(bool)


def _ratio(num, den):
    return None if den == 0 else num / den


def confusion(probs, labels, tau):
    probs, y = _check(probs, labels)
    pred = probs > tau
    hits = int(np.count_nonzero(pred & y))
    fa = int(np.count_nonzero(pred & ~y))
    n_pos = int(np.count_nonzero(y))
    return ConfusionMatrix(hits, fa, n_pos - hits, (y.size - n_pos) - fa)


def far(cm):
    return _ratio(cm.false_alarms, cm.hits + cm.false_alarms)


def ts(cm):
    return _ratio(cm.hits, cm.hits + cm.false_alarms + cm.misses)


def sensitivity(cm):
    return _ratio(cm.hits, cm.hits + cm.misses)


def specificity(cm):
    return _ratio(cm.correct_rejections, cm.false_alarms + cm.correct_rejections)


def sweep_point(cm, tau):
    return SweepPoint(float(tau), far(cm), ts(cm), sensitivity(cm), specificity(cm), cm)


def sweep(probs, labels, n_points=500):
    """Evaluate at ``n_points`` evenly spaced thresholds ``k / (n_points - 1)``."""
    if n_points < 2:
        raise InputError("n_points must be >= 2")
    probs, y = _check(probs, labels)
    pos = np.sort(probs[y])
    neg = np.sort(probs[~y])
    taus = np.arange(n_points) / (n_points - 1)
    # number of scores strictly above each tau
    hits = pos.size - np.searchsorted(pos, taus, side="right")
    fas = neg.size - np.searchsorted(neg, taus, side="right")
    pts = []
    for tau, h, f in zip(taus.tolist(), hits.tolist(), fas.tolist()):
        cm = ConfusionMatrix(h, f, pos.size - h, neg.size - f)
        pts.append(sweep_point(cm, tau))
    return ThresholdSweep(tuple(pts))


def confusion_path(probs, labels):
    """Confusion matrices at every distinct score, from strictest to loosest.

    Entry ``k`` predicts positive the observations scoring at or above the
    k-th largest distinct score; entry 0 predicts nothing positive.  This is
    the exact set of outcomes any threshold can produce.
    """
    probs, y = _check(probs, labels)
    order = np.argsort(-probs, kind="stable")
    s = probs[order]
    ys = y[order]
    tp = np.cumsum(ys)
    fp = np.cumsum(~ys)
    last = np.flatnonzero(np.r_[s[1:] != s[:-1], True])  # end of each tie group
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    tp = np.r_[0, tp[last]]
    fp = np.r_[0, fp[last]]
    return [ConfusionMatrix(int(h), int(f), n_pos - int(h), n_neg - int(f)) for h, f in zip(tp, fp)]


def roc(probs, labels):
    """ROC at all distinct scores plus the (0,0) sentinel; trapezoidal AUC."""
    probs, y = _check(probs, labels)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("ROC needs both classes present")
    path = confusion_path(probs, y)
    tp = np.array([c.hits for c in path], dtype=np.float64)
    fp = np.array([c.false_alarms for c in path], dtype=np.float64)
    tpr = tp / n_pos
    fpr = fp / n_neg
    # integrate in counts to keep rounding to a single division
    area = float(np.sum((fp[1:] - fp[:-1]) * (tp[1:] + tp[:-1]))) / (2.0 * n_pos * n_neg)
    return RocCurve(fpr, tpr, area)


def auc_pairwise(probs, labels):
    """Mann-Whitney concordance over every (positive, negative) pair."""
    probs, y = _check(probs, labels)
    pos = probs[y]
    neg = probs[~y]
    if pos.size == 0 or neg.size == 0:
        raise DegenerateLabelsError("AUC needs both classes present")
    total = 0.0
    for v in pos:
        total += np.count_nonzero(v > neg) + 0.5 * np.count_nonzero(v == neg)
    return total / (pos.size * neg.size)


def best_operating_point(sweep_, max_far):
    """Highest-TS point among those with FAR defined and <= ``max_far``.

    Ties prefer the smaller FAR, then the smaller threshold.  ``None`` when
    no point qualifies.
    """
    if not 0.0 <= max_far <= 1.0:
        raise InputError("max_far must lie in [0, 1]")
    ok = [p for p in sweep_.points if p.far is not None and p.far <= max_far and p.ts is not None]
    if not ok:
        return None
    return min(ok, key=lambda p: (-p.ts, p.far, p.threshold))
