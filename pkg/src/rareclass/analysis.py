"""Diagnostics on predicted probabilities.

Kernel densities and three-bin histograms per class, a monotone rescaling
that stretches probabilities near 0 and compresses them near 1, Kendall's
tau-b between two score vectors, and side-by-side TS / FAR tables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateSampleError, DomainError, InputError, UndefinedTauError
from .metrics import ThresholdSweep

HIST_BINS = ((0.0, 0.2), (0.2, 0.5), (0.5, 1.0))


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    grid: np.ndarray
    values: np.ndarray
    bandwidth: float

    def integral(self):
        g, v = self.grid, self.values
        return float(np.sum((g[1:] - g[:-1]) * (v[1:] + v[:-1])) / 2.0)


@dataclass(frozen=True)
class HistogramTriptych:
    """Counts per class over the bins [0,0.2], (0.2,0.5], (0.5,1]."""

    positive: tuple
    negative: tuple
    bins: tuple = HIST_BINS


@dataclass(frozen=True)
class RescaleParams:
    low_anchor: float = 0.6
    high_anchor: float = 1e-3

    def __post_init__(self):
        for v in (self.low_anchor, self.high_anchor):
            if not 0.0 < v <= 1.0:
                raise ValueError("rescale anchors must lie in (0, 1]")


@dataclass(frozen=True)
class KendallResult:
    tau: float
    p_value: float
    n: int
    method: str = "normal"


@dataclass(frozen=True)
class CompareTable:
    threshold: np.ndarray
    far_a: np.ndarray
    ts_a: np.ndarray
    far_b: np.ndarray
    ts_b: np.ndarray
    mark_a: object
    mark_b: object
    warnings: tuple = field(default=())

    def rows(self):
        return zip(self.threshold.tolist(), self.far_a.tolist(), self.ts_a.tolist(),
                   self.far_b.tolist(), self.ts_b.tolist())


def silverman_bandwidth(values):
    v = np.asarray(values, dtype=np.float64)
    sd = float(np.std(v, ddof=1))
    q75, q25 = np.percentile(v, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if spread <= 0:
        spread = sd
    return 0.9 * spread * v.size ** -0.2


def kde(values, n_grid=512):
    """Gaussian kernel density with Silverman's rule-of-thumb bandwidth."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size < 2 or not np.min(v) < np.max(v):
        raise DegenerateSampleError("density estimation needs at least two distinct values")
    h = silverman_bandwidth(v)
    grid = np.linspace(v.min() - 3 * h, v.max() + 3 * h, n_grid)
    dens = np.zeros(n_grid)
    for start in range(0, v.size, 4096):
        z = (grid[:, None] - v[None, start:start + 4096]) / h
        dens += np.exp(-0.5 * z * z).sum(axis=1)
    dens /= v.size * h * math.sqrt(2.0 * math.pi)
    return DensityEstimate(grid, dens, h)


def class_densities(probs, labels, n_grid=512):
    """``(density of class 1, density of class 0)``."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    out = []
    for cls in (1, 0):
        try:
            out.append(kde(probs[labels == cls], n_grid))
        except DegenerateSampleError:
            raise DegenerateSampleError(
                f"class {cls} needs at least two distinct probability values", label=cls) from None
    return tuple(out)


def histogram_triptych(probs, labels):
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)

    def counts(v):
        return (int(np.count_nonzero(v <= 0.2)),
                int(np.count_nonzero((v > 0.2) & (v <= 0.5))),
                int(np.count_nonzero(v > 0.5)))

    return HistogramTriptych(counts(probs[labels == 1]), counts(probs[labels == 0]))


def rescale_phi(x, params=RescaleParams()):
    """Piecewise-quadratic increasing map of [0,1] onto itself fixing 0, 0.5 and 1.

    Below 0.5 the value is multiplied by a slope rising linearly from
    ``low_anchor`` (at 0) to 1 (at 0.5); above 0.5 the distance to 1 is
    multiplied by a slope falling from 1 to ``high_anchor`` (at 1).
    Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise DomainError("rescale_phi is defined on [0, 1] only")
    lo, hi = params.low_anchor, params.high_anchor
    u = 1.0 - arr
    out = np.where(arr <= 0.5,
                   (2.0 * (1.0 - lo) * arr + lo) * arr,
                   1.0 - (2.0 * (1.0 - hi) * u + hi) * u)
    return float(out) if out.ndim == 0 else out


def rescale_phi_inverse(y, params=RescaleParams()):
    arr = np.asarray(y, dtype=np.float64)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise DomainError("rescale_phi_inverse is defined on [0, 1] only")
    lo, hi = params.low_anchor, params.high_anchor
    a, b = 2.0 * (1.0 - lo), 2.0 * (1.0 - hi)
    with np.errstate(invalid="ignore", divide="ignore"):
        left = arr / lo if a == 0 else (-lo + np.sqrt(lo * lo + 4.0 * a * arr)) / (2.0 * a)
        w = 1.0 - arr
        u = w / hi if b == 0 else (-hi + np.sqrt(hi * hi + 4.0 * b * w)) / (2.0 * b)
    out = np.where(arr <= 0.5, left, 1.0 - u)
    return float(out) if out.ndim == 0 else out


def _tie_sums(v):
    _, c = np.unique(v, return_counts=True)
    c = c.astype(np.float64)
    return (float(np.sum(c * (c - 1))),
            float(np.sum(c * (c - 1) * (c - 2))),
            float(np.sum(c * (c - 1) * (2 * c + 5))))


def _s_variance(n, a, b):
    ta1, ta2, ta3 = _tie_sums(a)
    tb1, tb2, tb3 = _tie_sums(b)
    v = (n * (n - 1) * (2 * n + 5) - ta3 - tb3) / 18.0
    v += ta1 * tb1 / (2.0 * n * (n - 1))
    if n > 2:
        v += ta2 * tb2 / (9.0 * n * (n - 1) * (n - 2))
    return v


def _exact_p(a, b, s_obs):
    n = a.size
    iu, ju = np.triu_indices(n, k=1)
    sa = np.sign(a[ju] - a[iu]).astype(np.int64)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    bp = b[perms]
    sb = np.sign(bp[:, ju] - bp[:, iu]).astype(np.int64)
    s_all = sb @ sa
    return float(np.count_nonzero(np.abs(s_all) >= abs(s_obs)) / s_all.size)


def kendall_paired(a, b, backend=None):
    """Kendall tau-b with a two-sided p-value.

    The p-value is exact (all n! pairings) for n <= 8 and otherwise uses the
    tie-corrected normal approximation of S with a continuity correction of
    one; that approximation is rough for n below about 50.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise InputError("Kendall test needs two vectors of equal length")
    n = a.size
    if n < 2:
        raise InputError("Kendall test needs at least two observations")
    s, ties_a, ties_b = kernels.get(backend).kendall_counts(a, b)
    n0 = n * (n - 1) // 2
    if ties_a == n0 or ties_b == n0:
        raise UndefinedTauError("tau is undefined when a vector is entirely tied")
    tau = s / math.sqrt(float(n0 - ties_a) * float(n0 - ties_b))
    tau = max(-1.0, min(1.0, tau))
    if n <= 8:
        return KendallResult(tau, _exact_p(a, b, s), n, "exact")
    var = _s_variance(n, a, b)
    z = max(abs(s) - 1, 0) / math.sqrt(var)
    return KendallResult(tau, min(1.0, math.erfc(z / math.sqrt(2.0))), n, "normal")


def _nearest(thresholds, tau):
    return int(np.argmin(np.abs(np.asarray(thresholds) - tau)))


def _resample(sw, grid):
    th = sw.thresholds
    return ThresholdSweep(tuple(sw.points[_nearest(th, t)] for t in grid))


def tsfar_compare(sweep_a, sweep_b, tau_mark):
    """Align two sweeps by threshold and mark each model's point nearest ``tau_mark``.

    Sweeps on different grids are resampled (nearest threshold) onto the
    coarser one and a warning is recorded.
    """
    if not len(sweep_a) or not len(sweep_b):
        raise InputError("both sweeps must be non-empty")
    if not 0.0 <= tau_mark <= 1.0:
        raise InputError("tau_mark must lie in [0, 1]")
    warnings = []
    ta, tb = sweep_a.thresholds, sweep_b.thresholds
    grid = ta
    if ta.shape != tb.shape or not np.array_equal(ta, tb):
        if len(sweep_a) <= len(sweep_b):
            sweep_b = _resample(sweep_b, ta)
            warnings.append(f"sweep b resampled from {tb.size} to {ta.size} thresholds")
        else:
            grid = tb
            sweep_a = _resample(sweep_a, tb)
            warnings.append(f"sweep a resampled from {ta.size} to {tb.size} thresholds")
    return CompareTable(
        grid,
        sweep_a.column("far"), sweep_a.column("ts"),
        sweep_b.column("far"), sweep_b.column("ts"),
        sweep_a.points[_nearest(grid, tau_mark)],
        sweep_b.points[_nearest(grid, tau_mark)],
        tuple(warnings),
    )
