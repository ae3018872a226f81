import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rareclass.analysis import (
    RescaleParams,
    class_densities,
    histogram_triptych,
    kde,
    kendall_paired,
    rescale_phi,
    rescale_phi_inverse,
    silverman_bandwidth,
    tsfar_compare,
)
from rareclass.errors import DegenerateSampleError, DomainError, InputError, UndefinedTauError
from rareclass.metrics import confusion, confusion_path, roc, sweep


# --- densities -------------------------------------------------------------------

def test_bandwidth_formula():
    v = np.random.default_rng(0).standard_normal(400)
    q75, q25 = np.percentile(v, [75, 25])
    h = 0.9 * min(np.std(v, ddof=1), (q75 - q25) / 1.34) * 400 ** -0.2
    assert silverman_bandwidth(v) == pytest.approx(h, rel=1e-14)


def test_kde_symmetric():
    half = np.random.default_rng(1).uniform(0, 0.5, 200)
    d = kde(np.r_[half, 1.0 - half])
    assert d.grid[0] + d.grid[-1] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(d.values - d.values[::-1])) < 1e-10


def test_kde_integrates_to_one():
    d = kde(np.random.default_rng(2).random(1000))
    assert abs(d.integral() - 1.0) < 0.02
    assert d.grid.shape == (512,) and np.all(d.values >= 0)
    assert np.all(np.diff(d.grid) > 0)


def test_kde_bimodal():
    rng = np.random.default_rng(3)
    d = kde(np.r_[rng.normal(0.1, 0.02, 300), rng.normal(0.9, 0.02, 300)])
    at = lambda x: d.values[np.argmin(np.abs(d.grid - x))]  # noqa: E731
    assert at(0.1) > 10 * at(0.5) and at(0.9) > 10 * at(0.5)
    peaks = np.flatnonzero((d.values[1:-1] > d.values[:-2]) & (d.values[1:-1] > d.values[2:]))
    assert len(peaks) == 2


def test_kde_permutation_invariant():
    v = np.random.default_rng(4).random(300)
    a, b = kde(v), kde(v[::-1].copy())
    assert np.allclose(a.values, b.values, rtol=0, atol=1e-12)
    assert a.bandwidth == b.bandwidth


def test_kde_degenerate():
    with pytest.raises(DegenerateSampleError):
        kde([0.3, 0.3, 0.3])
    with pytest.raises(DegenerateSampleError):
        kde([0.3])


def test_kde_zero_iqr_falls_back_to_sd():
    v = np.r_[np.zeros(90), np.linspace(0.5, 1, 10)]
    assert silverman_bandwidth(v) == pytest.approx(0.9 * np.std(v, ddof=1) * 100 ** -0.2)


def test_class_densities_modes():
    rng = np.random.default_rng(5)
    labels = rng.integers(0, 2, 600)
    probs = np.clip(labels + rng.normal(0, 0.05, 600), 0, 1)
    pos, neg = class_densities(probs, labels)
    assert abs(pos.grid[np.argmax(pos.values)] - 1.0) < 0.1
    assert abs(neg.grid[np.argmax(neg.values)]) < 0.1


def test_class_densities_names_degenerate_class():
    with pytest.raises(DegenerateSampleError) as exc:
        class_densities([0.1, 0.2, 0.5, 0.5], [0, 0, 1, 1])
    assert exc.value.label == 1


def test_histogram_boundaries():
    tri = histogram_triptych([0.1, 0.2, 0.3, 0.9, 0.5], [1, 1, 1, 1, 0])
    assert tri.positive == (2, 1, 1)
    assert tri.negative == (0, 1, 0)
    assert histogram_triptych([0.4], [0]).positive == (0, 0, 0)


def test_histogram_partition():
    rng = np.random.default_rng(6)
    probs = rng.choice(np.r_[rng.random(100), 0.0, 0.2, 0.5, 1.0], 500)
    labels = rng.integers(0, 2, 500)
    tri = histogram_triptych(probs, labels)
    assert sum(tri.positive) == labels.sum()
    assert sum(tri.negative) == 500 - labels.sum()
    oracle = [0, 0, 0]
    for p in probs[labels == 1]:
        oracle[0 if p <= 0.2 else 1 if p <= 0.5 else 2] += 1
    assert tri.positive == tuple(oracle)


# --- rescaling -------------------------------------------------------------------

@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (0.25, 0.2), (0.5, 0.5), (0.75, 0.874875), (1.0, 1.0)])
def test_phi_anchors(x, expected):
    assert abs(rescale_phi(x) - expected) < 1e-12


def test_phi_branches_meet_at_half():
    eps = 1e-12
    assert abs(rescale_phi(0.5 - eps) - rescale_phi(0.5 + eps)) < 1e-11


def test_phi_strictly_increasing():
    grid = np.linspace(0, 1, 10_001)
    assert np.all(np.diff(rescale_phi(grid)) > 0)


def test_phi_inverse():
    grid = np.linspace(0, 1, 2001)
    assert np.max(np.abs(rescale_phi_inverse(rescale_phi(grid)) - grid)) < 1e-12
    p = RescaleParams(1.0, 1.0)
    assert np.allclose(rescale_phi(grid, p), grid)
    assert np.allclose(rescale_phi_inverse(grid, p), grid)


def test_phi_domain():
    with pytest.raises(DomainError):
        rescale_phi(1.01)
    with pytest.raises(DomainError):
        rescale_phi([0.5, -0.1])
    with pytest.raises(DomainError):
        rescale_phi(float("nan"))
    with pytest.raises(ValueError):
        RescaleParams(0.0, 0.5)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000))
def test_phi_preserves_ranking(seed):
    rng = np.random.default_rng(seed)
    v = rng.random(300)
    y = rng.integers(0, 2, 300)
    y[:2] = (0, 1)
    w = rescale_phi(v)
    assert abs(roc(v, y).auc - roc(w, y).auc) < 1e-12
    assert kendall_paired(v, w).tau == 1.0


# --- Kendall ---------------------------------------------------------------------

def _tau_b_oracle(a, b):
    s = ta = tb = 0
    n = len(a)
    for i, j in itertools.combinations(range(n), 2):
        da, db = np.sign(a[j] - a[i]), np.sign(b[j] - b[i])
        s += da * db
        ta += da == 0
        tb += db == 0
    n0 = n * (n - 1) // 2
    return s / math.sqrt((n0 - ta) * (n0 - tb))


def test_kendall_perfect(backend):
    a = np.random.default_rng(7).standard_normal(40)
    r = kendall_paired(a, a, backend=backend)
    assert r.tau == 1.0 and r.p_value < 1e-6 and r.n == 40
    assert kendall_paired(a, -a, backend=backend).tau == -1.0


def test_kendall_small_oracle(backend):
    a = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0]
    b = [2.0, 7.0, 1.0, 8.0, 2.0, 8.0]
    assert kendall_paired(a, b, backend=backend).tau == _tau_b_oracle(np.array(a), np.array(b))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_kendall_matches_pair_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 60))
    a = rng.integers(0, 5, n).astype(float)
    b = rng.integers(0, 5, n).astype(float)
    a[:2], b[:2] = (0, 1), (1, 0)
    assert abs(kendall_paired(a, b).tau - _tau_b_oracle(a, b)) < 1e-12


def test_kendall_exact_p_value():
    # n=4 identity: only the identity ranking reaches |S| = 6 besides its reversal
    r = kendall_paired([1, 2, 3, 4], [1, 2, 3, 4])
    assert r.method == "exact" and r.p_value == pytest.approx(2 / 24)
    r = kendall_paired([1, 2, 3, 4, 5], [2, 1, 3, 4, 5])
    # |S| >= 8 needs at most one inversion (1 + 4 permutations) or its mirror
    assert r.p_value == pytest.approx(10 / 120)


def test_kendall_normal_p_value():
    rng = np.random.default_rng(9)
    a = rng.standard_normal(200)
    r = kendall_paired(a, a + rng.standard_normal(200))
    assert r.method == "normal" and r.p_value < 1e-10
    null = kendall_paired(rng.standard_normal(200), rng.standard_normal(200))
    assert 0.0 <= null.p_value <= 1.0


def test_kendall_errors():
    with pytest.raises(UndefinedTauError):
        kendall_paired([1, 1, 1], [1, 2, 3])
    with pytest.raises(InputError):
        kendall_paired([1, 2], [1, 2, 3])
    with pytest.raises(InputError):
        kendall_paired([1], [1])


# --- comparisons -----------------------------------------------------------------

def _scores(seed, n=400):
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, n)
    return np.clip(0.3 * labels + 0.7 * rng.random(n), 0, 1), labels


def test_compare_with_itself():
    probs, labels = _scores(0)
    sw = sweep(probs, labels)
    table = tsfar_compare(sw, sw, 0.5)
    assert np.array_equal(table.far_a, table.far_b, equal_nan=True)
    assert np.array_equal(table.ts_a, table.ts_b, equal_nan=True)
    assert table.mark_a == table.mark_b and table.mark_a.threshold == 250 / 499
    assert table.warnings == ()


def test_compare_resamples_mismatched_grids():
    probs, labels = _scores(1)
    table = tsfar_compare(sweep(probs, labels, 500), sweep(probs, labels, 101), 0.3)
    assert len(table.threshold) == 101
    fine = sweep(probs, labels, 500)
    assert table.warnings and "resampled" in table.warnings[0]
    assert np.array_equal(table.threshold, np.arange(101) / 100)
    for t, ts_a in zip(table.threshold, table.ts_a):
        nearest = fine.points[int(np.argmin(np.abs(fine.thresholds - t)))]
        assert ts_a == nearest.ts


def test_compare_errors():
    probs, labels = _scores(2)
    sw = sweep(probs, labels)
    with pytest.raises(InputError):
        tsfar_compare(sw, sw, 1.5)


def test_phi_rescaled_probs_give_same_outcome_set():
    probs, labels = _scores(3)
    a = {(c.hits, c.false_alarms) for c in confusion_path(probs, labels)}
    b = {(c.hits, c.false_alarms) for c in confusion_path(rescale_phi(probs), labels)}
    assert a == b
    # the same outcome is reached at a different threshold
    tau = 0.4
    assert confusion(probs, labels, tau) == confusion(rescale_phi(probs), labels, rescale_phi(tau))
