"""Agreement with established implementations, where they are installed.

These are independent oracles only; the package itself never imports them.
"""

import math

import numpy as np
import pytest

from rareclass import analysis, logistic, metrics
from rareclass.data import SynthSpec, synth_generate


def test_auc_against_sklearn():
    skm = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(10, 400))
        labels = rng.integers(0, 2, n)
        labels[:2] = (0, 1)
        probs = rng.random(n).round(2)
        assert metrics.roc(probs, labels).auc == pytest.approx(skm.roc_auc_score(labels, probs), abs=1e-12)


def test_kendall_against_scipy():
    stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(1)
    for n in (5, 30, 200):
        a = rng.integers(0, 6, n).astype(float)
        b = a + rng.integers(0, 4, n)
        ours = analysis.kendall_paired(a, b)
        ref = stats.kendalltau(a, b, variant="b")
        assert ours.tau == pytest.approx(ref.statistic, abs=1e-12)
    # without ties the exact null distribution is available in scipy too
    a = rng.permutation(8).astype(float)
    b = rng.permutation(8).astype(float)
    ref = stats.kendalltau(a, b, method="exact")
    assert analysis.kendall_paired(a, b).p_value == pytest.approx(ref.pvalue, rel=1e-9)


def test_kendall_normal_p_close_to_scipy():
    # scipy omits the continuity correction, so only closeness is expected
    stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(2)
    a = rng.standard_normal(300)
    b = 0.15 * a + rng.standard_normal(300)
    ours = analysis.kendall_paired(a, b)
    ref = stats.kendalltau(a, b, method="asymptotic")
    assert ours.p_value == pytest.approx(ref.pvalue, rel=0.05)
    assert ours.p_value >= ref.pvalue


def test_logistic_against_statsmodels():
    sm = pytest.importorskip("statsmodels.api")
    d = synth_generate(SynthSpec(3000, 4, (0.8, -0.4, 0.0, 1.1), 0.25, 0.0, seed=3))
    model, report = logistic.fit_irls(d, d.column_names)
    ref = sm.Logit(d.labels.astype(float), sm.add_constant(d.features)).fit(disp=0, tol=1e-12)
    ours = np.r_[model.intercept, list(model.coefficients.values())]
    assert np.allclose(ours, ref.params, atol=1e-7)
    assert report.log_likelihood == pytest.approx(ref.llf, abs=1e-7)
    assert report.aic == pytest.approx(ref.aic, abs=1e-6)


def test_kde_against_scipy():
    stats = pytest.importorskip("scipy.stats")
    v = np.random.default_rng(4).beta(2, 5, 500)
    d = analysis.kde(v)
    ref = stats.gaussian_kde(v, bw_method=d.bandwidth / np.std(v, ddof=1))
    assert np.allclose(d.values, ref(d.grid), rtol=1e-10, atol=1e-12)
    assert math.isclose(d.integral(), 1.0, abs_tol=0.02)
