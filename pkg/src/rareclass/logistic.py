"""Maximum-likelihood logistic regression with stepwise AIC selection.

The model is ``logit P(Y=1|x) = intercept + sum_j coef_j * x_j`` over a named
subset of the dataset's columns.  Fitting is Newton-Raphson (IRLS) with step
halving; selection moves one variable at a time in either direction.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ._numeric import expit
from .errors import FeatureMismatchError, RareclassError, SingularMatrixError

PROB_EPS = 1e-12
DEVIANCE_TOL = 1e-8
PARAM_TOL = 1e-10
MAX_ITER = 50
MAX_HALVINGS = 10
SEPARATION_COEF = 30.0


@dataclass(frozen=True)
class LogisticModel:
    intercept: float
    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.intercept):
            raise ValueError("intercept must be finite")
        for k, v in self.coefficients.items():
            if not math.isfinite(v):
                raise ValueError(f"coefficient for {k!r} is not finite")

    @property
    def features(self):
        return tuple(self.coefficients)


@dataclass(frozen=True)
class FitReport:
    log_likelihood: float
    deviance: float
    aic: float
    n_iterations: int
    converged: bool
    separation_detected: bool
    n_params: int


@dataclass(frozen=True)
class StepRecord:
    step: int
    move: str  # "start", "drop" or "add"
    feature: str | None
    aic: float
    features: tuple
    failed: tuple = ()  # (move, feature, message) for moves out of this state whose fit raised


def sigmoid(s):
    s = float(s)
    if s < 0:
        e = math.exp(s)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(-s))


def score(model, x):
    """Linear predictor for one observation given as a name -> value mapping."""
    s = model.intercept
    for name, b in model.coefficients.items():
        try:
            s += b * x[name]
        except KeyError:
            raise FeatureMismatchError(f"observation has no value for feature {name!r}",
                                       feature=name) from None
    return s


def _design(data, features):
    cols = []
    for name in features:
        try:
            cols.append(data.column_names.index(name))
        except ValueError:
            raise FeatureMismatchError(f"dataset has no column {name!r}", feature=name) from None
    return data.features[:, cols]


def linear_scores(model, data):
    X = _design(data, model.features)
    return model.intercept + X @ np.array(list(model.coefficients.values()), dtype=np.float64)


def predict_proba(model, data):
    return expit(linear_scores(model, data))


def _loglik(p, y):
    p = np.clip(p, PROB_EPS, 1.0 - PROB_EPS)
    return float(np.sum(np.where(y == 1, np.log(p), np.log1p(-p))))


def log_likelihood(model, data):
    return _loglik(predict_proba(model, data), data.labels)


def gradient(params, X, y):
    """Score vector of the log-likelihood; ``X`` must include the constant column."""
    return X.T @ (y - expit(X @ params))


def aic(report):
    return -2.0 * report.log_likelihood + 2.0 * report.n_params


def fit_irls(data, features=()):
    """Fit by Newton-Raphson.  Returns ``(LogisticModel, FitReport)``.

    Raises SingularMatrixError when the design or the weighted information
    matrix is rank deficient.  Failure to converge is reported, not raised.
    """
    features = tuple(features)
    n = data.n
    X = np.empty((n, len(features) + 1))
    X[:, 0] = 1.0
    X[:, 1:] = _design(data, features)
    y = data.labels.astype(np.float64)
    k = X.shape[1]
    if np.linalg.matrix_rank(X) < k:
        raise SingularMatrixError(f"design matrix is rank deficient for features {list(features)}")

    beta = np.zeros(k)
    dev = -2.0 * _loglik(expit(X @ beta), y)
    converged = separated = False
    it = 0
    for it in range(1, MAX_ITER + 1):
        p = expit(X @ beta)
        w = p * (1.0 - p)
        grad = X.T @ (y - p)
        info = X.T @ (X * w[:, None])
        try:
            step = np.linalg.solve(info, grad)
        except np.linalg.LinAlgError:
            raise SingularMatrixError("weighted information matrix is singular") from None
        if not np.all(np.isfinite(step)):
            raise SingularMatrixError("weighted information matrix is singular")
        cand = beta + step
        dev_new = -2.0 * _loglik(expit(X @ cand), y)
        halvings = 0
        while dev_new > dev and halvings < MAX_HALVINGS:
            step = step / 2.0
            cand = beta + step
            dev_new = -2.0 * _loglik(expit(X @ cand), y)
            halvings += 1
        if dev_new > dev:
            # no descent direction left at working precision
            converged = abs(dev_new - dev) < DEVIANCE_TOL
            break
        delta_dev = dev - dev_new
        beta, dev = cand, dev_new
        if np.max(np.abs(beta)) > SEPARATION_COEF and delta_dev > 0:
            separated = True
            break
        if delta_dev < DEVIANCE_TOL or np.max(np.abs(step)) < PARAM_TOL:
            converged = True
            break

    if not separated and k > 1:
        # complete separation can also stall the absolute deviance test before |coef| reaches 30
        eta = X @ beta
        pos, neg = eta[y == 1], eta[y == 0]
        if pos.size and neg.size and neg.max() < pos.min():
            separated = True
            converged = False

    ll = -0.5 * dev
    model = LogisticModel(float(beta[0]), {f: float(b) for f, b in zip(features, beta[1:])})
    report = FitReport(
        log_likelihood=ll,
        deviance=dev,
        aic=-2.0 * ll + 2.0 * k,
        n_iterations=it,
        converged=converged,
        separation_detected=separated,
        n_params=k,
    )
    return model, report


def _ordered(data, names):
    names = set(names)
    return tuple(c for c in data.column_names if c in names)


def _try_fit(data, features):
    try:
        return fit_irls(data, features), None
    except RareclassError as exc:
        return None, str(exc)


def stepwise_select(data, features=None, n_jobs=1):
    """Bidirectional stepwise selection by AIC, starting from the full model.

    Each step fits every one-variable deletion and addition and takes the
    candidate with the smallest AIC if it strictly improves the current one.
    Equal AICs prefer a deletion, then the lexicographically smallest name.
    Returns ``(model, report, trace)``.
    """
    pool = _ordered(data, data.column_names if features is None else features)
    missing = set(features or ()) - set(pool)
    if missing:
        name = sorted(missing)[0]
        raise FeatureMismatchError(f"dataset has no column {name!r}", feature=name)

    trace = []
    fit, err = _try_fit(data, pool)
    current = pool
    start_failed = ()
    if fit is None:
        start_failed = (("start", None, err),)
        current = ()
        fit = fit_irls(data, current)
    model, report = fit
    trace.append(StepRecord(0, "start", None, report.aic, current, start_failed))

    executor = ThreadPoolExecutor(n_jobs) if n_jobs > 1 else None
    try:
        step = 0
        while True:
            step += 1
            moves = [("drop", f, _ordered(data, set(current) - {f})) for f in current]
            moves += [("add", f, _ordered(data, set(current) | {f})) for f in pool if f not in current]
            if not moves:
                break
            subsets = [m[2] for m in moves]
            if executor is None:
                results = [_try_fit(data, s) for s in subsets]
            else:
                results = list(executor.map(lambda s: _try_fit(data, s), subsets))
            failed = tuple((mv, f, e) for (mv, f, _), (_, e) in zip(moves, results) if e is not None)
            if failed:
                # a record's failures are the candidate moves out of that state
                last = trace[-1]
                trace[-1] = replace(last, failed=last.failed + failed)
            scored = [
                (res[1].aic, 0 if mv == "drop" else 1, f, mv, sub, res)
                for (mv, f, sub), (res, _) in zip(moves, results)
                if res is not None
            ]
            if not scored:
                break
            best = min(scored, key=lambda t: t[:3])
            if not best[0] < report.aic:
                break
            current = best[4]
            model, report = best[5]
            trace.append(StepRecord(step, best[3], best[2], report.aic, current))
    finally:
        if executor is not None:
            executor.shutdown()
    return model, report, trace


def model_to_dict(model, report):
    return {
        "intercept": model.intercept,
        "coefficients": dict(model.coefficients),
        "fit": {
            "log_likelihood": report.log_likelihood,
            "aic": report.aic,
            "converged": report.converged,
        },
    }


def save_model(path, model, report):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, report), fh, indent=2)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return model_from_dict(doc)


def model_from_dict(doc):
    return LogisticModel(float(doc["intercept"]),
                         {str(k): float(v) for k, v in doc["coefficients"].items()})
