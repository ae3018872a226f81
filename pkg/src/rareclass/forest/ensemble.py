"""Bagged tree ensembles with vote-proportion probabilities and out-of-bag estimates."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from ..data import Dataset
from ..errors import DatasetMismatchError
from .tree import DecisionTree, grow_tree


@dataclass(frozen=True)
class ForestConfig:
    """Ensemble settings.  ``None`` for ``mtry`` / ``bootstrap_size`` means
    ``floor(sqrt(p))`` / ``n`` once the training data is known."""

    n_trees: int = 500
    mtry: int | None = None
    bootstrap_size: int | None = None
    min_node_size: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.mtry is not None and self.mtry < 1:
            raise ValueError("mtry must be >= 1")
        if self.bootstrap_size is not None and self.bootstrap_size < 1:
            raise ValueError("bootstrap_size must be >= 1")
        if self.min_node_size < 1:
            raise ValueError("min_node_size must be >= 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")

    def resolved(self, n, p):
        mtry = self.mtry if self.mtry is not None else max(1, math.isqrt(p))
        if mtry > p:
            raise ValueError(f"mtry={mtry} exceeds the number of features {p}")
        return replace(self, mtry=mtry,
                       bootstrap_size=self.bootstrap_size if self.bootstrap_size is not None else n)


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple
    inbag: np.ndarray  # (n_trees, n_train) bootstrap multiplicities
    config: ForestConfig
    n_features: int
    feature_names: tuple = ()

    @property
    def n_trees(self):
        return len(self.trees)


def tree_rng(master_seed, tree_index):
    """Independent generator for one tree, a function of (seed, index) only."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(tree_index,)))


def _grow_one(X, y, cfg, t, backend):
    rng = tree_rng(cfg.master_seed, t)
    n = X.shape[0]
    boot = np.sort(rng.integers(0, n, size=cfg.bootstrap_size))
    tree = grow_tree(X, y, boot, cfg.mtry, rng, cfg.min_node_size, backend)
    return tree, np.bincount(boot, minlength=n)


def fit_forest(data, config=ForestConfig(), n_jobs=1, backend=None):
    """Grow ``config.n_trees`` trees on bootstrap resamples of ``data``.

    The result depends only on ``(data, config)``: each tree draws from its
    own generator, so ``n_jobs`` and the kernel backend do not change it.
    """
    cfg = config.resolved(data.n, data.p)
    X = np.ascontiguousarray(data.features)
    y = np.ascontiguousarray(data.labels, dtype=np.int8)
    work = lambda t: _grow_one(X, y, cfg, t, backend)  # noqa: E731
    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as ex:
            grown = list(ex.map(work, range(cfg.n_trees)))
    else:
        grown = [work(t) for t in range(cfg.n_trees)]
    trees = tuple(g[0] for g in grown)
    inbag = np.vstack([g[1] for g in grown]).astype(np.int64)
    return ForestModel(trees, inbag, cfg, data.p, data.column_names)


def _matrix(forest, x):
    if isinstance(x, Dataset):
        X = x.features
    else:
        X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    X = np.ascontiguousarray(np.atleast_2d(X), dtype=np.float64)
    if X.shape[1] != forest.n_features:
        raise DatasetMismatchError(f"expected {forest.n_features} features, got {X.shape[1]}")
    return X, single


def tree_votes(forest, X, backend=None):
    """(n_trees, n) matrix of 0/1 votes."""
    X, _ = _matrix(forest, X)
    return np.vstack([t.votes[t.apply(X, backend)] for t in forest.trees])


def predict_proba(forest, x, backend=None):
    """Fraction of trees voting positive, for one row or a matrix / Dataset."""
    X, single = _matrix(forest, x)
    proba = tree_votes(forest, X, backend).sum(axis=0) / forest.n_trees
    return float(proba[0]) if single else proba


def predict_class(forest, x, tau=0.5, backend=None):
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    proba = predict_proba(forest, x, backend)
    if np.ndim(proba) == 0:
        return int(proba > tau)
    return (proba > tau).astype(np.int8)


def _oob_parts(forest, data, backend):
    if data.n != forest.inbag.shape[1]:
        raise DatasetMismatchError(
            f"forest was trained on {forest.inbag.shape[1]} rows, dataset has {data.n}")
    votes = tree_votes(forest, data.features, backend).astype(np.int64)
    oob = (forest.inbag == 0).astype(np.int64)
    return votes * oob, oob


def oob_proba(forest, data, backend=None):
    """Out-of-bag vote fraction per training row; NaN where every tree saw the row."""
    pos, oob = _oob_parts(forest, data, backend)
    count = oob.sum(axis=0)
    out = np.full(data.n, np.nan)
    has = count > 0
    out[has] = pos.sum(axis=0)[has] / count[has]
    return out


def oob_error_curve(forest, data, backend=None):
    """``(t, error)`` for each prefix of t trees, majority vote at 0.5.

    The error is taken over rows left out by at least one of the first t trees.
    """
    pos, oob = _oob_parts(forest, data, backend)
    cpos = np.cumsum(pos, axis=0)
    ccount = np.cumsum(oob, axis=0)
    y = data.labels
    curve = []
    for t in range(forest.n_trees):
        has = ccount[t] > 0
        if not has.any():
            curve.append((t + 1, float("nan")))
            continue
        pred = cpos[t, has] / ccount[t, has] > 0.5
        curve.append((t + 1, float(np.mean(pred != (y[has] == 1)))))
    return curve


def forest_to_dict(forest):
    return {
        "config": asdict(forest.config),
        "n_features": forest.n_features,
        "feature_names": list(forest.feature_names),
        "trees": [t.to_nodes() for t in forest.trees],
        "inbag": forest.inbag.tolist(),
    }


def forest_from_dict(doc):
    cfg = ForestConfig(**doc["config"])
    trees = tuple(DecisionTree.from_nodes(nodes) for nodes in doc["trees"])
    inbag = np.array(doc["inbag"], dtype=np.int64)
    return ForestModel(trees, inbag, cfg, int(doc["n_features"]), tuple(doc.get("feature_names", ())))


def dumps(forest):
    return json.dumps(forest_to_dict(forest), separators=(",", ":"))


def save_forest(path, forest):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(forest))
        fh.write("\n")


def load_forest(path):
    with open(path, encoding="utf-8") as fh:
        return forest_from_dict(json.load(fh))
