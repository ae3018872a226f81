"""Binary classification trees with axis-aligned ``x_j < T`` splits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .. import kernels
from ..errors import EmptyNodeError


def gini(count_neg, count_pos):
    total = count_neg + count_pos
    if total <= 0:
        raise EmptyNodeError("Gini impurity of an empty node is undefined")
    q = count_pos / total
    return 2.0 * q * (1.0 - q)


class Split(NamedTuple):
    feature: int
    threshold: float
    impurity: float  # size-weighted child Gini


def best_split(X, y, rows=None, candidate_features=None, backend=None):
    """Exhaustive midpoint search over ``candidate_features`` for ``rows``.

    Returns a :class:`Split` or ``None`` when every candidate is constant.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int8)
    rows = np.arange(X.shape[0]) if rows is None else np.asarray(rows, dtype=np.intp)
    feats = np.arange(X.shape[1]) if candidate_features is None else np.asarray(candidate_features, dtype=np.intp)
    f, t, s = kernels.get(backend).best_split(X, y, rows, feats, len(feats))
    if f < 0:
        return None
    return Split(int(f), float(t), 2.0 * s / rows.shape[0])


@dataclass(frozen=True)
class Leaf:
    count_neg: int
    count_pos: int

    @property
    def vote(self):
        return 1 if self.count_pos >= self.count_neg else 0


@dataclass(frozen=True)
class SplitNode:
    feature_index: int
    threshold: float
    left: Union["SplitNode", Leaf]
    right: Union["SplitNode", Leaf]
    count_neg: int
    count_pos: int


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Flat pre-order node arrays; ``feature == -1`` marks a leaf.

    Node 0 is the root.  Internal nodes send ``x[feature] < threshold`` to
    ``left`` and everything else to ``right``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    n0: np.ndarray
    n1: np.ndarray
    left: np.ndarray
    right: np.ndarray
    depth: int

    @property
    def node_count(self):
        return int(self.feature.shape[0])

    @property
    def votes(self):
        # leaf majority class, ties vote positive
        return (self.n1 >= self.n0).astype(np.int8)

    @property
    def root(self):
        return self.node(0)

    def node(self, i):
        if self.feature[i] < 0:
            return Leaf(int(self.n0[i]), int(self.n1[i]))
        return SplitNode(int(self.feature[i]), float(self.threshold[i]),
                         self.node(int(self.left[i])), self.node(int(self.right[i])),
                         int(self.n0[i]), int(self.n1[i]))

    def apply(self, X, backend=None):
        X = np.ascontiguousarray(X, dtype=np.float64)
        return kernels.get(backend).apply_tree(X, self.feature, self.threshold, self.left, self.right)

    def __eq__(self, other):
        if not isinstance(other, DecisionTree):
            return NotImplemented
        return self.depth == other.depth and all(
            np.array_equal(getattr(self, k), getattr(other, k), equal_nan=(k == "threshold"))
            for k in ("feature", "threshold", "n0", "n1", "left", "right"))

    def to_nodes(self):
        out = []
        for i in range(self.node_count):
            leaf = self.feature[i] < 0
            out.append({
                "feature": None if leaf else int(self.feature[i]),
                "threshold": None if leaf else float(self.threshold[i]),
                "n0": int(self.n0[i]),
                "n1": int(self.n1[i]),
                "left": None if leaf else int(self.left[i]),
                "right": None if leaf else int(self.right[i]),
            })
        return out

    @classmethod
    def from_nodes(cls, nodes):
        feature = np.array([-1 if d["feature"] is None else d["feature"] for d in nodes], dtype=np.int32)
        threshold = np.array([np.nan if d["threshold"] is None else d["threshold"] for d in nodes],
                             dtype=np.float64)
        left = np.array([-1 if d["left"] is None else d["left"] for d in nodes], dtype=np.int32)
        right = np.array([-1 if d["right"] is None else d["right"] for d in nodes], dtype=np.int32)
        n0 = np.array([d["n0"] for d in nodes], dtype=np.int64)
        n1 = np.array([d["n1"] for d in nodes], dtype=np.int64)
        return cls(feature, threshold, n0, n1, left, right, _depth(left, right))


def _depth(left, right):
    depth = np.zeros(left.shape[0], dtype=np.int64)
    # pre-order: children always follow their parent
    for i in range(left.shape[0]):
        if left[i] >= 0:
            depth[left[i]] = depth[right[i]] = depth[i] + 1
    return int(depth.max()) if depth.size else 0


def grow_tree(X, y, rows, mtry, rng, min_node_size=1, backend=None):
    """Grow one tree on the multiset ``rows`` of training indices.

    At each node a uniformly random feature order is drawn from ``rng`` and
    the best split over the first ``mtry`` non-constant features is taken.
    Growth stops when the node is pure, has at most ``min_node_size`` rows,
    or no feature varies inside it.
    """
    kern = kernels.get(backend)
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int8)
    p = X.shape[1]
    feature, threshold, n0, n1, left, right = [], [], [], [], [], []
    max_depth = 0
    stack = [(np.asarray(rows, dtype=np.intp), 0, -1, True)]
    while stack:
        node_rows, depth, parent, is_left = stack.pop()
        idx = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = idx
        m = node_rows.shape[0]
        c1 = int(np.count_nonzero(y[node_rows]))
        c0 = m - c1
        feature.append(-1)
        threshold.append(np.nan)
        n0.append(c0)
        n1.append(c1)
        left.append(-1)
        right.append(-1)
        max_depth = max(max_depth, depth)
        if c0 == 0 or c1 == 0 or m <= min_node_size:
            continue
        f, t, _ = kern.best_split(X, y, node_rows, rng.permutation(p), mtry)
        if f < 0:
            continue
        feature[idx] = f
        threshold[idx] = t
        go_left = X[node_rows, f] < t
        # right pushed first so the left subtree is numbered next (pre-order)
        stack.append((node_rows[~go_left], depth + 1, idx, False))
        stack.append((node_rows[go_left], depth + 1, idx, True))
    return DecisionTree(
        np.array(feature, dtype=np.int32),
        np.array(threshold, dtype=np.float64),
        np.array(n0, dtype=np.int64),
        np.array(n1, dtype=np.int64),
        np.array(left, dtype=np.int32),
        np.array(right, dtype=np.int32),
        max_depth,
    )
