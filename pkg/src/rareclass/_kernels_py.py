"""Pure numpy implementations of the hot kernels.

Every function here has a compiled twin in ``_kernels.pyx`` that must return
bit-identical results; the arithmetic is written so that both perform the same
IEEE operations in the same order.
"""

import numpy as np

NAME = "python"


def best_split(X, y, rows, order, mtry):
    """Best Gini split of ``rows`` over up to ``mtry`` non-constant features.

    Features are visited in ``order``; constant ones are skipped without
    counting towards ``mtry``.  The split score is
    ``l1*l0/nl + r1*r0/nr`` (half the size-weighted Gini times the node size),
    minimised over midpoints between consecutive distinct values.  Ties go to
    the lowest feature index, then the lowest threshold.

    Returns ``(feature, threshold, score)``; feature is -1 when no feature
    varies inside the node.
    """
    rows = np.asarray(rows, dtype=np.intp)
    m = rows.shape[0]
    ysub = y[rows].astype(np.int64)
    n1 = int(ysub.sum())
    best_f, best_t, best_s = -1, np.nan, np.inf
    nl_all = np.arange(1, m, dtype=np.int64)
    visited = 0
    for f in order:
        if visited >= mtry:
            break
        f = int(f)
        v = X[rows, f]
        idx = np.argsort(v, kind="stable")
        vs = v[idx]
        if not vs[0] < vs[-1]:
            continue
        visited += 1
        cl1 = np.cumsum(ysub[idx])[:-1]
        cand = np.flatnonzero(vs[:-1] < vs[1:])
        nl = nl_all[cand]
        l1 = cl1[cand]
        l0 = nl - l1
        nr = m - nl
        r1 = n1 - l1
        r0 = nr - r1
        sc = (l1 * l0) / nl + (r1 * r0) / nr
        j = int(np.argmin(sc))
        s = float(sc[j])
        if s < best_s or (s == best_s and f < best_f):
            pos = cand[j]
            a, b = float(vs[pos]), float(vs[pos + 1])
            t = (a + b) * 0.5
            if not (a < t <= b):
                t = b
            best_f, best_t, best_s = f, t, s
    return best_f, best_t, best_s


def apply_tree(X, feature, threshold, left, right):
    """Leaf index reached by every row of ``X``."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.intp)
    active = np.arange(n)
    while active.size:
        f = feature[node[active]]
        active = active[f >= 0]
        if not active.size:
            break
        nd = node[active]
        go_left = X[active, feature[nd]] < threshold[nd]
        node[active] = np.where(go_left, left[nd], right[nd])
    return node


def kendall_counts(a, b):
    """Pair tallies ``(S, ties_a, ties_b)`` over all i < j.

    ``S`` is concordant minus discordant pairs; ``ties_a`` / ``ties_b`` count
    pairs tied in ``a`` / ``b`` (pairs tied in both count in each).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    s = ta = tb = 0
    for i in range(a.shape[0] - 1):
        da = np.sign(a[i + 1:] - a[i]).astype(np.int64)
        db = np.sign(b[i + 1:] - b[i]).astype(np.int64)
        s += int(np.dot(da, db))
        ta += int(np.count_nonzero(da == 0))
        tb += int(np.count_nonzero(db == 0))
    return s, ta, tb
