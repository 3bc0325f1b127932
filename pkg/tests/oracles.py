"""Independent brute-force references the fast implementations are tested
against.

Everything here favors obviousness over speed: exhaustive enumeration,
double loops, and exact summation.  None of it imports the modules under
test beyond plain data types.
"""

from __future__ import annotations

import math

import numpy as np

from pseudobound import StumpHypothesis


def candidate_thresholds(xs: np.ndarray) -> np.ndarray:
    """Midpoints of consecutive distinct sorted values plus both infinities."""
    vals = np.unique(xs)
    mids = 0.5 * (vals[:-1] + vals[1:])
    return np.concatenate(([-np.inf], mids, [np.inf]))


def erm_grid_oracle(feats: np.ndarray, cost_pos: np.ndarray,
                    cost_neg: np.ndarray) -> float:
    """Minimum stump cost by scoring every (coordinate, threshold, sign)."""
    x = np.asarray(feats, float)
    best = math.inf
    for j in range(x.shape[1]):
        for t in candidate_thresholds(x[:, j]):
            above = x[:, j] > t
            for s in (1, -1):
                pred_pos = above if s == 1 else ~above
                cost = math.fsum(np.where(pred_pos, cost_pos, cost_neg).tolist())
                best = min(best, cost)
    return best


def all_stumps(feats: np.ndarray) -> list:
    """Every behaviorally distinct stump on the given feature set."""
    x = np.asarray(feats, float)
    stumps = []
    for j in range(x.shape[1]):
        for t in candidate_thresholds(x[:, j]):
            for s in (1, -1):
                stumps.append(StumpHypothesis(j, float(t), s))
    return stumps


def h_delta_h_oracle(source_feats: np.ndarray,
                     target_feats: np.ndarray) -> float:
    """2 max over stump pairs of |Pr_S[h != h'] - Pr_T[h != h']|.

    Candidate thresholds come from the pooled values, where every empirical
    disagreement probability is realized.  Disagreement counts fall out of
    the +-1 prediction Gram matrix: predictions agree minus disagree equals
    the inner product.
    """
    sf = np.asarray(source_feats, float)
    tf = np.asarray(target_feats, float)
    stumps = all_stumps(np.vstack([sf, tf]))
    pred_s = np.stack([h.predict(sf) for h in stumps]).astype(np.int64)
    pred_t = np.stack([h.predict(tf) for h in stumps]).astype(np.int64)
    n_s, n_t = len(sf), len(tf)
    dis_s = (n_s - pred_s @ pred_s.T) // 2
    dis_t = (n_t - pred_t @ pred_t.T) // 2
    gap = np.abs(dis_s * n_t - dis_t * n_s)
    return 2.0 * int(gap.max()) / (n_s * n_t)


def dbscan_oracle(points: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    """Density-connectivity closure, written set-theoretically.

    Core points: at least min_pts neighbors within eps (self included,
    boundary inclusive).  Clusters are connected components of the
    core-core neighbor graph, numbered by each component's smallest core
    index; a border point joins the lowest-numbered cluster among its core
    neighbors.  Everything else is noise (-1).
    """
    x = np.atleast_2d(np.asarray(points, float))
    n = len(x)
    d2 = ((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2)
    within = d2 <= eps * eps
    core = within.sum(axis=1) >= min_pts

    comp = {}
    next_id = 0
    for i in range(n):
        if not core[i] or i in comp:
            continue
        stack = [i]
        comp[i] = next_id
        while stack:
            a = stack.pop()
            for b in np.flatnonzero(within[a] & core):
                if b not in comp:
                    comp[int(b)] = next_id
                    stack.append(int(b))
        next_id += 1

    labels = np.full(n, -1, dtype=int)
    for i, c in comp.items():
        labels[i] = c
    for i in range(n):
        if core[i]:
            continue
        owners = [comp[int(j)] for j in np.flatnonzero(within[i] & core)]
        if owners:
            labels[i] = min(owners)
    return labels


def mmd_oracle(x: np.ndarray, y: np.ndarray, sigma: float) -> float:
    """Biased-statistic MMD^2 as three explicit double loops."""
    x = np.atleast_2d(np.asarray(x, float))
    y = np.atleast_2d(np.asarray(y, float))

    def block(a, b):
        terms = []
        for u in a:
            for v in b:
                d2 = float(((u - v) ** 2).sum())
                terms.append(math.exp(-d2 / (2.0 * sigma * sigma)))
        return math.fsum(terms) / (len(a) * len(b))

    return block(x, x) + block(y, y) - 2.0 * block(x, y)
