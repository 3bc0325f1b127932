"""Domain-gap measurements over the stump class.

The stump-class distance between two empirical feature sets is computed
exactly: every stump-pair disagreement region is either a coordinate slab or
an axis-aligned XOR of two half-spaces, so the supremum reduces to integer
prefix-sum scans.  Source points carry weight +n_T and target points -n_S;
a region's score is then n_S*n_T times the difference of its two empirical
probabilities, and everything stays in int64 until the final division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import AffineMap, SampleSet
from .errors import (
    ConfigurationError,
    EmptyInputError,
    InsufficientDataError,
    NumericError,
)
from .noise import zero_m_costs
from .stumps import HypothesisClassInfo, StumpHypothesis, erm

MEDIAN_HEURISTIC = "median"

__all__ = [
    "MEDIAN_HEURISTIC",
    "DiscrepancyReport",
    "h_delta_h_distance",
    "ideal_joint",
    "median_heuristic_bandwidth",
    "mmd_squared",
    "align_moments",
]


@dataclass(frozen=True)
class DiscrepancyReport:
    """Measured gap quantities for one source/target configuration."""

    h_delta_h: float
    ideal_joint_error: float
    ideal_joint_hypothesis: StumpHypothesis
    mmd_squared_before: float
    mmd_squared_after: float
    kernel_bandwidth: float

    def __post_init__(self):
        if not 0.0 <= self.h_delta_h <= 2.0:
            raise ConfigurationError(f"h_delta_h must lie in [0, 2], got {self.h_delta_h}")
        if self.ideal_joint_error < 0:
            raise ConfigurationError("ideal_joint_error must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "h_delta_h": self.h_delta_h,
            "ideal_joint_error": self.ideal_joint_error,
            "ideal_joint_hypothesis": self.ideal_joint_hypothesis.to_dict(),
            "mmd_squared_before": self.mmd_squared_before,
            "mmd_squared_after": self.mmd_squared_after,
            "kernel_bandwidth": self.kernel_bandwidth,
        }


def _h_delta_h_best(source_feats: np.ndarray, target_feats: np.ndarray) -> int:
    """max over stump pairs of |n_T*(#S in region) - n_S*(#T in region)|.

    Same-coordinate pairs disagree on a value slab, cross-coordinate pairs
    on a half-space XOR; complements score identically because the total
    signed weight is zero, so slabs and XORs cover every case.
    """
    n_s, n_t = len(source_feats), len(target_feats)
    pooled = np.vstack([source_feats, target_feats])
    weights = np.concatenate([
        np.full(n_s, n_t, dtype=np.int64),
        np.full(n_t, -n_s, dtype=np.int64),
    ])
    n, q = pooled.shape

    cut_sums = []    # per coordinate: signed weight below each distinct-value cut
    ranks = []       # per coordinate: distinct-value rank of every point
    best = 0
    for j in range(q):
        order = np.argsort(pooled[:, j], kind="stable")
        xs = pooled[order, j]
        prefix = np.concatenate(([0], np.cumsum(weights[order])))
        interior = np.flatnonzero(xs[1:] > xs[:-1]) + 1
        cuts = np.concatenate(([0], interior, [n]))
        sums = prefix[cuts]
        cut_sums.append(sums)
        uniq, rank = np.unique(pooled[:, j], return_inverse=True)
        ranks.append(rank)
        best = max(best, int(sums.max() - sums.min()))

    for j1 in range(q):
        for j2 in range(j1 + 1, q):
            k1 = len(cut_sums[j1]) - 1
            k2 = len(cut_sums[j2]) - 1
            grid = np.zeros((k1 + 1, k2 + 1), dtype=np.int64)
            np.add.at(grid, (ranks[j1] + 1, ranks[j2] + 1), weights)
            grid = grid.cumsum(axis=0).cumsum(axis=1)
            # weight(below_a XOR below_b) = row(a) + col(b) - 2*grid[a, b]
            xor = grid[:, -1][:, None] + grid[-1, :][None, :] - 2 * grid
            best = max(best, int(np.abs(xor).max()))
    return best


def h_delta_h_distance(source_feats: np.ndarray, target_feats: np.ndarray,
                       class_info: HypothesisClassInfo) -> float:
    """Empirical stump-class distance 2 sup |Pr_S[h != h'] - Pr_T[h != h']|.

    Candidate thresholds are midpoints of consecutive distinct pooled values
    plus +-inf, where the empirical supremum is attained; the value is exact
    for the two empirical distributions.
    """
    sf = np.asarray(source_feats, float)
    tf = np.asarray(target_feats, float)
    if len(sf) == 0 or len(tf) == 0:
        raise EmptyInputError("h_delta_h_distance needs nonempty feature sets")
    if sf.ndim != 2 or tf.ndim != 2 or sf.shape[1] != tf.shape[1]:
        raise ConfigurationError("feature sets must be (n, q) with equal q")
    if sf.shape[1] != class_info.feature_dim:
        raise ConfigurationError("feature sets do not match class_info.feature_dim")
    best = _h_delta_h_best(sf, tf)
    return 2.0 * best / (len(sf) * len(tf))


def ideal_joint(source_pairs, target_pairs, big_m: float
                ) -> tuple[StumpHypothesis, float]:
    """Stump minimizing the summed source + target empirical risks.

    Returns (stump, achieved sum); the sum is the joint-error estimate
    entering the bound's domain-divergence term.
    """
    if len(source_pairs) == 0 or len(target_pairs) == 0:
        raise EmptyInputError("ideal_joint needs pairs from both domains")
    s_pos, s_neg = zero_m_costs(source_pairs.true_labels, big_m)
    t_pos, t_neg = zero_m_costs(target_pairs.true_labels, big_m)
    feats = np.vstack([source_pairs.similarity, target_pairs.similarity])
    cost_pos = np.concatenate([s_pos / len(source_pairs), t_pos / len(target_pairs)])
    cost_neg = np.concatenate([s_neg / len(source_pairs), t_neg / len(target_pairs)])
    return erm(feats, cost_pos, cost_neg)


def median_heuristic_bandwidth(pooled_feats: np.ndarray) -> float:
    """Median pairwise Euclidean distance over distinct index pairs."""
    x = np.atleast_2d(np.asarray(pooled_feats, float))
    n = len(x)
    if n < 2:
        raise InsufficientDataError("median heuristic needs at least two points")
    sq = np.maximum(_cross_sq_dists(x, x), 0.0)
    iu = np.triu_indices(n, k=1)
    return float(np.median(np.sqrt(sq[iu])))


def _cross_sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def mmd_squared(x_feats: np.ndarray, y_feats: np.ndarray,
                bandwidth=MEDIAN_HEURISTIC) -> float:
    """Biased V-statistic MMD^2 with a Gaussian kernel.

    Kernel sums are accumulated with fsum, so multiset-equal inputs give
    exactly 0.0 regardless of row order; tiny negative results from the
    final subtraction are clamped to zero.
    """
    x = np.atleast_2d(np.asarray(x_feats, float))
    y = np.atleast_2d(np.asarray(y_feats, float))
    if len(x) == 0 or len(y) == 0:
        raise EmptyInputError("mmd_squared needs nonempty feature sets")
    if x.shape[1] != y.shape[1]:
        raise ConfigurationError("feature sets must share a dimension")
    if bandwidth == MEDIAN_HEURISTIC:
        sigma = median_heuristic_bandwidth(np.vstack([x, y]))
    else:
        sigma = float(bandwidth)
    if not sigma > 0:
        raise ConfigurationError(f"kernel bandwidth must be positive, got {sigma}")
    scale = -0.5 / (sigma * sigma)

    def mean_kernel(a, b):
        k = np.exp(scale * _cross_sq_dists(a, b))
        return math.fsum(k.ravel().tolist()) / (len(a) * len(b))

    value = mean_kernel(x, x) + mean_kernel(y, y) - 2.0 * mean_kernel(x, y)
    return max(value, 0.0)


def align_moments(source_samples: SampleSet, target_samples: SampleSet
                  ) -> tuple[SampleSet, AffineMap]:
    """Match target mean and covariance to the source by whiten-recolor.

    The returned map is exact for affine shifts: a target that is a linear
    transform plus offset of the source distribution maps back onto it up
    to sampling error.  Covariances are regularized by 1e-6 * trace/q * I.
    """
    src = np.asarray(source_samples.features, float)
    tgt = np.asarray(target_samples.features, float)
    q = src.shape[1]
    if len(tgt) <= q:
        raise InsufficientDataError(
            f"alignment needs more target points ({len(tgt)}) than dimensions ({q})"
        )
    if len(src) <= q:
        raise InsufficientDataError(
            f"alignment needs more source points ({len(src)}) than dimensions ({q})"
        )
    mu_s = src.mean(axis=0)
    mu_t = tgt.mean(axis=0)
    cov_s = np.cov(src, rowvar=False)
    cov_t = np.cov(tgt, rowvar=False)
    matrix = _sqrt_psd(_regularize(cov_s)) @ _invsqrt_psd(_regularize(cov_t))
    offset = mu_s - matrix @ mu_t
    amap = AffineMap(matrix=matrix, offset=offset)
    return target_samples.replace_features(amap.apply(tgt)), amap


def _regularize(cov: np.ndarray) -> np.ndarray:
    q = cov.shape[0]
    eps = 1e-6 * float(np.trace(cov)) / q
    return cov + eps * np.eye(q)


def _sqrt_psd(cov: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(cov)
    if not np.isfinite(w).all():
        raise NumericError("covariance eigendecomposition produced non-finite values")
    return (v * np.sqrt(np.maximum(w, 0.0))) @ v.T


def _invsqrt_psd(cov: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(cov)
    if not np.isfinite(w).all():
        raise NumericError("covariance eigendecomposition produced non-finite values")
    tol = 1e-12 * max(float(w.max()), 1.0)
    if w.min() <= tol:
        raise NumericError("target covariance is singular even after regularization")
    return (v / np.sqrt(w)) @ v.T
