"""Empirical and expected verification risks.

Plain risks on true labels, noise-corrected risks on pseudo-labels, the
alpha-mix of the two, and Monte-Carlo expected risks on freshly drawn pair
oracles.  Empirical means are accumulated exactly (integer counts or fsum),
so identities like "risk of h plus risk of its flip equals M" survive float
arithmetic when the sample count is a power of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import DomainSpec, PairSet, PairStrategy, draw_pair_process
from .errors import ConfigurationError, EmptyInputError
from .noise import NoiseModel, corrected_costs, zero_m_costs, zero_m_loss
from .stumps import StumpHypothesis, erm

__all__ = [
    "RiskConfig",
    "zero_m_loss",
    "empirical_risk_true",
    "empirical_risk_source",
    "corrected_empirical_risk_target",
    "source_guided_risk",
    "empirical_disagreement",
    "expected_risk",
    "fit_plain",
    "fit_target_corrected",
    "fit_source_guided",
]


@dataclass(frozen=True)
class RiskConfig:
    """Loss bound M plus the alpha/beta mixing knobs.

    alpha mixes corrected-target against source risk; beta is the fraction
    of the m training pairs drawn from the target domain.
    """

    big_m: float
    alpha: float = 0.5
    beta: float = 0.5

    def __post_init__(self):
        if not self.big_m > 0:
            raise ConfigurationError(f"big_m must be positive, got {self.big_m}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise ConfigurationError(f"beta must lie in (0, 1), got {self.beta}")

    def split_m(self, m: int) -> tuple[int, int]:
        """(target count, source count) for a total budget of m pairs."""
        m_target = int(round(self.beta * m))
        m_source = m - m_target
        if m_target < 1 or m_source < 1:
            raise ConfigurationError(f"m={m} leaves an empty split at beta={self.beta}")
        return m_target, m_source

    def to_dict(self) -> dict:
        return {"big_m": self.big_m, "alpha": self.alpha, "beta": self.beta}

    @staticmethod
    def from_dict(d: dict) -> "RiskConfig":
        return RiskConfig(float(d["big_m"]), float(d["alpha"]), float(d["beta"]))


def empirical_risk_true(hypothesis, pairs: PairSet, big_m: float) -> float:
    """Mean 0-M loss against true labels; exact (M * miss count / n)."""
    if len(pairs) == 0:
        raise EmptyInputError("empirical risk needs at least one pair")
    pred = hypothesis.predict(pairs.similarity)
    misses = int(np.count_nonzero(pred != pairs.true_labels))
    return big_m * misses / len(pairs)


# The source empirical risk is the plain true-label risk; the same function
# serves oracle target sets, which also carry true labels.
empirical_risk_source = empirical_risk_true


def corrected_empirical_risk_target(hypothesis, pairs: PairSet, big_m: float,
                                    model: NoiseModel) -> float:
    """Mean corrected loss against pseudo-labels; may be negative."""
    if len(pairs) == 0:
        raise EmptyInputError("corrected risk needs at least one pair")
    if not pairs.has_pseudo:
        raise ValueError("corrected risk needs pseudo labels on every pair")
    pred = hypothesis.predict(pairs.similarity)
    cost_pos, cost_neg = corrected_costs(pairs.pseudo_labels, big_m, model)
    losses = np.where(pred == 1, cost_pos, cost_neg)
    return math.fsum(losses.tolist()) / len(pairs)


def source_guided_risk(hypothesis, source_pairs: PairSet, target_pairs: PairSet,
                       cfg: RiskConfig, model: NoiseModel) -> float:
    """alpha * corrected target risk + (1 - alpha) * source risk."""
    target = corrected_empirical_risk_target(hypothesis, target_pairs, cfg.big_m, model)
    source = empirical_risk_source(hypothesis, source_pairs, cfg.big_m)
    return cfg.alpha * target + (1.0 - cfg.alpha) * source


def empirical_disagreement(h, h_prime, feats: np.ndarray, big_m: float) -> float:
    """Mean 0-M loss between two hypotheses on a shared feature set."""
    x = np.asarray(feats, float)
    if len(x) == 0:
        raise EmptyInputError("empirical_disagreement needs at least one point")
    n_diff = int(np.count_nonzero(h.predict(x) != h_prime.predict(x)))
    return big_m * n_diff / len(x)


def expected_risk(hypothesis, spec: DomainSpec, strategy: PairStrategy,
                  big_m: float, oracle_n: int = 100_000, rng_seed: int = 0
                  ) -> tuple[float, float]:
    """Monte-Carlo target/source expected risk with its standard error.

    Draws oracle_n fresh i.i.d. pairs from the domain's pair process; the
    estimate is exact given the draw (M * miss count / n), the standard
    error is the ddof=1 binomial one.  Deterministic in (spec.seed,
    rng_seed), so two calls with equal arguments agree bit-for-bit.
    """
    if oracle_n < 10_000:
        raise ConfigurationError(f"oracle_n must be at least 10000, got {oracle_n}")
    _, pairs = draw_pair_process(spec, strategy, oracle_n, rng_seed)
    pred = hypothesis.predict(pairs.similarity)
    misses = int(np.count_nonzero(pred != pairs.true_labels))
    p_hat = misses / oracle_n
    estimate = big_m * misses / oracle_n
    stderr = big_m * math.sqrt(p_hat * (1.0 - p_hat) / (oracle_n - 1))
    return estimate, stderr


def fit_plain(pairs: PairSet, big_m: float) -> tuple[StumpHypothesis, float]:
    """Exact ERM on true labels; returns (stump, mean 0-M risk)."""
    if len(pairs) == 0:
        raise EmptyInputError("fit_plain needs at least one pair")
    cost_pos, cost_neg = zero_m_costs(pairs.true_labels, big_m)
    h, total = erm(pairs.similarity, cost_pos, cost_neg)
    return h, total / len(pairs)


def fit_target_corrected(pairs: PairSet, big_m: float, model: NoiseModel
                         ) -> tuple[StumpHypothesis, float]:
    """Exact ERM on the corrected loss; returns (stump, mean corrected risk)."""
    if len(pairs) == 0:
        raise EmptyInputError("fit_target_corrected needs at least one pair")
    if not pairs.has_pseudo:
        raise ValueError("fit_target_corrected needs pseudo labels")
    cost_pos, cost_neg = corrected_costs(pairs.pseudo_labels, big_m, model)
    h, total = erm(pairs.similarity, cost_pos, cost_neg)
    return h, total / len(pairs)


def fit_source_guided(source_pairs: PairSet, target_pairs: PairSet,
                      cfg: RiskConfig, model: NoiseModel
                      ) -> tuple[StumpHypothesis, float]:
    """Exact ERM on the alpha-weighted objective.

    Per-point costs are scaled by alpha/n_T (corrected, target) and
    (1-alpha)/n_S (plain, source) so the summed ERM objective equals the
    source-guided empirical risk.
    """
    if len(source_pairs) == 0 or len(target_pairs) == 0:
        raise EmptyInputError("fit_source_guided needs pairs from both domains")
    if source_pairs.feature_dim != target_pairs.feature_dim:
        raise ConfigurationError("source and target pairs disagree on feature_dim")
    t_pos, t_neg = corrected_costs(target_pairs.pseudo_labels, cfg.big_m, model)
    s_pos, s_neg = zero_m_costs(source_pairs.true_labels, cfg.big_m)
    w_t = cfg.alpha / len(target_pairs)
    w_s = (1.0 - cfg.alpha) / len(source_pairs)
    feats = np.vstack([target_pairs.similarity, source_pairs.similarity])
    cost_pos = np.concatenate([w_t * t_pos, w_s * s_pos])
    cost_neg = np.concatenate([w_t * t_neg, w_s * s_neg])
    return erm(feats, cost_pos, cost_neg)
