"""Generalization-bound assembly and its Monte-Carlo validation.

The bound reads

    eps_T(h_hat) <= eps_T(h*_T) + 4 M N C + 2 DD

with a noise term N, a VC complexity term C, and a domain-divergence term
DD.  Two algebraic variants of N circulate for the source share: the
default uses (1-alpha)^2, which matches the Hoeffding denominator of the
concentration check below; the 1-alpha^2 variant is computed alongside and
carried in every report so the two can be compared.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .config import SYNTHETIC, ExperimentConfig
from .discrepancy import h_delta_h_distance, ideal_joint
from .domains import DomainSpec, PairSet, PairStrategy, derive_seed, draw_pair_process
from .errors import ConfigurationError
from .noise import NoiseModel, corrupt_labels
from .risk import (
    RiskConfig,
    empirical_risk_true,
    expected_risk,
    fit_plain,
    fit_source_guided,
    source_guided_risk,
)
from .stumps import HypothesisClassInfo

SQUARED_COMPLEMENT = "squared_complement"      # source share (1 - alpha)^2
COMPLEMENT_OF_SQUARE = "complement_of_square"  # source share 1 - alpha^2
_CONVENTIONS = (SQUARED_COMPLEMENT, COMPLEMENT_OF_SQUARE)

TRIAL_CSV_COLUMNS = ("seed", "N", "C", "DD", "rhs", "eps_T_hat", "violated")

__all__ = [
    "SQUARED_COMPLEMENT",
    "COMPLEMENT_OF_SQUARE",
    "TRIAL_CSV_COLUMNS",
    "BoundInputs",
    "BoundReport",
    "noise_term",
    "complexity_term",
    "dd_term",
    "assemble_bound",
    "Lemma2Report",
    "check_lemma2",
    "ConcentrationRow",
    "default_mu_grid",
    "check_lemma3_concentration",
    "TheoremTrialRow",
    "TheoremValidation",
    "validate_theorem",
    "write_trial_csv",
]


@dataclass(frozen=True)
class BoundInputs:
    """Everything the right-hand side needs, validated on construction."""

    alpha: float
    beta: float
    m: int
    d: int
    delta: float
    big_m: float
    rho_neg: float
    rho_pos: float
    h_delta_h: float
    ideal_joint_error: float
    epsilon_t_star: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise ConfigurationError(f"beta must lie in (0, 1), got {self.beta}")
        if self.m < 2:
            raise ConfigurationError(f"m must be >= 2, got {self.m}")
        if self.d < 1:
            raise ConfigurationError(f"d must be >= 1, got {self.d}")
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.big_m > 0:
            raise ConfigurationError(f"big_m must be positive, got {self.big_m}")
        NoiseModel(self.rho_neg, self.rho_pos)  # raises InvalidNoiseError
        if not 0.0 <= self.h_delta_h <= 2.0:
            raise ConfigurationError("h_delta_h must lie in [0, 2]")
        if self.ideal_joint_error < 0:
            raise ConfigurationError("ideal_joint_error must be nonnegative")
        if not math.isfinite(self.epsilon_t_star):
            raise ConfigurationError("epsilon_t_star must be finite")

    @property
    def rho_sum(self) -> float:
        return self.rho_neg + self.rho_pos

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha, "beta": self.beta, "m": self.m, "d": self.d,
            "delta": self.delta, "big_m": self.big_m,
            "rho_neg": self.rho_neg, "rho_pos": self.rho_pos,
            "h_delta_h": self.h_delta_h,
            "ideal_joint_error": self.ideal_joint_error,
            "epsilon_t_star": self.epsilon_t_star,
        }

    @staticmethod
    def from_dict(d: dict) -> "BoundInputs":
        return BoundInputs(
            alpha=float(d["alpha"]), beta=float(d["beta"]), m=int(d["m"]),
            d=int(d["d"]), delta=float(d["delta"]), big_m=float(d["big_m"]),
            rho_neg=float(d["rho_neg"]), rho_pos=float(d["rho_pos"]),
            h_delta_h=float(d["h_delta_h"]),
            ideal_joint_error=float(d["ideal_joint_error"]),
            epsilon_t_star=float(d["epsilon_t_star"]),
        )


def noise_term(alpha: float, beta: float, denominator: float,
               convention: str = SQUARED_COMPLEMENT) -> float:
    """N = sqrt(4 a^2 / (b (1-rho_sum)^2) + source_share / (1-b))."""
    if convention not in _CONVENTIONS:
        raise ConfigurationError(f"unknown noise-term convention {convention!r}")
    if convention == SQUARED_COMPLEMENT:
        source_share = (1.0 - alpha) ** 2
    else:
        source_share = 1.0 - alpha ** 2
    return math.sqrt(
        4.0 * alpha ** 2 / (beta * denominator ** 2) + source_share / (1.0 - beta)
    )


def complexity_term(m: int, d: int, delta: float) -> float:
    """C = sqrt((2 d log(2(m+1)) + 2 log(8/delta)) / m)."""
    return math.sqrt((2.0 * d * math.log(2.0 * (m + 1)) + 2.0 * math.log(8.0 / delta)) / m)


def dd_term(alpha: float, big_m: float, h_delta_h: float,
            ideal_joint_error: float) -> float:
    """DD = (1-alpha) ((M/2) d_HdH + joint error); zero at alpha = 1."""
    return (1.0 - alpha) * (0.5 * big_m * h_delta_h + ideal_joint_error)


@dataclass(frozen=True)
class BoundReport:
    inputs: BoundInputs
    convention: str
    noise_term: float
    complexity_term: float
    dd_term: float
    rhs: float
    noise_term_alt: float
    rhs_alt: float
    convention_alt: str

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs.to_dict(),
            "convention": self.convention,
            "noise_term": self.noise_term,
            "complexity_term": self.complexity_term,
            "dd_term": self.dd_term,
            "rhs": self.rhs,
            "noise_term_alt": self.noise_term_alt,
            "rhs_alt": self.rhs_alt,
            "convention_alt": self.convention_alt,
        }


def assemble_bound(inputs: BoundInputs,
                   convention: str = SQUARED_COMPLEMENT) -> BoundReport:
    """rhs = eps*_T + 4 M N C + 2 DD, with both N conventions reported."""
    if convention not in _CONVENTIONS:
        raise ConfigurationError(f"unknown noise-term convention {convention!r}")
    other = (COMPLEMENT_OF_SQUARE if convention == SQUARED_COMPLEMENT
             else SQUARED_COMPLEMENT)
    denom = NoiseModel(inputs.rho_neg, inputs.rho_pos).denominator
    n_main = noise_term(inputs.alpha, inputs.beta, denom, convention)
    n_alt = noise_term(inputs.alpha, inputs.beta, denom, other)
    c = complexity_term(inputs.m, inputs.d, inputs.delta)
    dd = dd_term(inputs.alpha, inputs.big_m, inputs.h_delta_h,
                 inputs.ideal_joint_error)
    rhs = inputs.epsilon_t_star + 4.0 * inputs.big_m * n_main * c + 2.0 * dd
    rhs_alt = inputs.epsilon_t_star + 4.0 * inputs.big_m * n_alt * c + 2.0 * dd
    return BoundReport(
        inputs=inputs, convention=convention, noise_term=n_main,
        complexity_term=c, dd_term=dd, rhs=rhs,
        noise_term_alt=n_alt, rhs_alt=rhs_alt, convention_alt=other,
    )


@dataclass(frozen=True)
class Lemma2Report:
    """|eps_alpha - eps_T| against (1-alpha)((M/2) d_hat + lambda_hat)."""

    lhs: float
    rhs: float
    holds: bool
    slack: float
    eps_source: float
    eps_target: float
    h_delta_h: float
    ideal_joint_error: float

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds,
            "slack": self.slack, "eps_source": self.eps_source,
            "eps_target": self.eps_target, "h_delta_h": self.h_delta_h,
            "ideal_joint_error": self.ideal_joint_error,
        }


def check_lemma2(h, spec_source: DomainSpec, spec_target: DomainSpec,
                 alpha: float, big_m: float, oracle_n: int = 100_000,
                 rng_seed: int = 0, strategy: PairStrategy | None = None,
                 gap_n: int = 1024) -> Lemma2Report:
    """Monte-Carlo check of the alpha-mix risk deviation bound.

    lhs = |eps_alpha(h) - eps_T(h)| = (1-alpha) |eps_S - eps_T| from
    expected risks on oracle_n pairs per domain; rhs uses the empirical
    class distance and joint error measured on gap_n-pair draws.  holds
    allows 3 combined standard errors of slack.
    """
    if strategy is None:
        strategy = PairStrategy.balanced(3)
    eps_t, se_t = expected_risk(h, spec_target, strategy, big_m, oracle_n,
                                derive_seed(rng_seed, 1))
    eps_s, se_s = expected_risk(h, spec_source, strategy, big_m, oracle_n,
                                derive_seed(rng_seed, 2))
    lhs = (1.0 - alpha) * abs(eps_s - eps_t)
    _, src_gap = draw_pair_process(spec_source, strategy, gap_n,
                                   derive_seed(rng_seed, 3))
    _, tgt_gap = draw_pair_process(spec_target, strategy, gap_n,
                                   derive_seed(rng_seed, 4))
    info = HypothesisClassInfo(src_gap.feature_dim)
    d_hat = h_delta_h_distance(src_gap.similarity, tgt_gap.similarity, info)
    _, lam = ideal_joint(src_gap, tgt_gap, big_m)
    rhs = dd_term(alpha, big_m, d_hat, lam)
    slack = 3.0 * (1.0 - alpha) * math.hypot(se_s, se_t)
    return Lemma2Report(
        lhs=lhs, rhs=rhs, holds=lhs <= rhs + slack, slack=slack,
        eps_source=eps_s, eps_target=eps_t, h_delta_h=d_hat,
        ideal_joint_error=lam,
    )


@dataclass(frozen=True)
class ConcentrationRow:
    mu: float
    empirical_prob: float
    hoeffding_rhs: float
    holds: bool

    def to_dict(self) -> dict:
        return {
            "mu": self.mu, "empirical_prob": self.empirical_prob,
            "hoeffding_rhs": self.hoeffding_rhs, "holds": self.holds,
        }


def default_mu_grid() -> np.ndarray:
    return np.linspace(0.02, 0.2, 10)


def hoeffding_rhs(mu: float, m: int, cfg: RiskConfig, model: NoiseModel) -> float:
    """2 exp(-2 m mu^2 / (4 M^2 a^2/(b denom^2) + M^2 (1-a)^2/(1-b)))."""
    variance_proxy = (
        4.0 * cfg.big_m ** 2 * cfg.alpha ** 2 / (cfg.beta * model.denominator ** 2)
        + cfg.big_m ** 2 * (1.0 - cfg.alpha) ** 2 / (1.0 - cfg.beta)
    )
    return 2.0 * math.exp(-2.0 * m * mu * mu / variance_proxy)


def _draw_training(config: ExperimentConfig, trial_entropy: int,
                   iteration: int = 0):
    """One m-sample training draw: i.i.d. pairs, target labels corrupted.

    Sub-seeds: 1 = target pair draw, 2 = corruption (iteration-dependent),
    3 = source pair draw.  Both the concentration check and the theorem
    trials consume exactly this chain, so their draws are comparable.
    """
    m_t, m_s = config.risk.split_m(config.m_train)
    _, tgt = draw_pair_process(config.target, config.strategy, m_t,
                               derive_seed(trial_entropy, 1))
    tgt = corrupt_labels(tgt, config.noise.model,
                         derive_seed(trial_entropy, 2, iteration))
    _, src = draw_pair_process(config.source, config.strategy, m_s,
                               derive_seed(trial_entropy, 3))
    return src, tgt


def check_lemma3_concentration(h, config: ExperimentConfig, mu_grid=None,
                               trials: int = 5000, rng_seed: int = 0
                               ) -> list[ConcentrationRow]:
    """Exceedance frequencies of |eps_hat_alpha(h) - eps_alpha(h)| vs. Hoeffding.

    h stays fixed; each trial redraws the m-sample training set (target
    labels freshly corrupted) and evaluates the alpha-mix empirical risk.
    The population center comes from a large oracle draw.  Requires
    synthetic noise mode so the rates entering the denominator are exact.
    """
    if config.noise.kind != SYNTHETIC:
        raise ConfigurationError("concentration check needs synthetic noise mode")
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    mu_grid = default_mu_grid() if mu_grid is None else np.asarray(mu_grid, float)
    cfg, model = config.risk, config.noise.model
    center_n = 1 << 17
    eps_t, _ = expected_risk(h, config.target, config.strategy, cfg.big_m,
                             center_n, derive_seed(rng_seed, 1))
    eps_s, _ = expected_risk(h, config.source, config.strategy, cfg.big_m,
                             center_n, derive_seed(rng_seed, 2))
    center = cfg.alpha * eps_t + (1.0 - cfg.alpha) * eps_s
    devs = np.empty(trials)
    for t in range(trials):
        src, tgt = _draw_training(config, derive_seed(rng_seed, t))
        devs[t] = abs(source_guided_risk(h, src, tgt, cfg, model) - center)
    rows = []
    for mu in mu_grid:
        empirical = float(np.count_nonzero(devs >= mu) / trials)
        rhs = hoeffding_rhs(float(mu), config.m_train, cfg, model)
        slack = 3.0 * math.sqrt(max(rhs * (1.0 - rhs), 0.0) / trials)
        holds = rhs >= 1.0 or empirical <= rhs + slack
        rows.append(ConcentrationRow(float(mu), empirical, rhs, holds))
    return rows


@dataclass(frozen=True)
class TheoremTrialRow:
    seed: int
    noise_term: float
    complexity_term: float
    dd_term: float
    rhs: float
    eps_t_hat: float
    violated: bool
    rhs_alt: float
    violated_alt: bool

    def to_dict(self) -> dict:
        return {
            "seed": self.seed, "noise_term": self.noise_term,
            "complexity_term": self.complexity_term, "dd_term": self.dd_term,
            "rhs": self.rhs, "eps_t_hat": self.eps_t_hat,
            "violated": self.violated, "rhs_alt": self.rhs_alt,
            "violated_alt": self.violated_alt,
        }


@dataclass(frozen=True)
class TheoremValidation:
    violation_rate: float
    violation_rate_alt: float
    rows: list
    report: BoundReport

    def to_dict(self) -> dict:
        return {
            "violation_rate": self.violation_rate,
            "violation_rate_alt": self.violation_rate_alt,
            "rows": [r.to_dict() for r in self.rows],
            "report": self.report.to_dict(),
        }


def oracle_bound_inputs(config: ExperimentConfig, rng_seed: int
                        ) -> tuple[BoundInputs, PairSet]:
    """Estimate the bound's oracle quantities once for a configuration.

    Sub-seeds: 4 = target oracle pairs, 5 = source oracle pairs,
    6/7 = target/source class-distance draws.  Returns the inputs plus the
    target oracle pair set trials evaluate against.
    """
    cfg, model = config.risk, config.noise.model
    _, oracle_t = draw_pair_process(config.target, config.strategy,
                                    config.oracle_pairs, derive_seed(rng_seed, 4))
    _, oracle_s = draw_pair_process(config.source, config.strategy,
                                    config.oracle_pairs, derive_seed(rng_seed, 5))
    _, gap_t = draw_pair_process(config.target, config.strategy,
                                 config.discrepancy_sample, derive_seed(rng_seed, 6))
    _, gap_s = draw_pair_process(config.source, config.strategy,
                                 config.discrepancy_sample, derive_seed(rng_seed, 7))
    info = HypothesisClassInfo(oracle_t.feature_dim)
    _, eps_star = fit_plain(oracle_t, cfg.big_m)
    d_hat = h_delta_h_distance(gap_s.similarity, gap_t.similarity, info)
    _, lam = ideal_joint(oracle_s, oracle_t, cfg.big_m)
    inputs = BoundInputs(
        alpha=cfg.alpha, beta=cfg.beta, m=config.m_train, d=info.vc_dimension,
        delta=config.delta, big_m=cfg.big_m,
        rho_neg=model.rho_neg, rho_pos=model.rho_pos,
        h_delta_h=d_hat, ideal_joint_error=lam, epsilon_t_star=eps_star,
    )
    return inputs, oracle_t


def validate_theorem(config: ExperimentConfig, trials: int = 500,
                     rng_seed: int = 0,
                     convention: str = SQUARED_COMPLEMENT) -> TheoremValidation:
    """Fraction of fresh-draw trials whose achieved target risk beats the rhs.

    Oracle quantities (eps*_T, class distance, joint error) are estimated
    once per call on dedicated large draws; each trial then redraws the
    training set with fresh corruption, fits the alpha-weighted exact ERM,
    and scores it on the shared target oracle set.  The contract is
    violation_rate <= delta.  Toggles are ignored here: this path always
    trains the alpha-weighted stump ERM that the bound speaks about.
    """
    if config.noise.kind != SYNTHETIC:
        raise ConfigurationError("theorem validation needs synthetic noise mode")
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    cfg, model = config.risk, config.noise.model
    inputs, oracle_t = oracle_bound_inputs(config, rng_seed)
    report = assemble_bound(inputs, convention)
    rows = []
    for t in range(trials):
        trial_entropy = derive_seed(rng_seed, t)
        src, tgt = _draw_training(config, trial_entropy)
        h_hat, _ = fit_source_guided(src, tgt, cfg, model)
        eps_hat = empirical_risk_true(h_hat, oracle_t, cfg.big_m)
        rows.append(TheoremTrialRow(
            seed=trial_entropy,
            noise_term=report.noise_term,
            complexity_term=report.complexity_term,
            dd_term=report.dd_term,
            rhs=report.rhs,
            eps_t_hat=eps_hat,
            violated=eps_hat > report.rhs,
            rhs_alt=report.rhs_alt,
            violated_alt=eps_hat > report.rhs_alt,
        ))
    rate = sum(r.violated for r in rows) / trials
    rate_alt = sum(r.violated_alt for r in rows) / trials
    return TheoremValidation(rate, rate_alt, rows, report)


def _fmt(x) -> str:
    return f"{x:.9g}"


def write_trial_csv(rows, fileobj) -> None:
    """One row per trial: seed, N, C, DD, rhs, eps_T_hat, violated."""
    writer = csv.writer(fileobj)
    writer.writerow(TRIAL_CSV_COLUMNS)
    for r in rows:
        writer.writerow([
            str(r.seed), _fmt(r.noise_term), _fmt(r.complexity_term),
            _fmt(r.dd_term), _fmt(r.rhs), _fmt(r.eps_t_hat),
            "1" if r.violated else "0",
        ])
