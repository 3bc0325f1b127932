import io
import math

import numpy as np
import pytest

import pseudobound as pb


def worked_inputs(**overrides):
    base = dict(alpha=0.5, beta=0.5, m=1000, d=2, delta=0.1, big_m=1.0,
                rho_neg=0.1, rho_pos=0.1, h_delta_h=0.2,
                ideal_joint_error=0.05, epsilon_t_star=0.0)
    base.update(overrides)
    return pb.BoundInputs(**base)


def test_worked_example_terms():
    report = pb.assemble_bound(worked_inputs())
    assert report.noise_term == pytest.approx(math.sqrt(3.625), abs=1e-12)
    assert report.complexity_term == pytest.approx(
        math.sqrt((4 * math.log(2002) + 2 * math.log(80)) / 1000), abs=1e-12)
    assert report.complexity_term == pytest.approx(0.197918, abs=1e-6)
    assert report.dd_term == pytest.approx(0.075, abs=1e-12)
    # 4 M N C from the two verified factors: 4 * 1.903943 * 0.197918
    assert 4 * report.noise_term * report.complexity_term == \
        pytest.approx(1.507301, abs=1e-5)
    assert report.rhs == pytest.approx(1.507301 + 0.15, abs=1e-5)


def test_alpha_one_endpoint():
    # alpha=1, beta=0.5, rho=0: N = sqrt(8) and DD vanishes
    inputs = worked_inputs(alpha=1.0, rho_neg=0.0, rho_pos=0.0)
    report = pb.assemble_bound(inputs)
    assert report.noise_term == pytest.approx(math.sqrt(8.0), abs=1e-12)
    assert report.dd_term == 0.0
    # both conventions coincide at alpha = 1
    assert report.noise_term_alt == pytest.approx(report.noise_term, abs=1e-12)


def test_noise_term_conventions_differ_at_interior_alpha():
    denom = 0.8
    main = pb.noise_term(0.5, 0.5, denom, pb.SQUARED_COMPLEMENT)
    alt = pb.noise_term(0.5, 0.5, denom, pb.COMPLEMENT_OF_SQUARE)
    assert alt > main  # 1 - a^2 > (1 - a)^2 for a in (0, 1)
    with pytest.raises(pb.ConfigurationError):
        pb.noise_term(0.5, 0.5, denom, "bogus")


def test_complexity_term_decreases_with_m():
    assert pb.complexity_term(2000, 2, 0.1) < pb.complexity_term(1000, 2, 0.1)


def test_bound_inputs_validation():
    with pytest.raises(pb.ConfigurationError):
        worked_inputs(alpha=1.5)
    with pytest.raises(pb.ConfigurationError):
        worked_inputs(beta=1.0)
    with pytest.raises(pb.InvalidNoiseError):
        worked_inputs(rho_neg=0.6, rho_pos=0.5)
    with pytest.raises(pb.ConfigurationError):
        worked_inputs(h_delta_h=2.5)
    with pytest.raises(pb.ConfigurationError):
        worked_inputs(delta=0.0)
    back = pb.BoundInputs.from_dict(worked_inputs().to_dict())
    assert back == worked_inputs()


def test_rhs_monotonicities_on_sweeps():
    base = worked_inputs()
    report = pb.assemble_bound(base)

    def rhs(**kw):
        return pb.assemble_bound(worked_inputs(**kw)).rhs

    rho_vals = [rhs(rho_neg=r, rho_pos=r) for r in np.linspace(0.0, 0.4, 5)]
    assert all(a < b for a, b in zip(rho_vals, rho_vals[1:]))
    d_vals = [rhs(d=d) for d in (1, 2, 3, 4, 5)]
    assert all(a < b for a, b in zip(d_vals, d_vals[1:]))
    gap_vals = [rhs(h_delta_h=g) for g in np.linspace(0.0, 2.0, 5)]
    assert all(a < b for a, b in zip(gap_vals, gap_vals[1:]))
    lam_vals = [rhs(ideal_joint_error=v) for v in np.linspace(0.0, 0.5, 5)]
    assert all(a < b for a, b in zip(lam_vals, lam_vals[1:]))
    m_vals = [rhs(m=m) for m in (250, 500, 1000, 2000, 4000)]
    assert all(a > b for a, b in zip(m_vals, m_vals[1:]))
    assert report.rhs == rhs()


def test_lemma2_alpha_one_trivial():
    h = pb.random_stump(1, 4)
    cfg = pb.default_experiment_config("shifted")
    r = pb.check_lemma2(h, cfg.source, cfg.target, 1.0, 1.0,
                        oracle_n=10_000, rng_seed=0)
    assert r.lhs == 0.0
    assert r.rhs == 0.0
    assert r.holds


def test_lemma2_same_domain_lhs_within_noise():
    # S == T makes the population lhs 0; the Monte-Carlo estimate sees two
    # independent draws, so it lands within the reported slack instead.
    h = pb.random_stump(2, 4)
    cfg = pb.default_experiment_config("clean")
    r = pb.check_lemma2(h, cfg.target, cfg.target, 0.5, 1.0,
                        oracle_n=10_000, rng_seed=4)
    assert r.lhs <= r.slack
    assert r.holds


def test_lemma2_holds_for_random_stumps_on_shifted_domain():
    cfg = pb.default_experiment_config("shifted")
    for s in range(10):
        h = pb.random_stump(s, 4)
        r = pb.check_lemma2(h, cfg.source, cfg.target, 0.5, 1.0,
                            oracle_n=20_000, rng_seed=s)
        assert r.holds


def test_hoeffding_rhs_at_zero_mu():
    cfg = pb.RiskConfig(1.0, 0.5, 0.5)
    assert pb.hoeffding_rhs(0.0, 400, cfg, pb.NoiseModel(0.1, 0.2)) == 2.0


def test_hoeffding_rhs_decreases_in_mu_and_m():
    cfg = pb.RiskConfig(1.0, 0.5, 0.5)
    model = pb.NoiseModel(0.1, 0.2)
    assert pb.hoeffding_rhs(0.1, 400, cfg, model) > \
        pb.hoeffding_rhs(0.2, 400, cfg, model)
    assert pb.hoeffding_rhs(0.1, 400, cfg, model) > \
        pb.hoeffding_rhs(0.1, 800, cfg, model)


def test_default_mu_grid():
    grid = pb.default_mu_grid()
    assert len(grid) == 10
    assert grid[0] == pytest.approx(0.02)
    assert grid[-1] == pytest.approx(0.2)


def test_lemma3_concentration_small_run():
    cfg = pb.default_experiment_config("noisy")
    h = pb.StumpHypothesis(0, 0.5, -1)
    rows = pb.check_lemma3_concentration(h, cfg, trials=300, rng_seed=0)
    assert len(rows) == 10
    assert all(r.holds for r in rows)
    # huge mu: nothing exceeds
    far = pb.check_lemma3_concentration(h, cfg, mu_grid=[5.0], trials=50,
                                        rng_seed=1)
    assert far[0].empirical_prob == 0.0


def test_lemma3_requires_synthetic_mode():
    cfg = pb.default_experiment_config("practice")
    with pytest.raises(pb.ConfigurationError):
        pb.check_lemma3_concentration(pb.StumpHypothesis(0, 0.0, 1), cfg,
                                      trials=10)


def test_validate_theorem_structure_and_determinism():
    cfg = pb.default_experiment_config("noisy")
    res = pb.validate_theorem(cfg, trials=4, rng_seed=9)
    assert len(res.rows) == 4
    assert res.violation_rate == sum(r.violated for r in res.rows) / 4
    seeds = [r.seed for r in res.rows]
    assert len(set(seeds)) == 4
    again = pb.validate_theorem(cfg, trials=4, rng_seed=9)
    assert [r.eps_t_hat for r in again.rows] == [r.eps_t_hat for r in res.rows]
    # alt-convention columns populated and consistent
    for r in res.rows:
        assert r.rhs_alt >= r.rhs  # 1-a^2 loosens the bound at alpha=0.5
        assert r.violated == (r.eps_t_hat > r.rhs)


def test_validate_theorem_requires_synthetic():
    with pytest.raises(pb.ConfigurationError):
        pb.validate_theorem(pb.default_experiment_config("practice"), trials=1)


def test_trial_csv_format():
    cfg = pb.default_experiment_config("noisy")
    res = pb.validate_theorem(cfg, trials=2, rng_seed=0)
    buf = io.StringIO()
    pb.write_trial_csv(res.rows, buf)
    lines = buf.getvalue().strip().split("\r\n")
    assert lines[0] == "seed,N,C,DD,rhs,eps_T_hat,violated"
    assert len(lines) == 3
    fields = lines[1].split(",")
    assert fields[-1] in ("0", "1")
    # reals carry at most 9 significant digits
    for tok in fields[1:6]:
        mantissa = tok.replace("-", "").replace(".", "").split("e")[0].lstrip("0")
        assert len(mantissa) <= 9
