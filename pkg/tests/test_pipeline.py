import hashlib
import json
from dataclasses import replace

import numpy as np
import pytest

import pseudobound as pb


def synthetic_guided_toggles(filtering=pb.FILTER_NONE):
    return pb.Toggles(source_guided=True, domain_alignment=False,
                      bounded_loss=False, outlier_filtering=filtering,
                      weight_decay=0.0)


def test_synthetic_single_iteration_equals_theorem_trial():
    """One noisy pipeline iteration is exactly a theorem-validation trial."""
    cfg = replace(pb.default_experiment_config("noisy"),
                  toggles=synthetic_guided_toggles(), iterations=1)
    result = pb.run_self_learning(cfg)
    validation = pb.validate_theorem(cfg, trials=1, rng_seed=cfg.master_seed)
    row = validation.rows[0]
    assert result.iterations[0].target_oracle_risk == row.eps_t_hat
    assert result.final_report.rhs == row.rhs
    assert result.final_report.rhs == validation.report.rhs


def test_synthetic_iterations_are_independent_corruption_redraws():
    """Pair draws are shared across iterations; only the corruption differs,
    so a clean run repeats the same hypothesis and risk every iteration."""
    cfg = replace(pb.default_experiment_config("clean"), iterations=3)
    assert cfg.toggles == pb.Toggles.all_off()
    result = pb.run_self_learning(cfg)
    risks = [r.target_oracle_risk for r in result.iterations]
    assert len(result.iterations) == 3
    assert risks[0] == risks[1] == risks[2]
    hyps = {r.hypothesis for r in result.iterations}
    assert len(hyps) == 1
    assert result.final_risk == risks[-1]


def test_synthetic_noisy_run_records_rates_and_filters():
    cfg = replace(pb.default_experiment_config("noisy"),
                  toggles=synthetic_guided_toggles(pb.OFFLINE_PLUS_ONLINE),
                  iterations=3)
    result = pb.run_self_learning(cfg)
    for rec in result.iterations:
        assert rec.rho_before is not None
        assert rec.filter_report is not None
        assert rec.rho_after is not None
        before = rec.rho_before.rho_neg + rec.rho_before.rho_pos
        after = rec.rho_after.rho_neg + rec.rho_after.rho_pos
        assert after <= before
        assert rec.n_target_pairs == rec.filter_report.kept


def test_synthetic_run_is_deterministic():
    cfg = replace(pb.default_experiment_config("noisy"), iterations=2)
    a = pb.run_self_learning(cfg)
    b = pb.run_self_learning(cfg)
    assert a.iterations[-1].hypothesis == b.iterations[-1].hypothesis
    assert a.final_risk == b.final_risk
    assert a.final_report.rhs == b.final_report.rhs


def test_practice_run_structure():
    cfg = pb.default_experiment_config("practice")
    result = pb.run_self_learning(cfg)
    assert len(result.iterations) == cfg.iterations
    first = result.iterations[0]
    assert first.n_clusters >= 1
    assert first.n_noise_points >= 0
    assert first.rho_before is not None
    assert result.final_model.align_map is not None
    assert result.final_model.normalize
    # alignment and normalization bring the pair similarity features closer
    assert first.mmd_sim_after < first.mmd_sim_before
    assert result.final_report.rhs > 0
    assert np.isfinite(result.final_report.rhs)
    assert result.linear_probe is not None
    assert result.linear_probe["trace_length"] > 0
    assert result.wall_time > 0


def test_practice_all_off_skips_optional_stages():
    cfg = replace(pb.default_experiment_config("practice"),
                  toggles=pb.Toggles.all_off(), iterations=1)
    result = pb.run_self_learning(cfg)
    assert result.final_model.align_map is None
    assert not result.final_model.normalize
    rec = result.iterations[0]
    assert rec.rho_after is None
    assert rec.filter_report is None


def test_pipeline_model_member_prediction():
    stump = pb.StumpHypothesis(0, 0.5, -1)
    model = pb.PipelineModel(stump, None, False)
    feats = np.array([[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]])
    members = np.array([[0, 1], [0, 2], [1, 2]])
    sim = np.abs(feats[members[:, 0]] - feats[members[:, 1]])
    assert np.array_equal(model.predict_members(feats, members),
                          stump.predict(sim))
    normed = pb.PipelineModel(stump, None, True)
    assert np.array_equal(normed.transform_target_members(feats),
                          pb.unit_normalize(feats))
    shift = pb.AffineMap(np.eye(2), np.array([1.0, 0.0]))
    mapped = pb.PipelineModel(stump, shift, False)
    assert np.array_equal(mapped.transform_target_members(feats), feats + [1, 0])
    # source members never pass through the target alignment map
    assert np.array_equal(mapped.transform_source_members(feats), feats)


def test_experiment_result_serialization():
    cfg = replace(pb.default_experiment_config("noisy"), iterations=1)
    result = pb.run_self_learning(cfg)
    expected = hashlib.sha256(cfg.to_json().encode()).hexdigest()
    assert result.config_fingerprint == expected
    round_trip = json.loads(json.dumps(result.to_dict()))
    assert round_trip["config_fingerprint"] == expected
    assert len(round_trip["iterations"]) == 1
    assert round_trip["final_report"]["rhs"] == result.final_report.rhs


def test_practice_filtering_lowers_measured_rates_vs_unfiltered_run():
    """Paired runs differing only in outlier_filtering: the filtered run's
    effective rate stays at or below the unfiltered run's, per iteration."""
    base = replace(pb.default_experiment_config("practice"), iterations=2)
    filtered = pb.run_self_learning(base)
    unfiltered = pb.run_self_learning(
        replace(base, toggles=replace(base.toggles,
                                      outlier_filtering=pb.FILTER_NONE)))
    for rec_f, rec_n in zip(filtered.iterations, unfiltered.iterations):
        eff = rec_f.rho_after if rec_f.rho_after is not None else rec_f.rho_before
        assert (eff.rho_neg + eff.rho_pos
                <= rec_n.rho_before.rho_neg + rec_n.rho_before.rho_pos)


def test_practice_failure_wraps_iteration_context():
    cfg = replace(pb.default_experiment_config("practice"),
                  dbscan_params=pb.DbscanParams(1e-9, 4), iterations=2)
    with pytest.raises(pb.PipelineError) as exc_info:
        pb.run_self_learning(cfg)
    assert exc_info.value.iteration == 0


def test_ablation_paired_seeds_and_cell_lookup():
    base = replace(pb.default_experiment_config("noisy"), trials=2, iterations=2)
    grid = [pb.Toggles.all_off(), synthetic_guided_toggles(),
            synthetic_guided_toggles(pb.OFFLINE_PLUS_ONLINE)]
    table = pb.run_ablation(base, grid)
    assert table.trial_seeds == [pb.derive_seed(base.master_seed, 30, t)
                                 for t in range(2)]
    assert [c.toggles for c in table.cells] == grid
    for cell in table.cells:
        assert len(cell.final_risks) == 2
        assert cell.failures == []
        assert cell.mean_final_risk == pytest.approx(np.mean(cell.final_risks))
    with pytest.raises(KeyError):
        table.cell(pb.Toggles(True, True, True, pb.OFFLINE, 0.5))


def test_ablation_cell_reproduces_direct_runs():
    base = replace(pb.default_experiment_config("noisy"), trials=2, iterations=2)
    toggles = synthetic_guided_toggles()
    table = pb.run_ablation(base, [toggles])
    cell = table.cell(toggles)
    for t, seed in enumerate(table.trial_seeds):
        direct = pb.run_self_learning(replace(base, toggles=toggles,
                                              master_seed=seed))
        assert cell.final_risks[t] == direct.final_risk


def test_ablation_marks_failures_instead_of_aborting():
    base = replace(pb.default_experiment_config("practice"),
                   dbscan_params=pb.DbscanParams(1e-9, 4),
                   trials=1, iterations=1)
    table = pb.run_ablation(base, [base.toggles])
    cell = table.cells[0]
    assert cell.final_risks == []
    assert len(cell.failures) == 1
    assert cell.failures[0]["trial"] == 0
    assert cell.mean_final_risk is None


def test_ablation_rejects_empty_grid():
    base = replace(pb.default_experiment_config("noisy"), trials=1)
    with pytest.raises(pb.EmptyInputError):
        pb.run_ablation(base, [])


def test_default_toggle_grid_pairs_decay_with_bounded_loss():
    grid = pb.default_toggle_grid()
    assert len(grid) == 16
    assert len(set(grid)) == 16
    for toggles in grid:
        if toggles.bounded_loss:
            assert toggles.weight_decay > 0
        else:
            assert toggles.weight_decay == 0.0
