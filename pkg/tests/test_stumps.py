import numpy as np
import pytest

import pseudobound as pb
from oracles import erm_grid_oracle


def test_predict_conventions():
    h = pb.StumpHypothesis(0, 0.5, 1)
    assert h.predict(np.array([1.0])) == 1
    assert h.flipped().predict(np.array([1.0])) == -1
    # boundary: x == t is NOT greater, so the negative side wins
    assert pb.StumpHypothesis(0, 1.0, 1).predict(np.array([1.0])) == -1


def test_predict_vectorized_matches_scalar():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((30, 3))
    h = pb.StumpHypothesis(2, 0.1, -1)
    batch = h.predict(x)
    assert batch.shape == (30,)
    for i in range(30):
        assert batch[i] == h.predict(x[i])


def test_stump_validation_and_round_trip():
    with pytest.raises(pb.ConfigurationError):
        pb.StumpHypothesis(0, 0.0, 0)
    with pytest.raises(pb.ConfigurationError):
        pb.StumpHypothesis(-1, 0.0, 1)
    h = pb.StumpHypothesis(1, -0.25, -1)
    assert pb.StumpHypothesis.from_dict(h.to_dict()) == h


def test_vc_dimension():
    assert pb.HypothesisClassInfo(1).vc_dimension == 2
    assert pb.HypothesisClassInfo(2).vc_dimension == 3
    assert pb.HypothesisClassInfo(4).vc_dimension == 4
    assert pb.HypothesisClassInfo(7).vc_dimension == 4
    assert pb.HypothesisClassInfo(8).vc_dimension == 5


def test_erm_realizable_1d():
    # labels -1, -1, +1 on x = 1, 2, 3: zero cost, threshold in (2, 3)
    feats = np.array([[1.0], [2.0], [3.0]])
    cost_pos, cost_neg = pb.zero_m_costs(np.array([-1, -1, 1]), 1.0)
    h, cost = pb.erm(feats, cost_pos, cost_neg)
    assert cost == 0.0
    assert h.sign == 1
    assert 2.0 < h.threshold < 3.0


def test_erm_all_zero_costs():
    feats = np.array([[0.0], [1.0]])
    h, cost = pb.erm(feats, np.zeros(2), np.zeros(2))
    assert cost == 0.0
    assert isinstance(h, pb.StumpHypothesis)


def test_erm_cost_is_exact_for_returned_stump():
    rng = np.random.default_rng(4)
    feats = rng.standard_normal((60, 3))
    cp = rng.standard_normal(60)
    cn = rng.standard_normal(60)
    h, cost = pb.erm(feats, cp, cn)
    import math
    direct = math.fsum(np.where(h.predict(feats) == 1, cp, cn).tolist())
    assert cost == direct


def test_erm_matches_grid_oracle_with_corrected_costs():
    """40 random points, corrected-loss costs under NoiseModel(0.1, 0.2)."""
    rng = np.random.default_rng(12)
    model = pb.NoiseModel(0.1, 0.2)
    for _ in range(20):
        feats = rng.standard_normal((40, 2))
        pseudo = rng.choice([-1, 1], size=40)
        cp, cn = pb.corrected_costs(pseudo, 1.0, model)
        _, cost = pb.erm(feats, cp, cn)
        assert cost == erm_grid_oracle(feats, cp, cn)


def test_erm_handles_duplicate_values():
    # duplicates force cuts to skip equal-value positions
    feats = np.array([[0.0], [0.0], [0.0], [1.0], [1.0]])
    cp = np.array([1.0, 1.0, 1.0, 0.0, 0.0])
    cn = np.array([0.0, 0.0, 0.0, 1.0, 1.0])
    h, cost = pb.erm(feats, cp, cn)
    assert cost == 0.0
    assert 0.0 < h.threshold < 1.0
    assert h.sign == 1


def test_erm_tie_break_is_deterministic():
    rng = np.random.default_rng(7)
    feats = np.round(rng.standard_normal((25, 3)), 1)  # induce ties
    cp = rng.choice([0.0, 1.0], size=25)
    cn = 1.0 - cp
    first = pb.erm(feats, cp, cn)
    for _ in range(3):
        again = pb.erm(feats, cp, cn)
        assert again[0] == first[0] and again[1] == first[1]


def test_erm_input_validation():
    with pytest.raises(pb.EmptyInputError):
        pb.erm(np.zeros((0, 2)), np.zeros(0), np.zeros(0))
    with pytest.raises(pb.ConfigurationError):
        pb.erm(np.zeros((3, 2)), np.zeros(2), np.zeros(3))
    with pytest.raises(pb.ConfigurationError):
        pb.erm(np.array([[np.nan]]), np.zeros(1), np.zeros(1))


def test_random_stump_is_seeded_and_in_range():
    h = pb.random_stump(3, 4)
    assert h == pb.random_stump(3, 4)
    assert 0 <= h.coordinate < 4
    assert -3.0 <= h.threshold <= 3.0
    seen_signs = {pb.random_stump(s, 2).sign for s in range(20)}
    assert seen_signs == {-1, 1}
