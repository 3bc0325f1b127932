import json

import numpy as np
import pytest

import pseudobound as pb


def small_spec(sigma=0.25, seed=7, transform=None):
    centers = np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]])
    return pb.DomainSpec(
        num_identities=3,
        feature_dim=2,
        identity_centers=centers,
        within_identity_stddev=sigma,
        domain_transform=transform or pb.AffineMap.identity(2),
        seed=seed,
    )


def test_generate_domain_deterministic():
    spec = small_spec()
    a = pb.generate_domain(spec, 50, 3, pb.SOURCE)
    b = pb.generate_domain(spec, 50, 3, pb.SOURCE)
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.identities, b.identities)
    c = pb.generate_domain(spec, 50, 4, pb.SOURCE)
    assert not np.array_equal(a.features, c.features)


def test_generate_domain_tiny_stddev_collapses_to_centers():
    spec = small_spec(sigma=1e-9)
    samples = pb.generate_domain(spec, 40, 0, pb.TARGET)
    centers = spec.identity_centers[samples.identities]
    assert np.abs(samples.features - centers).max() < 1e-6


def test_generate_domain_identity_counts_multinomial_band():
    # 3 identities, n=300: each count within 3 sigma of 100,
    # sigma = sqrt(300 * (1/3) * (2/3)) ~ 8.165.
    spec = small_spec(seed=11)
    samples = pb.generate_domain(spec, 300, 5, pb.SOURCE)
    counts = np.bincount(samples.identities, minlength=3)
    assert counts.sum() == 300
    assert np.all(np.abs(counts - 100) <= 3 * np.sqrt(300 * (1 / 3) * (2 / 3)))


def test_generate_domain_applies_transform():
    amap = pb.AffineMap(np.diag([2.0, 0.5]), np.array([1.0, -1.0]))
    plain = pb.generate_domain(small_spec(), 30, 9, pb.TARGET)
    moved = pb.generate_domain(small_spec(transform=amap), 30, 9, pb.TARGET)
    assert np.allclose(moved.features, amap.apply(plain.features))


def test_build_pairs_all_counts_and_labels():
    spec = small_spec()
    samples = pb.generate_domain(spec, 12, 2, pb.SOURCE)
    pairs = pb.build_pairs(samples, pb.PairStrategy.all_pairs())
    assert len(pairs) == 12 * 11 // 2
    same = samples.identities[pairs.member_indices[:, 0]] == \
        samples.identities[pairs.member_indices[:, 1]]
    assert np.array_equal(pairs.true_labels, np.where(same, 1, -1))
    assert (pairs.similarity >= 0).all()


def test_build_pairs_two_by_two_example():
    feats = np.array([[0.0, 0], [0.1, 0], [5.0, 0], [5.1, 0]])
    samples = pb.SampleSet(feats, np.array([0, 0, 1, 1]), pb.SOURCE)
    pairs = pb.build_pairs(samples, pb.PairStrategy.all_pairs())
    assert len(pairs) == 6
    assert int((pairs.true_labels == 1).sum()) == 2
    assert int((pairs.true_labels == -1).sum()) == 4


def test_build_pairs_single_same_identity_pair():
    samples = pb.SampleSet(np.array([[1.0], [2.0]]), np.array([4, 4]), pb.TARGET)
    pairs = pb.build_pairs(samples, pb.PairStrategy.all_pairs())
    assert len(pairs) == 1
    assert pairs.true_labels[0] == 1
    assert pairs.similarity[0, 0] == 1.0


def test_build_pairs_balanced_ratio():
    spec = small_spec()
    samples = pb.generate_domain(spec, 40, 6, pb.SOURCE)
    pairs = pb.build_pairs(samples, pb.PairStrategy.balanced(3), rng_seed=1)
    n_pos = int((pairs.true_labels == 1).sum())
    n_neg = int((pairs.true_labels == -1).sum())
    assert n_pos > 0
    assert n_neg == 3 * n_pos


def test_build_pairs_errors():
    one = pb.SampleSet(np.array([[0.0]]), np.array([0]), pb.SOURCE)
    with pytest.raises(pb.EmptyInputError):
        pb.build_pairs(one, pb.PairStrategy.all_pairs())
    # two distinct identities only -> no positive pair to balance against
    two = pb.SampleSet(np.array([[0.0], [1.0]]), np.array([0, 1]), pb.SOURCE)
    with pytest.raises(pb.DegenerateInputError):
        pb.build_pairs(two, pb.PairStrategy.balanced(2), rng_seed=0)


def test_similarity_from_members_is_absolute_difference():
    feats = np.array([[1.0, -2.0], [4.0, 1.0], [0.0, 0.0]])
    members = np.array([[0, 1], [1, 2]])
    sim = pb.similarity_from_members(feats, members)
    assert np.array_equal(sim, np.array([[3.0, 3.0], [4.0, 1.0]]))


def test_draw_pair_process_contract():
    spec = small_spec()
    strat = pb.PairStrategy.balanced(3)
    samples, pairs = pb.draw_pair_process(spec, strat, 200, 13)
    assert len(pairs) == 200
    assert len(samples) == 400
    assert np.array_equal(pairs.member_indices,
                          np.arange(400).reshape(-1, 2))
    expected = np.abs(samples.features[0::2] - samples.features[1::2])
    assert np.array_equal(pairs.similarity, expected)
    assert not pairs.has_pseudo
    again = pb.draw_pair_process(spec, strat, 200, 13)[1]
    assert np.array_equal(pairs.similarity, again.similarity)
    assert np.array_equal(pairs.true_labels, again.true_labels)


def test_draw_pair_process_mixes_labels():
    """The i.i.d. pair stream must contain both classes for risk work."""
    spec = small_spec()
    _, pairs = pb.draw_pair_process(spec, pb.PairStrategy.balanced(3), 400, 2)
    n_pos = int((pairs.true_labels == 1).sum())
    assert 0 < n_pos < 400
    # balanced(3) draws positives with probability 1/4 per slot
    assert abs(n_pos / 400 - 0.25) < 3 * np.sqrt(0.25 * 0.75 / 400)


def test_pair_set_subset_and_pseudo():
    spec = small_spec()
    _, pairs = pb.draw_pair_process(spec, pb.PairStrategy.balanced(2), 50, 1)
    pseudo = -pairs.true_labels
    tagged = pairs.with_pseudo_labels(pseudo)
    assert tagged.has_pseudo and not pairs.has_pseudo
    sub = tagged.subset(np.array([0, 3, 4]))
    assert len(sub) == 3
    assert np.array_equal(sub.pseudo_labels, pseudo[[0, 3, 4]])
    assert np.array_equal(sub.member_indices, tagged.member_indices[[0, 3, 4]])


def test_unit_normalize():
    feats = np.array([[3.0, 4.0], [0.0, 0.0], [0.0, 2.0]])
    out = pb.unit_normalize(feats)
    assert np.allclose(np.linalg.norm(out[[0, 2]], axis=1), 1.0)
    assert np.allclose(out[1], 0.0)  # zero rows stay put instead of dividing by 0


def test_affine_map_round_trip_and_identity():
    amap = pb.AffineMap(np.array([[1.0, 2.0], [0.0, 1.0]]), np.array([0.5, -0.5]))
    back = pb.AffineMap.from_dict(amap.to_dict())
    assert back == amap
    assert pb.AffineMap.identity(3).is_identity()
    assert not amap.is_identity()


def test_domain_spec_json_round_trip():
    spec = small_spec()
    back = pb.DomainSpec.from_json(spec.to_json())
    assert back == spec
    # JSON itself must be valid and carry row-major nested arrays
    doc = json.loads(spec.to_json())
    assert doc["identity_centers"][1] == [3.0, 0.0]


def test_domain_spec_validation():
    with pytest.raises(pb.ConfigurationError):
        pb.DomainSpec(2, 2, np.zeros((3, 2)), 0.1, pb.AffineMap.identity(2), 0)
    with pytest.raises(pb.ConfigurationError):
        pb.DomainSpec(3, 2, np.zeros((3, 2)), 0.0, pb.AffineMap.identity(2), 0)
    with pytest.raises(pb.ConfigurationError):
        pb.DomainSpec(3, 2, np.zeros((3, 2)), 0.1, pb.AffineMap.identity(4), 0)


def test_derive_seed_and_make_rng():
    assert pb.derive_seed(1, 2, 3) == pb.derive_seed(1, 2, 3)
    assert pb.derive_seed(1, 2, 3) != pb.derive_seed(1, 2, 4)
    assert 0 <= pb.derive_seed(0) < 2 ** 64
    a = pb.make_rng(5, 6).standard_normal(4)
    b = pb.make_rng(5, 6).standard_normal(4)
    assert np.array_equal(a, b)
