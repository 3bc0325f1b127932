"""Synthetic identity domains and verification pairs.

A domain draws identity-conditioned Gaussian feature vectors and pushes them
through an affine transform.  Verification pairs live in the similarity space
of elementwise absolute differences; the binary label says whether the two
members share an identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DegenerateInputError, EmptyInputError

SOURCE = "source"
TARGET = "target"

#: integer placeholder meaning "no pseudo-label assigned".
ABSENT = 0


def make_rng(*entropy) -> np.random.Generator:
    """Deterministic PCG64 stream keyed by a tuple of non-negative ints."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([int(e) for e in entropy]))
    )


def derive_seed(*entropy) -> int:
    """Collapse an entropy tuple into one reproducible 64-bit seed."""
    return int(
        np.random.SeedSequence([int(e) for e in entropy]).generate_state(1, np.uint64)[0]
    )


@dataclass(frozen=True, eq=False)
class AffineMap:
    """x -> matrix @ x + offset, applied row-wise to (n, q) arrays."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=float))

    def apply(self, feats: np.ndarray) -> np.ndarray:
        return np.asarray(feats, dtype=float) @ self.matrix.T + self.offset

    def is_identity(self) -> bool:
        q = self.matrix.shape[0]
        return bool(
            np.array_equal(self.matrix, np.eye(q)) and not self.offset.any()
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, AffineMap):
            return NotImplemented
        return (np.array_equal(self.matrix, other.matrix)
                and np.array_equal(self.offset, other.offset))

    def __hash__(self):
        return hash((self.matrix.tobytes(), self.offset.tobytes()))

    @staticmethod
    def identity(dim: int) -> "AffineMap":
        return AffineMap(np.eye(dim), np.zeros(dim))

    def to_dict(self) -> dict:
        return {"matrix": self.matrix.tolist(), "offset": self.offset.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "AffineMap":
        return AffineMap(np.asarray(d["matrix"], float), np.asarray(d["offset"], float))


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """Full generative description of one domain.

    ``seed`` is the domain's own entropy; every sampling routine mixes it with
    the caller's ``rng_seed`` so that identical (spec, n, rng_seed) triples
    reproduce bit-identical draws.
    """

    num_identities: int
    feature_dim: int
    identity_centers: np.ndarray
    within_identity_stddev: float
    domain_transform: AffineMap
    seed: int

    def __post_init__(self):
        object.__setattr__(
            self, "identity_centers", np.asarray(self.identity_centers, dtype=float)
        )
        self.validate()

    def validate(self) -> None:
        if self.num_identities < 1:
            raise ConfigurationError("num_identities must be >= 1")
        if self.feature_dim < 1:
            raise ConfigurationError("feature_dim must be >= 1")
        if self.identity_centers.shape != (self.num_identities, self.feature_dim):
            raise ConfigurationError(
                f"identity_centers must have shape "
                f"({self.num_identities}, {self.feature_dim}), "
                f"got {self.identity_centers.shape}"
            )
        if not np.isfinite(self.identity_centers).all():
            raise ConfigurationError("identity_centers must be finite")
        if not self.within_identity_stddev > 0:
            raise ConfigurationError("within_identity_stddev must be > 0")
        q = self.feature_dim
        if self.domain_transform.matrix.shape != (q, q):
            raise ConfigurationError("domain_transform matrix must be square of side q")
        if self.domain_transform.offset.shape != (q,):
            raise ConfigurationError("domain_transform offset must have length q")
        if int(self.seed) < 0:
            raise ConfigurationError("seed must be a non-negative integer")

    def __eq__(self, other) -> bool:
        if not isinstance(other, DomainSpec):
            return NotImplemented
        return (
            self.num_identities == other.num_identities
            and self.feature_dim == other.feature_dim
            and np.array_equal(self.identity_centers, other.identity_centers)
            and self.within_identity_stddev == other.within_identity_stddev
            and self.domain_transform == other.domain_transform
            and self.seed == other.seed
        )

    def __hash__(self):
        return hash((self.num_identities, self.feature_dim,
                     self.identity_centers.tobytes(),
                     self.within_identity_stddev, self.domain_transform,
                     self.seed))

    def to_dict(self) -> dict:
        return {
            "num_identities": self.num_identities,
            "feature_dim": self.feature_dim,
            "identity_centers": self.identity_centers.tolist(),
            "within_identity_stddev": self.within_identity_stddev,
            "domain_transform": self.domain_transform.to_dict(),
            "seed": int(self.seed),
        }

    @staticmethod
    def from_dict(d: dict) -> "DomainSpec":
        return DomainSpec(
            num_identities=int(d["num_identities"]),
            feature_dim=int(d["feature_dim"]),
            identity_centers=np.asarray(d["identity_centers"], float),
            within_identity_stddev=float(d["within_identity_stddev"]),
            domain_transform=AffineMap.from_dict(d["domain_transform"]),
            seed=int(d["seed"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @staticmethod
    def from_json(text: str) -> "DomainSpec":
        return DomainSpec.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class IdentitySample:
    features: np.ndarray
    identity: int
    domain_tag: str


class SampleSet:
    """Column-oriented batch of identity samples (sequence of IdentitySample)."""

    def __init__(self, features, identities, domain_tag: str):
        self.features = np.asarray(features, dtype=float)
        self.identities = np.asarray(identities, dtype=np.int64)
        self.domain_tag = domain_tag
        if self.features.ndim != 2:
            raise ConfigurationError("features must be a (n, q) array")
        if len(self.features) != len(self.identities):
            raise ConfigurationError("features and identities disagree on length")

    def __len__(self) -> int:
        return len(self.features)

    def __getitem__(self, i: int) -> IdentitySample:
        return IdentitySample(self.features[i], int(self.identities[i]), self.domain_tag)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def replace_features(self, feats: np.ndarray) -> "SampleSet":
        return SampleSet(feats, self.identities, self.domain_tag)


@dataclass(frozen=True)
class PairStrategy:
    """How verification pairs are assembled from samples.

    ``all``       every unordered pair.
    ``balanced``  every positive pair plus k_neg_per_pos sampled negatives
                  per positive (sampled with replacement).
    """

    kind: str
    k_neg_per_pos: int = 3

    def __post_init__(self):
        if self.kind not in ("all", "balanced"):
            raise ConfigurationError(f"unknown pair strategy {self.kind!r}")
        if self.kind == "balanced" and self.k_neg_per_pos < 1:
            raise ConfigurationError("k_neg_per_pos must be >= 1")

    @staticmethod
    def all_pairs() -> "PairStrategy":
        return PairStrategy("all")

    @staticmethod
    def balanced(k_neg_per_pos: int = 3) -> "PairStrategy":
        return PairStrategy("balanced", k_neg_per_pos)

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "balanced":
            d["k_neg_per_pos"] = self.k_neg_per_pos
        return d

    @staticmethod
    def from_dict(d: dict) -> "PairStrategy":
        return PairStrategy(d["kind"], int(d.get("k_neg_per_pos", 3)))


@dataclass(frozen=True, eq=False)
class VerificationPair:
    similarity_features: np.ndarray
    true_label: int
    pseudo_label: int | None
    member_indices: tuple[int, int]


class PairSet:
    """Column-oriented batch of verification pairs.

    ``pseudo_labels`` stores ABSENT (0) until labels are assigned; views as
    VerificationPair report those entries as None.
    """

    def __init__(self, similarity, true_labels, pseudo_labels=None, member_indices=None):
        self.similarity = np.asarray(similarity, dtype=float)
        self.true_labels = np.asarray(true_labels, dtype=np.int8)
        n = len(self.similarity)
        if pseudo_labels is None:
            pseudo_labels = np.full(n, ABSENT, dtype=np.int8)
        self.pseudo_labels = np.asarray(pseudo_labels, dtype=np.int8)
        if member_indices is None:
            member_indices = np.zeros((n, 2), dtype=np.int64)
        self.member_indices = np.asarray(member_indices, dtype=np.int64)
        if self.similarity.ndim != 2:
            raise ConfigurationError("similarity must be a (n, q) array")
        if not (len(self.true_labels) == n and len(self.pseudo_labels) == n
                and len(self.member_indices) == n):
            raise ConfigurationError("pair columns disagree on length")

    def __len__(self) -> int:
        return len(self.similarity)

    def __getitem__(self, i: int) -> VerificationPair:
        p = int(self.pseudo_labels[i])
        return VerificationPair(
            self.similarity[i],
            int(self.true_labels[i]),
            None if p == ABSENT else p,
            (int(self.member_indices[i, 0]), int(self.member_indices[i, 1])),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def feature_dim(self) -> int:
        return self.similarity.shape[1]

    @property
    def has_pseudo(self) -> bool:
        return bool(len(self)) and bool((self.pseudo_labels != ABSENT).all())

    def with_pseudo_labels(self, pseudo) -> "PairSet":
        return PairSet(self.similarity, self.true_labels, pseudo, self.member_indices)

    def subset(self, index) -> "PairSet":
        return PairSet(
            self.similarity[index],
            self.true_labels[index],
            self.pseudo_labels[index],
            self.member_indices[index],
        )


def generate_domain(spec: DomainSpec, n: int, rng_seed: int,
                    domain_tag: str = SOURCE) -> SampleSet:
    """Draw n samples: identity uniform, features center + isotropic noise,
    then the domain transform."""
    spec.validate()
    if n < 1:
        raise EmptyInputError("generate_domain needs n >= 1")
    rng = make_rng(spec.seed, rng_seed)
    ids = rng.integers(0, spec.num_identities, size=n)
    feats = spec.identity_centers[ids] + spec.within_identity_stddev * rng.standard_normal(
        (n, spec.feature_dim)
    )
    return SampleSet(spec.domain_transform.apply(feats), ids, domain_tag)


def similarity_from_members(features: np.ndarray, member_indices: np.ndarray) -> np.ndarray:
    """Elementwise |a - b| for each (a, b) row of member_indices."""
    feats = np.asarray(features, float)
    idx = np.asarray(member_indices, np.int64)
    return np.abs(feats[idx[:, 0]] - feats[idx[:, 1]])


def _pair_indices(group_labels: np.ndarray, strategy: PairStrategy,
                  rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Unordered index pairs per strategy; positivity judged by group_labels."""
    n = len(group_labels)
    if strategy.kind == "all":
        return np.triu_indices(n, k=1)

    order = np.argsort(group_labels, kind="stable")
    sorted_lab = group_labels[order]
    starts = np.flatnonzero(np.r_[True, sorted_lab[1:] != sorted_lab[:-1]])
    ends = np.r_[starts[1:], n]
    pos_i, pos_j = [], []
    for a, b in zip(starts, ends):
        members = order[a:b]
        if len(members) < 2:
            continue
        members = np.sort(members)
        ii, jj = np.triu_indices(len(members), k=1)
        pos_i.append(members[ii])
        pos_j.append(members[jj])
    if not pos_i:
        raise DegenerateInputError("no positive pairs available")
    pos_i = np.concatenate(pos_i)
    pos_j = np.concatenate(pos_j)

    if len(np.unique(group_labels)) < 2:
        raise DegenerateInputError("no negative pairs available")
    need = strategy.k_neg_per_pos * len(pos_i)
    neg_a = np.empty(need, np.int64)
    neg_b = np.empty(need, np.int64)
    got = 0
    while got < need:
        m = max(2 * (need - got), 16)
        a = rng.integers(0, n, size=m)
        b = rng.integers(0, n, size=m)
        ok = group_labels[a] != group_labels[b]
        a, b = a[ok], b[ok]
        take = min(len(a), need - got)
        neg_a[got:got + take] = a[:take]
        neg_b[got:got + take] = b[:take]
        got += take
    i = np.concatenate([pos_i, neg_a])
    j = np.concatenate([pos_j, neg_b])
    return i, j


def build_pairs(samples: SampleSet, strategy: PairStrategy, rng_seed: int = 0) -> PairSet:
    """Assemble verification pairs from a sample batch.

    true_label is +1 iff the members share an identity; pseudo_labels start
    ABSENT.  The balanced strategy consumes rng_seed for negative sampling;
    the all strategy is fully deterministic.
    """
    if len(samples) < 2:
        raise EmptyInputError("build_pairs needs at least two samples")
    rng = make_rng(rng_seed)
    i, j = _pair_indices(samples.identities, strategy, rng)
    sim = np.abs(samples.features[i] - samples.features[j])
    labels = np.where(samples.identities[i] == samples.identities[j], 1, -1)
    member = np.stack([i, j], axis=1)
    return PairSet(sim, labels, member_indices=member)


def draw_pair_process(spec: DomainSpec, strategy: PairStrategy, n_pairs: int,
                      rng_seed: int, domain_tag: str = SOURCE
                      ) -> tuple[SampleSet, PairSet]:
    """Draw n_pairs independent pairs whose marginals match the strategy.

    Each pair gets two fresh member samples, so pairs are i.i.d. draws from
    the strategy-induced pair distribution: under ``all`` both identities are
    uniform and independent; under ``balanced`` the pair is positive with
    probability 1/(1 + k_neg_per_pos), negatives draw two distinct uniform
    identities.  This is the sampler behind risk estimation and bound trials.
    """
    spec.validate()
    if n_pairs < 1:
        raise EmptyInputError("draw_pair_process needs n_pairs >= 1")
    rng = make_rng(spec.seed, rng_seed, 1)
    n_id = spec.num_identities
    if strategy.kind == "all":
        ids_a = rng.integers(0, n_id, size=n_pairs)
        ids_b = rng.integers(0, n_id, size=n_pairs)
    else:
        if n_id < 2:
            raise DegenerateInputError("balanced pairs need at least two identities")
        p_pos = 1.0 / (1 + strategy.k_neg_per_pos)
        positive = rng.random(n_pairs) < p_pos
        ids_a = rng.integers(0, n_id, size=n_pairs)
        offset = rng.integers(1, n_id, size=n_pairs)
        ids_b = np.where(positive, ids_a, (ids_a + offset) % n_id)
    ids = np.empty(2 * n_pairs, np.int64)
    ids[0::2] = ids_a
    ids[1::2] = ids_b
    feats = spec.identity_centers[ids] + spec.within_identity_stddev * rng.standard_normal(
        (2 * n_pairs, spec.feature_dim)
    )
    samples = SampleSet(spec.domain_transform.apply(feats), ids, domain_tag)
    member = np.arange(2 * n_pairs, dtype=np.int64).reshape(-1, 2)
    sim = similarity_from_members(samples.features, member)
    labels = np.where(ids_a == ids_b, 1, -1)
    return samples, PairSet(sim, labels, member_indices=member)


def unit_normalize(features: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Project member feature vectors onto the unit sphere (rows of zero norm
    are left untouched)."""
    feats = np.asarray(features, float)
    norms = np.linalg.norm(feats, axis=-1, keepdims=True)
    return feats / np.maximum(norms, eps)
