from __future__ import annotations

from collections import defaultdict

import numpy as np

from .features import PairFeaturizer
from .graph import FriendshipGraph
from .records import DatasetSplit, PairSet
from .sampling import sample_negatives

HISTORY_DAYS = tuple(range(1, 8))
TEST_DAY = 8


def split_temporal(
    instances: PairSet,
    graph: FriendshipGraph,
    seed,
    featurizer: PairFeaturizer | None = None,
    train_fraction: float = 0.8,
    neg_ratio: int = 3,
    history_days=HISTORY_DAYS,
    test_day: int = TEST_DAY,
) -> DatasetSplit:
    """Temporal split into train / validation (history days) and test (``test_day``).

    Each source user's history positives are shuffled and the first
    ``round(0.8 * count)`` go to train, the rest to validation. Every
    positive then gets ``neg_ratio`` sampled non-friend negatives carrying the
    same day stamp. History negatives present in ``instances`` are dropped in
    favour of the sampled ones; test-day instances are kept as given. Pair
    features are recomputed with ``featurizer`` for every instance.
    """
    rng = np.random.default_rng(seed)
    featurizer = featurizer or PairFeaturizer(graph)
    # features are recomputed so sampled negatives and file rows agree column for column
    instances = PairSet(instances.src, instances.dst, instances.label, instances.day, featurizer(instances.src, instances.dst))
    n_feats = instances.feats.shape[1]
    history = np.isin(instances.day, list(history_days)) & (instances.label == 1)

    # ids a user must never get as negative: any of its own positive targets
    targets: dict[int, set[int]] = defaultdict(set)
    for u, v in zip(instances.src[instances.label == 1], instances.dst[instances.label == 1]):
        targets[int(u)].add(int(v))

    by_user: dict[int, list[int]] = defaultdict(list)
    for i in np.flatnonzero(history):
        by_user[int(instances.src[i])].append(int(i))

    train_idx, val_idx = [], []
    for u in sorted(by_user):
        rows = np.array(by_user[u])
        rows = rows[rng.permutation(len(rows))]
        n_train = int(np.floor(train_fraction * len(rows) + 0.5))
        train_idx.extend(rows[:n_train].tolist())
        val_idx.extend(rows[n_train:].tolist())

    def with_negatives(idx: list[int]) -> PairSet:
        pos = instances.subset(np.array(sorted(idx), dtype=np.int64))
        if len(pos) == 0 or neg_ratio == 0:
            return pos
        ns, nd, nday = [], [], []
        for u, day in zip(pos.src.tolist(), pos.day.tolist()):
            neg = sample_negatives(graph, u, neg_ratio, rng, exclude=targets[u])
            ns.extend([u] * len(neg.ids))
            nd.extend(neg.ids)
            nday.extend([day] * len(neg.ids))
        ns, nd = np.array(ns, dtype=np.int64), np.array(nd, dtype=np.int64)
        feats = featurizer(ns, nd) if len(ns) else np.zeros((0, n_feats))
        negs = PairSet(ns, nd, np.zeros(len(ns), dtype=np.int64), nday, feats)
        return PairSet.concat([pos, negs])

    test = instances.subset(instances.day == test_day)
    users_with_history = set(by_user)
    excluded = sorted(set(instances.src.tolist()) - users_with_history)
    return DatasetSplit(with_negatives(train_idx), with_negatives(val_idx), test, excluded)
