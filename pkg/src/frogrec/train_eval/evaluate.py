from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from ..graph_data import FriendshipGraph, PairSet, sample_negatives
from ..seeding import derive_seed
from .metrics import ranks_from_scores, summarize


@dataclass
class CandidateSet:
    """Per-query candidate lists for ranked evaluation."""

    src: np.ndarray  # (q,)
    pos: np.ndarray  # (q,)
    negatives: np.ndarray  # (q, c), padded with -1
    skipped: int = 0


def positive_targets(*sets: PairSet) -> dict[int, set[int]]:
    out: dict[int, set[int]] = defaultdict(set)
    for s in sets:
        pos = s.label == 1
        for u, v in zip(s.src[pos].tolist(), s.dst[pos].tolist()):
            out[u].add(v)
    return out


def build_candidates(
    graph: FriendshipGraph,
    positives: PairSet,
    n_negatives: int,
    seed,
    exclude: dict[int, set[int]] | None = None,
    max_queries: int | None = None,
) -> CandidateSet:
    """Sample ``n_negatives`` non-friends of ``u`` for each positive ``(u, v)``.

    Queries whose user has too few eligible non-friends are skipped and
    counted. ``exclude`` holds further ids to keep out per user (its known
    positive targets).
    """
    rng = np.random.default_rng(seed)
    pos = positives.positives
    idx = np.arange(len(pos))
    if max_queries is not None and len(idx) > max_queries:
        idx = np.sort(rng.choice(idx, size=max_queries, replace=False))
    src, dst, negs, skipped = [], [], [], 0
    for i in idx.tolist():
        u, v = int(pos.src[i]), int(pos.dst[i])
        ban = set(exclude.get(u, ())) if exclude else set()
        ban.add(v)
        sample = sample_negatives(graph, u, n_negatives, rng, exclude=ban)
        if sample.shortfall:
            skipped += 1
            continue
        src.append(u)
        dst.append(v)
        negs.append(sample.ids)
    neg_arr = np.array(negs, dtype=np.int64).reshape(len(src), n_negatives)
    return CandidateSet(np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), neg_arr, skipped)


def rank_all(scorer, cands: CandidateSet) -> np.ndarray:
    q, c = cands.negatives.shape
    if q == 0:
        return np.zeros(0, dtype=np.int64)
    src = np.repeat(cands.src, c + 1)
    dst = np.concatenate([cands.pos[:, None], cands.negatives], axis=1).reshape(-1)
    scores = np.asarray(scorer(src, dst), dtype=np.float64).reshape(q, c + 1)
    return ranks_from_scores(scores[:, 0], cands.pos, scores[:, 1:], cands.negatives)


@dataclass
class EvalResult:
    metrics: dict[str, float]
    per_seed: list[dict[str, float]] = field(default_factory=list)
    queries: int = 0
    skipped: int = 0


def evaluate(
    scorer_factory,
    test: PairSet,
    graph: FriendshipGraph,
    n_negatives: int = 99,
    k_list=(5, 10, 20),
    seeds=(0,),
    exclude: dict[int, set[int]] | None = None,
) -> EvalResult:
    """HR@k / NDCG@k over test positives, averaged over candidate-sampling seeds.

    ``scorer_factory(seed)`` returns a frozen scorer ``f(src, dst)``; the
    same seed drives the negative sampling of that repetition.
    """
    per_seed, queries, skipped = [], 0, 0
    for seed in seeds:
        cands = build_candidates(graph, test, n_negatives, derive_seed(seed, "eval-candidates"), exclude)
        if len(cands.src) == 0:
            raise ValueError("no test positive has enough eligible negatives")
        ranks = rank_all(scorer_factory(seed), cands)
        per_seed.append(summarize(ranks, k_list))
        queries += len(ranks)
        skipped += cands.skipped
    keys = per_seed[0].keys()
    mean = {k: float(np.mean([m[k] for m in per_seed])) for k in keys}
    return EvalResult(mean, per_seed, queries, skipped)
