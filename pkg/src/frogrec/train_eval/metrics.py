"""Ranking metrics for one relevant candidate per query."""

from __future__ import annotations

import math

import numpy as np


def _check(ranks) -> np.ndarray:
    r = np.asarray(ranks)
    if r.size == 0:
        raise ValueError("ranks must not be empty")
    if np.any(r < 1):
        raise ValueError("ranks are 1-based")
    return r


def hit_rate_at_k(ranks, k: int) -> float:
    r = _check(ranks)
    return float(np.mean(r <= k))


def ndcg_at_k(ranks, k: int) -> float:
    r = _check(ranks).astype(np.float64)
    gains = np.where(r <= k, 1.0 / np.log2(r + 1.0), 0.0)
    return float(gains.mean())


def rank_candidates(scorer, u: int, v: int, negatives) -> int:
    """1-based position of ``v`` after sorting candidates by descending score, ties by ascending id."""
    negatives = [int(w) for w in negatives]
    if v in negatives:
        raise ValueError("the true candidate must not appear among the negatives")
    cands = np.array([v] + negatives, dtype=np.int64)
    scores = np.asarray(scorer(np.full(len(cands), u, dtype=np.int64), cands), dtype=np.float64)
    order = sorted(range(len(cands)), key=lambda i: (-scores[i], cands[i]))
    return order.index(0) + 1


def ranks_from_scores(pos_scores, pos_ids, neg_scores, neg_ids) -> np.ndarray:
    """Vectorized :func:`rank_candidates` over queries.

    ``neg_scores``/``neg_ids`` are (q, c) arrays; padded slots carry id -1
    and are ignored.
    """
    pos_scores = np.asarray(pos_scores)[:, None]
    pos_ids = np.asarray(pos_ids)[:, None]
    valid = np.asarray(neg_ids) >= 0
    ahead = (neg_scores > pos_scores) | ((neg_scores == pos_scores) & (neg_ids < pos_ids))
    return 1 + (ahead & valid).sum(axis=1)


def summarize(ranks, k_list) -> dict[str, float]:
    out = {}
    for k in k_list:
        out[f"HR@{k}"] = hit_rate_at_k(ranks, k)
        out[f"NDCG@{k}"] = ndcg_at_k(ranks, k)
    return out


def expected_constant_hit_rate(k: int, candidates: int) -> tuple[float, float]:
    """Mean and per-query std of HR@k when the true item's rank is uniform on 1..candidates."""
    p = min(k, candidates) / candidates
    return p, math.sqrt(p * (1 - p))
