"""Neighbor and negative sampling."""

from __future__ import annotations

from typing import Iterable, NamedTuple

import numpy as np
import scipy.sparse as sp

from .graph import FriendshipGraph


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def k_hop_neighbors(graph: FriendshipGraph, u: int, K: int, sample_sizes, seed) -> list[list[int]]:
    """Sample each exact hop-``i`` frontier of ``u`` without replacement.

    Layer ``i`` holds at most ``sample_sizes[i]`` ids at shortest-path
    distance ``i + 1`` from ``u``, returned sorted.
    """
    graph.check_user(u)
    if K < 1:
        raise ValueError("K must be >= 1")
    if len(sample_sizes) != K or any(s < 1 for s in sample_sizes):
        raise ValueError("sample_sizes needs K entries, each >= 1")
    rng = _rng(seed)
    visited = {u}
    frontier = np.array([u], dtype=np.int64)
    layers = []
    for size in sample_sizes:
        if len(frontier):
            reach = np.unique(np.concatenate([graph.neighbors(int(w)) for w in frontier]))
        else:
            reach = np.zeros(0, dtype=np.int64)
        frontier = np.array([w for w in reach if w not in visited], dtype=np.int64)
        visited.update(frontier.tolist())
        if len(frontier) > size:
            picked = rng.choice(frontier, size=size, replace=False)
        else:
            picked = frontier
        layers.append(sorted(int(w) for w in picked))
    return layers


class NegativeSample(NamedTuple):
    ids: list[int]
    shortfall: bool


def sample_negatives(graph: FriendshipGraph, u: int, count: int, seed, exclude: Iterable[int] = ()) -> NegativeSample:
    """Draw ``count`` distinct users that are neither ``u`` nor its friends.

    Ids in ``exclude`` are also skipped. When fewer eligible users exist,
    all of them are returned (shuffled) with ``shortfall=True``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = _rng(seed)
    banned = set(graph.neighbors(u).tolist())
    banned.add(u)
    banned.update(int(x) for x in exclude)
    n_eligible = graph.n - sum(1 for b in banned if 0 <= b < graph.n)
    if n_eligible <= 4 * count:
        pool = np.array([w for w in range(graph.n) if w not in banned], dtype=np.int64)
        take = min(count, len(pool))
        ids = rng.choice(pool, size=take, replace=False) if take else pool[:0]
        return NegativeSample([int(w) for w in ids], take < count)
    picked: list[int] = []
    seen: set[int] = set()
    while len(picked) < count:
        for w in rng.integers(0, graph.n, size=2 * count).tolist():
            if w in banned or w in seen:
                continue
            seen.add(w)
            picked.append(w)
            if len(picked) == count:
                break
    return NegativeSample(picked, False)


class NeighborTable(NamedTuple):
    index: np.ndarray  # (n, size) neighbor ids, padded with 0
    mask: np.ndarray  # (n, size) True where index is a real neighbor

    def mean_matrix(self, dtype=np.float64) -> sp.csr_matrix:
        """Row-normalized sparse matrix averaging each node's sampled neighbors."""
        n, size = self.index.shape
        counts = self.mask.sum(axis=1)
        rows = np.repeat(np.arange(n), size)[self.mask.reshape(-1)]
        cols = self.index.reshape(-1)[self.mask.reshape(-1)]
        w = (1.0 / np.maximum(counts, 1))[rows]
        return sp.csr_matrix((w.astype(dtype), (rows, cols)), shape=(n, n))


def sample_neighbor_table(graph: FriendshipGraph, size: int, seed) -> NeighborTable:
    """Sample up to ``size`` neighbors per node without replacement, for all nodes at once.

    Each edge slot gets a uniform random key; a node keeps the ``size``
    neighbors with the smallest keys, listed in ascending id order.
    """
    rng = _rng(seed)
    n = graph.n
    deg = np.diff(graph.indptr)
    rows = np.repeat(np.arange(n), deg)
    keys = rng.random(len(graph.indices))
    # rows are non-decreasing, so row + key in [row, row + 1) sorts by row first
    order = np.argsort(rows + keys, kind="stable")
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order)) - graph.indptr[rows[order]]
    keep = rank < size
    kept_rows, kept_cols = rows[keep], graph.indices[keep]
    # indices are already ascending within each row
    slot = np.arange(len(kept_rows)) - np.searchsorted(kept_rows, kept_rows, side="left")
    index = np.zeros((n, size), dtype=np.int64)
    mask = np.zeros((n, size), dtype=bool)
    index[kept_rows, slot] = kept_cols
    mask[kept_rows, slot] = True
    return NeighborTable(index, mask)
