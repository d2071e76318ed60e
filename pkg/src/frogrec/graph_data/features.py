"""Pair-level interaction features."""

from __future__ import annotations

from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .graph import FriendshipGraph

PAIR_FEATURE_NAMES = ("common_friends", "jaccard", "adamic_adar", "coplay")


class InteractionLog:
    """Symmetric per-pair co-interaction counts (e.g. games played together)."""

    def __init__(self, n: int, entries: Iterable[tuple[int, int, float]] = ()):
        self.n = n
        acc: dict[int, float] = {}
        for u, v, c in entries:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"interaction of user {u} with itself")
            a, b = (u, v) if u < v else (v, u)
            key = a * n + b
            acc[key] = acc.get(key, 0.0) + float(c)
        self.keys = np.array(sorted(acc), dtype=np.int64)
        self.counts = np.array([acc[k] for k in self.keys], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.keys)

    def entries(self) -> list[tuple[int, int, float]]:
        return [(int(k // self.n), int(k % self.n), float(c)) for k, c in zip(self.keys, self.counts)]

    def lookup(self, u, v) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=np.int64))
        v = np.atleast_1d(np.asarray(v, dtype=np.int64))
        key = np.minimum(u, v) * self.n + np.maximum(u, v)
        if len(self.keys) == 0:
            return np.zeros(len(key))
        pos = np.clip(np.searchsorted(self.keys, key), 0, len(self.keys) - 1)
        return np.where(self.keys[pos] == key, self.counts[pos], 0.0)


def pair_features(graph: FriendshipGraph, u: int, v: int, log: InteractionLog | None = None) -> np.ndarray:
    """Common-friend count, Jaccard overlap, Adamic-Adar score and co-play count of ``(u, v)``."""
    if u == v:
        raise ValueError("pair features need two distinct users")
    nu = set(graph.neighbors(u).tolist())
    nv = set(graph.neighbors(v).tolist())
    common = nu & nv
    union = nu | nv
    jaccard = len(common) / len(union) if union else 0.0
    aa = sum(1.0 / np.log(graph.degree(w)) for w in common)
    coplay = float(log.lookup(u, v)[0]) if log is not None else 0.0
    return np.array([len(common), jaccard, aa, coplay], dtype=np.float64)


class PairFeaturizer:
    """Vectorized :func:`pair_features` over many pairs."""

    def __init__(self, graph: FriendshipGraph, log: InteractionLog | None = None):
        self.graph = graph
        self.log = log
        self.adj = graph.adjacency()
        deg = graph.degree().astype(np.float64)
        self.deg = deg
        with np.errstate(divide="ignore"):
            w = np.where(deg > 1, 1.0 / np.log(np.maximum(deg, 2.0)), 0.0)
        self.aa_weights = sp.diags(w)

    def __call__(self, u, v, chunk: int = 20000) -> np.ndarray:
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        out = np.zeros((len(u), len(PAIR_FEATURE_NAMES)))
        for s in range(0, len(u), chunk):
            uu, vv = u[s : s + chunk], v[s : s + chunk]
            both = self.adj[uu].multiply(self.adj[vv]).tocsr()
            common = np.asarray(both.sum(axis=1)).ravel()
            aa = np.asarray((both @ self.aa_weights).sum(axis=1)).ravel()
            union = self.deg[uu] + self.deg[vv] - common
            jac = np.divide(common, union, out=np.zeros_like(common), where=union > 0)
            coplay = self.log.lookup(uu, vv) if self.log is not None and len(uu) else np.zeros(len(uu))
            out[s : s + chunk] = np.column_stack([common, jac, aa, coplay])
        return out
