"""Synthetic multi-modal social graphs with latent communities.

Each user belongs to a latent community that shifts its profile, image and
text vectors. The static friendship graph is built with community homophily
(strength ``beta``) plus triadic-closure edges. Friend requests for days
1..8 are then drawn from a softmax over candidates that favours shared
community, common friends, co-play history and similar game level.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .features import InteractionLog, PairFeaturizer
from .graph import FriendshipGraph
from .records import Dataset, PairSet, UserRecord


@dataclass
class GeneratorConfig:
    n: int = 5000
    communities: int = 10
    profile_dim: int = 8
    image_dim: int = 16
    text_dim: int = 16
    beta: float = 3.0
    days: int = 8
    mean_degree: float = 10.0
    closure_fraction: float = 0.3
    active_rate: float = 0.25
    random_candidates: int = 1000
    coplay_partners: int = 3
    profile_signal: float = 1.0
    image_signal: float = 1.0
    text_signal: float = 0.6
    noise: float = 1.0
    level_weight: float = 4.0
    common_friend_weight: float = 1.0
    coplay_weight: float = 1.0

    def validate(self) -> None:
        if self.n < 10:
            raise ValueError(f"n must be >= 10, got {self.n}")
        if self.communities < 1:
            raise ValueError("communities must be >= 1")
        if self.profile_dim < 3:
            raise ValueError("profile_dim must be >= 3 (level, gender, activity)")
        if self.image_dim < 1 or self.text_dim < 1:
            raise ValueError("modality dimensions must be >= 1")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.days != 8:
            raise ValueError("days must be 8 (7 history days + 1 test day)")
        if not 0 < self.active_rate <= 1:
            raise ValueError("active_rate must be in (0, 1]")
        if self.mean_degree <= 0:
            raise ValueError("mean_degree must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def _homophilous_edges(rng, comm, cfg: GeneratorConfig) -> set[tuple[int, int]]:
    n = cfg.n
    members = [np.flatnonzero(comm == c) for c in range(cfg.communities)]
    weight = np.exp(cfg.beta)
    stubs = rng.poisson(cfg.mean_degree / 2.0, size=n)
    edges: set[tuple[int, int]] = set()
    for u in range(n):
        c = comm[u]
        n_same = len(members[c])
        p_same = n_same * weight / (n_same * weight + (n - n_same))
        same = rng.random(stubs[u]) < p_same
        for s in same:
            if s:
                v = int(members[c][rng.integers(n_same)])
            else:
                v = int(rng.integers(n))
                while comm[v] == c:
                    v = int(rng.integers(n))
            if v != u:
                edges.add((min(u, v), max(u, v)))
    return edges


def _triadic_closure(rng, n: int, edges: set[tuple[int, int]], count: int) -> None:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in sorted(edges):
        adj[u].append(v)
        adj[v].append(u)
    nodes = [u for u in range(n) if adj[u]]
    if not nodes:
        return
    for _ in range(count):
        u = nodes[rng.integers(len(nodes))]
        w = adj[u][rng.integers(len(adj[u]))]
        x = adj[w][rng.integers(len(adj[w]))]
        if x != u:
            edges.add((min(u, x), max(u, x)))


def _user_vectors(rng, comm, level, cfg: GeneratorConfig):
    n, C = cfg.n, cfg.communities
    prof_centroids = rng.standard_normal((C, cfg.profile_dim - 3))
    img_centroids = rng.standard_normal((C, cfg.image_dim))
    txt_centroids = rng.standard_normal((C, cfg.text_dim))
    gender = rng.integers(0, 2, size=n).astype(np.float64)
    activity = rng.gamma(2.0, 0.5, size=n)
    profile = np.column_stack(
        [
            level * 4.0 - 2.0,
            gender,
            activity,
            cfg.profile_signal * prof_centroids[comm] + cfg.noise * rng.standard_normal((n, cfg.profile_dim - 3)),
        ]
    )
    image = cfg.image_signal * img_centroids[comm] + cfg.noise * rng.standard_normal((n, cfg.image_dim))
    text = cfg.text_signal * txt_centroids[comm] + cfg.noise * rng.standard_normal((n, cfg.text_dim))
    return profile, image, text


def generate_synthetic(cfg: GeneratorConfig, seed: int) -> Dataset:
    """Generate graph, user records, interaction log and day-stamped positives."""
    cfg.validate()
    rng = np.random.default_rng(seed)
    n = cfg.n
    comm = rng.integers(0, cfg.communities, size=n)
    level = rng.random(n)
    profile, image, text = _user_vectors(rng, comm, level, cfg)

    edges = _homophilous_edges(rng, comm, cfg)
    _triadic_closure(rng, n, edges, int(cfg.closure_fraction * len(edges)))
    graph, _ = FriendshipGraph.from_edges(n, ((u, v, 0) for u, v in sorted(edges)))
    adj = graph.adjacency()
    two_hop = (adj @ adj).tocsr()
    two_hop.setdiag(0)
    two_hop.eliminate_zeros()

    def candidates(u: int, banned: set[int]):
        row = slice(two_hop.indptr[u], two_hop.indptr[u + 1])
        fof = two_hop.indices[row]
        rand = rng.integers(0, n, size=cfg.random_candidates)
        cand = np.unique(np.concatenate([fof, rand]))
        return np.array([c for c in cand.tolist() if c not in banned], dtype=np.int64)

    def affinity(u: int, cand: np.ndarray, coplay: np.ndarray) -> np.ndarray:
        nb = graph.neighbors(u)
        cf = np.asarray(adj[cand][:, nb].sum(axis=1)).ravel() if len(nb) else np.zeros(len(cand))
        return (
            cfg.beta * (comm[cand] == comm[u])
            + cfg.common_friend_weight * np.log1p(cf)
            + cfg.coplay_weight * np.log1p(coplay)
            - cfg.level_weight * np.abs(level[cand] - level[u])
        )

    def draw(u, cand, logits, k):
        p = np.exp(logits - logits.max())
        p /= p.sum()
        k = min(k, int((p > 0).sum()))
        return rng.choice(cand, size=k, replace=False, p=p)

    # co-play history, drawn from the same affinity without the co-play term
    entries = []
    for u in range(n):
        banned = {u}
        cand = candidates(u, banned)
        if len(cand) == 0:
            continue
        partners = draw(u, cand, affinity(u, cand, np.zeros(len(cand))), cfg.coplay_partners)
        for v in partners.tolist():
            entries.append((u, v, float(1 + rng.poisson(2.0))))
    log = InteractionLog(n, entries)

    requested: dict[int, set[int]] = {}
    src, dst, day = [], [], []
    for d in range(1, cfg.days + 1):
        active = np.flatnonzero(rng.random(n) < cfg.active_rate)
        for u in active.tolist():
            banned = requested.setdefault(u, set())
            banned.add(u)
            banned.update(graph.neighbors(u).tolist())
            cand = candidates(u, banned)
            if len(cand) == 0:
                continue
            logits = affinity(u, cand, log.lookup(np.full(len(cand), u), cand))
            v = int(draw(u, cand, logits, 1)[0])
            banned.add(v)
            src.append(u)
            dst.append(v)
            day.append(d)

    featurizer = PairFeaturizer(graph, log)
    src_a, dst_a = np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64)
    instances = PairSet(src_a, dst_a, np.ones(len(src_a), dtype=np.int64), day, featurizer(src_a, dst_a))
    records = [UserRecord(u, profile[u], image[u], text[u]) for u in range(n)]
    return Dataset(
        graph=graph,
        records=records,
        instances=instances,
        interactions=log,
        external_ids=[str(u) for u in range(n)],
        load_report={"communities": comm.tolist(), "generator": cfg.to_dict(), "seed": seed},
    )
