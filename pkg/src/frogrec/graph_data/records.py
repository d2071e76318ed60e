from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .features import InteractionLog
from .graph import FriendshipGraph


@dataclass(frozen=True)
class UserRecord:
    user_id: int
    profile: np.ndarray
    image: np.ndarray | None = None
    text: np.ndarray | None = None


@dataclass(frozen=True)
class PairInstance:
    src: int
    dst: int
    label: int
    pair_feats: np.ndarray
    day: int

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"pair instance with src == dst ({self.src})")
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


class PairSet:
    """Column-oriented collection of pair instances."""

    def __init__(self, src, dst, label, day, feats):
        self.src = np.asarray(src, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        self.label = np.asarray(label, dtype=np.int64)
        self.day = np.asarray(day, dtype=np.int64)
        feats = np.asarray(feats, dtype=np.float64)
        self.feats = feats if feats.ndim == 2 and len(feats) == len(self.src) else feats.reshape(len(self.src), -1)
        if np.any(self.src == self.dst):
            raise ValueError("pair instance with src == dst")
        if not np.isin(self.label, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")

    @classmethod
    def empty(cls, n_feats: int) -> "PairSet":
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z, z, z, np.zeros((0, n_feats)))

    @classmethod
    def from_instances(cls, items: list[PairInstance], n_feats: int) -> "PairSet":
        if not items:
            return cls.empty(n_feats)
        return cls(
            [p.src for p in items],
            [p.dst for p in items],
            [p.label for p in items],
            [p.day for p in items],
            np.stack([p.pair_feats for p in items]),
        )

    @classmethod
    def concat(cls, parts: list["PairSet"]) -> "PairSet":
        return cls(
            np.concatenate([p.src for p in parts]),
            np.concatenate([p.dst for p in parts]),
            np.concatenate([p.label for p in parts]),
            np.concatenate([p.day for p in parts]),
            np.concatenate([p.feats for p in parts]),
        )

    def subset(self, idx) -> "PairSet":
        return PairSet(self.src[idx], self.dst[idx], self.label[idx], self.day[idx], self.feats[idx])

    @property
    def positives(self) -> "PairSet":
        return self.subset(self.label == 1)

    def __len__(self) -> int:
        return len(self.src)

    def __iter__(self) -> Iterator[PairInstance]:
        for i in range(len(self)):
            yield self[i]

    def __getitem__(self, i: int) -> PairInstance:
        return PairInstance(int(self.src[i]), int(self.dst[i]), int(self.label[i]), self.feats[i], int(self.day[i]))


@dataclass
class DatasetSplit:
    train: PairSet
    validation: PairSet
    test: PairSet
    excluded_users: list[int] = field(default_factory=list)


@dataclass
class Dataset:
    """Everything a run needs: graph, per-user records, instances and the interaction log."""

    graph: FriendshipGraph
    records: list[UserRecord]
    instances: PairSet
    interactions: InteractionLog
    external_ids: list[str] = field(default_factory=list)
    load_report: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.graph.n

    def modality_matrix(self, name: str) -> np.ndarray | None:
        vecs = [getattr(r, name) for r in self.records]
        if any(v is None for v in vecs):
            return None
        return np.stack(vecs).astype(np.float64)

