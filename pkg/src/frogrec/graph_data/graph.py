from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True)
class FriendshipGraph:
    """Undirected friendship graph over users ``0..n-1`` in CSR form.

    Neighbor lists are sorted and duplicate-free; ``edge_day`` maps the
    ``(min, max)`` endpoint pair to the day the friendship was recorded.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    edge_day: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, int]]) -> tuple["FriendshipGraph", int]:
        """Build from ``(u, v, day)`` triples; returns the graph and the number of merged duplicates.

        The earliest day wins when an undirected edge appears more than once.
        """
        days: dict[tuple[int, int], int] = {}
        dupes = 0
        for u, v, day in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on user {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            key = (u, v) if u < v else (v, u)
            if key in days:
                dupes += 1
                days[key] = min(days[key], int(day))
            else:
                days[key] = int(day)
        if days:
            pairs = np.array(list(days), dtype=np.int64)
            rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
            cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        indptr = np.cumsum(indptr)
        return cls(n, indptr, cols, days), dupes

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def check_user(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise KeyError(f"unknown user id {u}")

    def neighbors(self, u: int) -> np.ndarray:
        self.check_user(u)
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def degree(self, u: int | None = None):
        deg = np.diff(self.indptr)
        return deg if u is None else int(deg[u])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def edges(self) -> list[tuple[int, int, int]]:
        return [(u, v, d) for (u, v), d in sorted(self.edge_day.items())]

    def adjacency(self, dtype=np.float64) -> sp.csr_matrix:
        data = np.ones(len(self.indices), dtype=dtype)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))
