"""Emb-Net: per-modality projections to ``d`` and the GraphSAGE-style graph encoder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_data import FriendshipGraph, NeighborTable, PairFeaturizer, sample_neighbor_table
from .graph_data.records import Dataset, UserRecord
from .numerics import Tensor, as_tensor, neighbor_max, relu, spmm
from .params import ParamStore

USER_MODALITIES = ("profile", "image", "text", "graph")
PAIR_MODALITY = "pair"
ALL_MODALITIES = USER_MODALITIES + (PAIR_MODALITY,)


@dataclass
class ProjectionParams:
    W1: Tensor
    b1: Tensor
    W2: Tensor
    b2: Tensor
    W3: Tensor
    b3: Tensor

    @property
    def in_dim(self) -> int:
        return self.W1.shape[0]

    @property
    def out_dim(self) -> int:
        return self.W3.shape[1]

    @classmethod
    def create(cls, store: ParamStore, prefix: str, in_dim: int, hidden: tuple[int, int], d: int):
        d1, d2 = hidden
        return cls(
            store.weight(f"{prefix}.W1", (in_dim, d1)),
            store.bias(f"{prefix}.b1", (d1,)),
            store.weight(f"{prefix}.W2", (d1, d2)),
            store.bias(f"{prefix}.b2", (d2,)),
            store.weight(f"{prefix}.W3", (d2, d)),
            store.bias(f"{prefix}.b3", (d,)),
        )

    @classmethod
    def from_store(cls, store, prefix: str):
        return cls(*(store[f"{prefix}.{k}"] for k in ("W1", "b1", "W2", "b2", "W3", "b3")))


def project_modality(raw, params: ProjectionParams) -> Tensor:
    """Three affine layers, ReLU after the first two. A 1-D input gives a 1 x d row."""
    x = as_tensor(raw)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.shape[-1] != params.in_dim:
        raise ValueError(f"modality input has {x.shape[-1]} features, projection expects {params.in_dim}")
    h = relu(x @ params.W1 + params.b1)
    h = relu(h @ params.W2 + params.b2)
    return h @ params.W3 + params.b3


@dataclass
class SageParams:
    self_weights: list[Tensor]
    neighbor_weights: list[Tensor]
    aggregator: str = "mean"

    @property
    def depth(self) -> int:
        return len(self.self_weights)

    @classmethod
    def create(cls, store: ParamStore, prefix: str, dims: list[int], aggregator: str = "mean"):
        if aggregator not in ("mean", "max"):
            raise ValueError(f"aggregator must be 'mean' or 'max', got {aggregator!r}")
        selfs, nbrs = [], []
        for layer, (a, b) in enumerate(zip(dims[:-1], dims[1:]), start=1):
            selfs.append(store.weight(f"{prefix}.self{layer}", (a, b)))
            nbrs.append(store.weight(f"{prefix}.nbr{layer}", (a, b)))
        return cls(selfs, nbrs, aggregator)

    @classmethod
    def from_store(cls, store, prefix: str, depth: int, aggregator: str):
        return cls(
            [store[f"{prefix}.self{i}"] for i in range(1, depth + 1)],
            [store[f"{prefix}.nbr{i}"] for i in range(1, depth + 1)],
            aggregator,
        )


def sample_sage_tables(graph: FriendshipGraph, sample_sizes, seed) -> list[NeighborTable]:
    """One neighbor table per hop; table ``i`` holds up to ``sample_sizes[i]`` neighbors per node."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return [sample_neighbor_table(graph, int(s), rng) for s in sample_sizes]


def encode_graph_all(node_features, params: SageParams, tables: list[NeighborTable]) -> Tensor:
    """Run the SAGE layers for every node at once.

    Layer ``l`` aggregates with the table of hop ``K - l + 1``: the outermost
    hop feeds the first layer and the hop-1 sample feeds the last one.
    """
    if len(tables) != params.depth:
        raise ValueError(f"need {params.depth} neighbor tables, got {len(tables)}")
    h = as_tensor(node_features)
    for layer in range(params.depth):
        table = tables[params.depth - 1 - layer]
        if params.aggregator == "mean":
            agg = spmm(table.mean_matrix(h.data.dtype), h)
        else:
            agg = neighbor_max(h, table.index, table.mask)
        h = relu(h @ params.self_weights[layer] + agg @ params.neighbor_weights[layer])
    return h


def encode_graph(graph: FriendshipGraph, u: int, node_features, params: SageParams, sample_sizes, seed) -> Tensor:
    """Graph embedding of a single user (a row of :func:`encode_graph_all`)."""
    graph.check_user(u)
    if len(sample_sizes) != params.depth:
        raise ValueError(f"sample_sizes must have {params.depth} entries")
    tables = sample_sage_tables(graph, sample_sizes, seed)
    return encode_graph_all(node_features, params, tables)[u]


@dataclass
class ModalitySet:
    names: tuple[str, ...]
    vectors: list[np.ndarray]

    @property
    def t(self) -> int:
        return len(self.vectors)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.vectors[self.names.index(name)]


def _standardize(x: np.ndarray) -> np.ndarray:
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    return (x - mu) / np.where(sd > 0, sd, 1.0)


class FeatureTables:
    """Model-ready inputs: standardized per-user modality matrices and pair featurization."""

    def __init__(self, graph: FriendshipGraph, profile, image=None, text=None, interactions=None):
        self.graph = graph
        self.raw = {"profile": profile, "image": image, "text": text}
        self.user = {k: (_standardize(np.asarray(v, dtype=np.float64)) if v is not None else None)
                     for k, v in self.raw.items()}
        self.user["graph"] = self.user["profile"]
        self.featurizer = PairFeaturizer(graph, interactions)

    @classmethod
    def from_dataset(cls, ds: Dataset) -> "FeatureTables":
        return cls(ds.graph, ds.modality_matrix("profile"), ds.modality_matrix("image"),
                   ds.modality_matrix("text"), ds.interactions)

    @classmethod
    def from_records(cls, graph: FriendshipGraph, records: list[UserRecord], interactions=None):
        def stack(name):
            vecs = [getattr(r, name) for r in records]
            return None if any(v is None for v in vecs) else np.stack(vecs)

        return cls(graph, stack("profile"), stack("image"), stack("text"), interactions)

    @property
    def n(self) -> int:
        return self.graph.n

    def input_dim(self, modality: str) -> int:
        if modality == PAIR_MODALITY:
            return len(self.featurizer(np.array([0]), np.array([1]))[0]) if self.n > 1 else 4
        table = self.user.get(modality)
        if table is None:
            raise ValueError(f"dataset has no {modality!r} vectors; disable the modality in the config")
        return table.shape[1]

    @staticmethod
    def transform_pair(feats: np.ndarray) -> np.ndarray:
        """Squash non-negative counts with log1p."""
        return np.log1p(np.maximum(np.asarray(feats, dtype=np.float64), 0.0))

    def pair_inputs(self, src, dst, feats=None) -> np.ndarray:
        if feats is None:
            feats = self.featurizer(src, dst)
        return self.transform_pair(feats)

