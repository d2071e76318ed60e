"""Local, global and joint prediction heads."""

from __future__ import annotations

from dataclasses import dataclass

from ..numerics import Tensor, as_tensor, concat, relu, sigmoid
from ..params import ParamStore


@dataclass
class LocalNetParams:
    W1: Tensor
    b1: Tensor
    W2: Tensor
    b2: Tensor

    @classmethod
    def create(cls, store: ParamStore, in_dim: int, h: int):
        return cls(
            store.weight("local.W1", (in_dim, 2 * h)),
            store.bias("local.b1", (2 * h,)),
            store.weight("local.W2", (2 * h, h)),
            store.bias("local.b2", (h,)),
        )

    @classmethod
    def from_store(cls, store):
        return cls(*(store[f"local.{k}"] for k in ("W1", "b1", "W2", "b2")))


def local_preference(E_set: list, params: LocalNetParams) -> Tensor:
    """MLP over the concatenation of all similarity embeddings."""
    x = concat([as_tensor(e) for e in E_set], axis=-1)
    if x.shape[-1] != params.W1.shape[0]:
        raise ValueError(f"local net expects {params.W1.shape[0]} inputs, got {x.shape[-1]}")
    return relu(x @ params.W1 + params.b1) @ params.W2 + params.b2


def global_preference(E_set: list, A) -> Tensor:
    """Project the summed similarity embeddings on the shared plane ``A``: ``(sum_i E_i A^T) A``."""
    A = as_tensor(A)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    s = None
    for e in E_set:
        e = as_tensor(e)
        if e.shape[-1] != A.shape[-1]:
            raise ValueError(f"E has length {e.shape[-1]}, A has length {A.shape[-1]}")
        term = (e * A).sum(axis=-1, keepdims=True)
        s = term if s is None else s + term
    return s * A


@dataclass
class JointNetParams:
    W1: Tensor
    b2: Tensor
    W2: Tensor
    b1: Tensor

    @classmethod
    def create(cls, store: ParamStore, in_dim: int, m: int):
        return cls(
            store.weight("joint.W1", (in_dim, m)),
            store.bias("joint.b2", (m,)),
            store.weight("joint.W2", (m, 1)),
            store.bias("joint.b1", (1,)),
        )

    @classmethod
    def from_store(cls, store):
        return cls(*(store[f"joint.{k}"] for k in ("W1", "b2", "W2", "b1")))


def joint_predict(D_local, D_global, params: JointNetParams) -> Tensor:
    """``sigmoid(W2 relu(W1 [D_local, D_global] + b2) + b1)``; either input may be ``None`` (ablations)."""
    parts = [as_tensor(x) for x in (D_local, D_global) if x is not None]
    z = parts[0] if len(parts) == 1 else concat(parts, axis=-1)
    if z.shape[-1] != params.W1.shape[0]:
        raise ValueError(f"joint net expects {params.W1.shape[0]} inputs, got {z.shape[-1]}")
    hidden = relu(z @ params.W1 + params.b2)
    logit = hidden @ params.W2 + params.b1
    return sigmoid(logit).reshape(-1)
