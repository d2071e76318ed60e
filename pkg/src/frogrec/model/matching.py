"""Co-attention pairwise matching for one modality."""

from __future__ import annotations

from dataclasses import dataclass

from ..numerics import Tensor, as_tensor, mean, softmax, tanh
from ..params import ParamStore


@dataclass
class MatchingParams:
    """Role parameters for one modality: ``P`` is d x 1 and ``Q`` is d x d."""

    P_src: Tensor
    Q_src: Tensor
    P_dst: Tensor
    Q_dst: Tensor

    @classmethod
    def create(cls, store: ParamStore, prefix: str, d: int, tie_roles: bool = False):
        P_src = store.weight(f"{prefix}.P_src", (d, 1), fan_in=d)
        Q_src = store.weight(f"{prefix}.Q_src", (d, d))
        if tie_roles:
            return cls(P_src, Q_src, P_src, Q_src)
        return cls(P_src, Q_src, store.weight(f"{prefix}.P_dst", (d, 1), fan_in=d), store.weight(f"{prefix}.Q_dst", (d, d)))

    @classmethod
    def from_store(cls, store, prefix: str, tie_roles: bool = False):
        if tie_roles:
            return cls(store[f"{prefix}.P_src"], store[f"{prefix}.Q_src"], store[f"{prefix}.P_src"], store[f"{prefix}.Q_src"])
        return cls(*(store[f"{prefix}.{k}"] for k in ("P_src", "Q_src", "P_dst", "Q_dst")))


def _rows(M) -> Tensor:
    """View a 1 x d row, a d-vector or a (B, d) batch as (B, 1, d)."""
    M = as_tensor(M)
    if M.ndim == 1:
        return M.reshape(1, 1, -1)
    if M.ndim == 2:
        return M.reshape(M.shape[0], 1, M.shape[1])
    return M


def attention_values(M, P, Q) -> Tensor:
    """``C = P M Q``: (d x 1)(1 x d)(d x d), batched over leading axes of ``M``."""
    M, P, Q = _rows(M), as_tensor(P), as_tensor(Q)
    d = M.shape[-1]
    if P.shape != (d, 1) or Q.shape != (d, d):
        raise ValueError(f"attention_values shape mismatch: M {M.shape}, P {P.shape}, Q {Q.shape}")
    return (P @ M) @ Q


def affinity(C_u, C_v) -> Tensor:
    """``G = tanh(C_u^T C_v)``."""
    C_u, C_v = as_tensor(C_u), as_tensor(C_v)
    if C_u.shape != C_v.shape or C_u.shape[-1] != C_u.shape[-2]:
        raise ValueError(f"affinity needs two equal square matrices, got {C_u.shape} and {C_v.shape}")
    return tanh(C_u.T @ C_v)


def relevance_vectors(G) -> tuple[Tensor, Tensor]:
    """Softmax of the row means (forward) and of the column means (backward) of ``G``."""
    G = as_tensor(G)
    forward = softmax(mean(G, axis=-1), axis=-1)
    backward = softmax(mean(G, axis=-2), axis=-1)
    return forward, backward


def pair_similarity(M_u, M_v, params: MatchingParams, return_parts: bool = False):
    """``E = M_u * R_fwd + M_v * R_bwd`` for a batch of (B, d) embeddings.

    ``u`` plays the source role and ``v`` the destination role. With
    ``return_parts`` the intermediate C, G and R tensors are returned too.
    """
    Mu, Mv = _rows(M_u), _rows(M_v)
    if Mu.shape != Mv.shape:
        raise ValueError(f"embedding shapes differ: {Mu.shape} vs {Mv.shape}")
    B, _, d = Mu.shape
    C_u = attention_values(Mu, params.P_src, params.Q_src)
    C_v = attention_values(Mv, params.P_dst, params.Q_dst)
    G = affinity(C_u, C_v)
    R_fwd, R_bwd = relevance_vectors(G)
    E = Mu.reshape(B, d) * R_fwd + Mv.reshape(B, d) * R_bwd
    if return_parts:
        return E, {"C_u": C_u, "C_v": C_v, "G": G, "R_fwd": R_fwd, "R_bwd": R_bwd}
    return E
