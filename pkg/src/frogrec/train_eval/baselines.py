"""Logistic regression and MLP baselines over concatenated pair and user features."""

from __future__ import annotations

import numpy as np

from ..encoders import FeatureTables
from ..numerics import Tensor, no_grad, relu, sigmoid
from ..params import ParamStore

BASELINE_MODALITIES = ("profile", "image", "text")


def baseline_inputs(tables: FeatureTables, src, dst, pair_feats=None) -> np.ndarray:
    """``[log1p(pair features), x_u, x_v]`` with each user's available modality vectors concatenated."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    user = [tables.user[m] for m in BASELINE_MODALITIES if tables.user.get(m) is not None]
    xu = np.concatenate([t[src] for t in user], axis=1)
    xv = np.concatenate([t[dst] for t in user], axis=1)
    return np.concatenate([tables.pair_inputs(src, dst, pair_feats), xu, xv], axis=1)


class _Baseline:
    kind = "baseline"

    def __init__(self, in_dim: int, seed: int = 0, hidden: int = 32):
        self.in_dim = int(in_dim)
        self.hidden = int(hidden)
        self.seed = seed
        self.params = ParamStore(np.random.default_rng(seed))
        self._build()

    def logits(self, x: Tensor) -> Tensor:
        raise NotImplementedError

    def forward(self, tables: FeatureTables, src, dst, pair_feats=None, seed=0, trace=None) -> Tensor:
        x = Tensor(baseline_inputs(tables, src, dst, pair_feats))
        return sigmoid(self.logits(x)).reshape(-1)

    def make_scorer(self, tables: FeatureTables, seed=0, chunk: int = 20000):
        def scorer(src, dst, pair_feats=None):
            src = np.asarray(src)
            out = np.empty(len(src))
            with no_grad():
                for s in range(0, len(src), chunk):
                    pf = None if pair_feats is None else pair_feats[s : s + chunk]
                    out[s : s + chunk] = self.forward(tables, src[s : s + chunk], dst[s : s + chunk], pf).data
            return out

        return scorer

    def state(self) -> dict:
        return {"kind": self.kind, "version": 1, "in_dim": self.in_dim, "hidden": self.hidden, "seed": self.seed}


class LogisticRegression(_Baseline):
    kind = "lr"

    def _build(self):
        self.w = self.params.weight("lr.w", (self.in_dim, 1))
        self.b = self.params.bias("lr.b", (1,))

    def logits(self, x):
        return x @ self.w + self.b


class MLPBaseline(_Baseline):
    """Three fully-connected layers: in -> 2H -> H -> 1."""

    kind = "mlp"

    def _build(self):
        H = self.hidden
        p = self.params
        self.layers = [
            (p.weight("mlp.W1", (self.in_dim, 2 * H)), p.bias("mlp.b1", (2 * H,))),
            (p.weight("mlp.W2", (2 * H, H)), p.bias("mlp.b2", (H,))),
            (p.weight("mlp.W3", (H, 1)), p.bias("mlp.b3", (1,))),
        ]

    def logits(self, x):
        h = x
        for i, (W, b) in enumerate(self.layers):
            h = h @ W + b
            if i < len(self.layers) - 1:
                h = relu(h)
        return h


def baseline_lr(tables: FeatureTables, seed: int = 0) -> LogisticRegression:
    return LogisticRegression(baseline_inputs(tables, [0], [1]).shape[1], seed)


def baseline_mlp(tables: FeatureTables, seed: int = 0, hidden: int = 32) -> MLPBaseline:
    return MLPBaseline(baseline_inputs(tables, [0], [1]).shape[1], seed, hidden)


def baseline_from_state(state: dict):
    cls = {"lr": LogisticRegression, "mlp": MLPBaseline}[state["kind"]]
    return cls(state["in_dim"], state["seed"], state["hidden"])
