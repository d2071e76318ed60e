"""Finite-difference check of the full model loss on a tiny synthetic dataset."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..encoders import FeatureTables
from ..graph_data import GeneratorConfig, generate_synthetic, sample_negatives
from ..model.frog import FrogConfig, FrogModel
from ..model.loss import LossConfig, focal_loss
from ..numerics import GradCheckResult, grad_check, precision
from ..seeding import derive_seed


@dataclass
class ModelGradCheck:
    result: GradCheckResult
    n_params: int
    seconds: float

    def to_dict(self) -> dict:
        r = self.result
        return {
            "max_rel_error": r.max_rel_error,
            "worst_parameter": r.worst_parameter,
            "worst_index": None if r.worst_index is None else [int(i) for i in r.worst_index],
            "entries": r.n_entries,
            "parameters": self.n_params,
            "seconds": self.seconds,
        }


def gradcheck_batch(tables: FeatureTables, instances, batch: int, seed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Half positives from ``instances``, half sampled non-friend negatives."""
    rng = np.random.default_rng(seed)
    n_pos = max(1, batch // 2)
    pos = rng.choice(len(instances), size=min(n_pos, len(instances)), replace=False)
    src = list(instances.src[pos])
    dst = list(instances.dst[pos])
    label = [1] * len(pos)
    while len(src) < batch:
        u = int(rng.integers(tables.n))
        neg = sample_negatives(tables.graph, u, 1, rng)
        if len(neg.ids):
            src.append(u)
            dst.append(int(neg.ids[0]))
            label.append(0)
    return np.array(src), np.array(dst), np.array(label)


def frog_gradcheck(
    n: int = 60,
    d: int = 8,
    h: int = 8,
    modalities=("profile", "graph", "pair"),
    batch: int = 4,
    seed: int = 0,
    step: float = 1e-5,
    aggregator: str = "mean",
    tie_roles: bool = False,
    variant: str = "full",
) -> ModelGradCheck:
    """Max relative error between backprop and central differences for the full FROG loss.

    Runs in float64. All-zero biases put many ReLU inputs exactly on the
    kink for pairs with zero pair features, where the loss is not
    differentiable, so the biases are moved to a random generic point first.
    """
    t0 = time.perf_counter()
    with precision("float64"):
        gen = GeneratorConfig(n=n, communities=3, mean_degree=4.0, random_candidates=20)
        ds = generate_synthetic(gen, derive_seed(seed, "data"))
        tables = FeatureTables.from_dataset(ds)
        cfg = FrogConfig(d=d, h=h, modalities=tuple(modalities), sample_sizes=(3, 2), aggregator=aggregator,
                         tie_roles=tie_roles, variant=variant)
        model = FrogModel(cfg, {m: tables.input_dim(m) for m in cfg.modalities}, derive_seed(seed, "init"))
        jitter = np.random.default_rng(derive_seed(seed, "jitter"))
        for p in model.params.values():
            if p.data.ndim == 1:
                p.data += 0.1 * jitter.standard_normal(p.data.shape)
        src, dst, label = gradcheck_batch(tables, ds.instances, batch, derive_seed(seed, "batch"))
        feats = tables.featurizer(src, dst)
        loss_cfg = LossConfig()
        sample_seed = derive_seed(seed, "sage")

        def loss_fn(_params):
            y = model.forward(tables, src, dst, feats, seed=sample_seed)
            return focal_loss(y, label, loss_cfg).mean()

        result = grad_check(loss_fn, dict(model.params), h=step)
    return ModelGradCheck(result, len(model.params), time.perf_counter() - t0)
