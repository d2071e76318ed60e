"""Multi-seed experiment runner and the FROG ablation variants."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from ..encoders import FeatureTables
from ..graph_data import DatasetSplit
from ..model.frog import VARIANTS, FrogConfig, FrogModel
from ..seeding import derive_seed
from .baselines import baseline_lr, baseline_mlp
from .trainer import MetricsReport, TrainConfig, train_and_evaluate


@dataclass
class SeedSweep:
    """Per-seed reports of one model family plus their mean test metrics."""

    model: str
    seeds: list
    reports: list = field(default_factory=list)

    @property
    def mean(self) -> dict[str, float]:
        keys = self.reports[0].test.keys()
        return {k: float(np.mean([r.test[k] for r in self.reports])) for k in keys}

    def summary(self) -> MetricsReport:
        """A combined report: mean test metrics, per-seed test metrics, the first seed's curves."""
        first = self.reports[0]
        out = replace(first, seeds=list(self.seeds), test=self.mean, test_per_seed=[r.test for r in self.reports])
        out.timings = {"train_seconds": sum(r.timings.get("train_seconds", 0.0) for r in self.reports)}
        out.timings["eval_seconds"] = sum(r.timings.get("eval_seconds", 0.0) for r in self.reports)
        return out

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "seeds": list(self.seeds),
            "mean": self.mean,
            "runs": [r.to_dict() for r in self.reports],
        }


def input_dims(tables: FeatureTables, modalities) -> dict[str, int]:
    return {m: tables.input_dim(m) for m in modalities}


def build_model(kind: str, tables: FeatureTables, seed: int, frog_config: FrogConfig | None = None):
    """``kind`` is an ablation variant name, ``lr`` or ``mlp``; ``seed`` is the master seed of the run."""
    init_seed = derive_seed(seed, "init")
    if kind == "lr":
        return baseline_lr(tables, init_seed)
    if kind == "mlp":
        return baseline_mlp(tables, init_seed)
    if kind not in VARIANTS:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {VARIANTS + ('lr', 'mlp')}")
    cfg = replace(frog_config or FrogConfig(), variant=kind)
    return FrogModel(cfg, input_dims(tables, cfg.modalities), init_seed)


def run_seeds(
    kind: str,
    split: DatasetSplit,
    tables: FeatureTables,
    train_config: TrainConfig,
    seeds=(0, 1, 2, 3, 4),
    frog_config: FrogConfig | None = None,
    log=None,
) -> SeedSweep:
    """Train and test one model family once per master seed.

    The master seed fans out into initialization, shuffling, neighbor
    sampling and evaluation-candidate sub-seeds.
    """
    sweep = SeedSweep(kind, list(seeds))
    for s in seeds:
        t0 = time.perf_counter()
        model = build_model(kind, tables, s, frog_config)
        report = train_and_evaluate(model, split, tables, replace(train_config, seed=s), [s])
        sweep.reports.append(report)
        if log:
            log(
                f"{kind} seed {s}: HR@10 {report.test.get('HR@10', float('nan')):.4f} "
                f"best epoch {report.best_epoch} ({time.perf_counter() - t0:.1f}s)"
            )
    return sweep


def run_ablation(
    variant: str,
    frog_config: FrogConfig,
    split: DatasetSplit,
    tables: FeatureTables,
    train_config: TrainConfig,
    seeds=(0, 1, 2, 3, 4),
    log=None,
) -> MetricsReport:
    """Train the given variant over ``seeds``; the report's ``test`` holds the seed-averaged metrics."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    return run_seeds(variant, split, tables, train_config, seeds, frog_config, log).summary()
