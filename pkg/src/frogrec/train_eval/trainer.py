"""Mini-batch training with Adam and focal loss, plus validation-based model selection."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..encoders import FeatureTables
from ..graph_data import DatasetSplit, PairSet
from ..model.loss import LossConfig, focal_loss
from ..numerics import AdamState, adam_step
from ..seeding import derive_seed
from .evaluate import build_candidates, evaluate, positive_targets, rank_all
from .metrics import summarize


@dataclass
class TrainConfig:
    lr: float = 0.001
    max_epochs: int = 50
    batch_size: int = 1024
    seed: int = 0
    loss: LossConfig = field(default_factory=LossConfig)
    eval_negatives: int = 99
    k_list: tuple = (5, 10, 20)
    patience: int | None = 3
    val_queries: int | None = 400
    loss_sample: int | None = 8192
    select_metric: str = "HR@10"
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if isinstance(self.loss, dict):
            self.loss = LossConfig(**self.loss)
        self.k_list = tuple(int(k) for k in self.k_list)

    def validate(self) -> None:
        if self.lr < 0:
            raise ValueError("lr must be >= 0")
        for key in ("max_epochs", "batch_size", "eval_negatives"):
            if getattr(self, key) < 1:
                raise ValueError(f"{key} must be >= 1")
        if not self.k_list or any(k < 1 for k in self.k_list) or list(self.k_list) != sorted(self.k_list):
            raise ValueError("k_list must be positive and sorted ascending")
        if self.patience is not None and self.patience < 1:
            raise ValueError("patience must be >= 1")
        for key in ("val_queries", "loss_sample"):
            if getattr(self, key) is not None and getattr(self, key) < 1:
                raise ValueError(f"{key} must be >= 1")
        if not self.select_metric.startswith(("HR@", "NDCG@")):
            raise ValueError("select_metric must be HR@k or NDCG@k")
        if not 0 <= self.beta1 < 1 or not 0 <= self.beta2 < 1 or self.adam_eps <= 0:
            raise ValueError("invalid Adam hyper-parameters")
        self.loss.validate()

    def to_dict(self) -> dict:
        out = asdict(self)
        out["k_list"] = list(self.k_list)
        return out


@dataclass
class MetricsReport:
    """Metrics of one run. ``timings`` is kept out of :meth:`to_dict` so reports compare byte-for-byte."""

    model: str
    config: dict
    seeds: list
    test: dict = field(default_factory=dict)
    test_per_seed: list = field(default_factory=list)
    train_loss: list = field(default_factory=list)
    train_batch_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    val_metric: list = field(default_factory=list)
    best_epoch: int = 0
    epochs_run: int = 0
    test_queries: int = 0
    test_skipped: int = 0
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("timings")
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def dataset_loss(model, tables: FeatureTables, pairs: PairSet, loss_cfg: LossConfig, seed) -> float:
    if len(pairs) == 0:
        return float("nan")
    scores = model.make_scorer(tables, seed)(pairs.src, pairs.dst, pairs.feats)
    return float(np.mean(focal_loss(scores, pairs.label, loss_cfg).data))


def _offender(model) -> str:
    for name, p in model.params.items():
        if not np.all(np.isfinite(p.data)) or (p.grad is not None and not np.all(np.isfinite(p.grad))):
            return name
    return "none (parameters finite)"


def train(model, split: DatasetSplit, tables: FeatureTables, config: TrainConfig, log=None):
    """Fit ``model`` in place; return the best-validation parameter snapshot and the report.

    Loss curves hold the training loss at initialization (index 0) and after
    every epoch, evaluated with a fixed neighbor-sampling seed on a fixed
    subsample of ``loss_sample`` training pairs (all pairs when None).
    The epoch with the highest validation ``select_metric`` wins; ties keep
    the earliest one. The model is left holding the winning parameters.
    """
    config.validate()
    if len(split.train) == 0 or len(split.validation) == 0:
        raise ValueError("train and validation splits must be non-empty")
    seed = config.seed
    shuffle_rng = np.random.default_rng(derive_seed(seed, "shuffle"))
    eval_seed = derive_seed(seed, "eval-sampling")
    known = positive_targets(split.train, split.validation)
    val_cands = build_candidates(
        tables.graph, split.validation, config.eval_negatives, derive_seed(seed, "val-candidates"), known, config.val_queries
    )
    adam = AdamState(config.beta1, config.beta2, config.adam_eps)
    report = MetricsReport(getattr(model, "kind", "model"), config.to_dict(), [seed])
    t_start = time.perf_counter()

    def validation_metric() -> float:
        if len(val_cands.src) == 0:
            return 0.0
        ranks = rank_all(model.make_scorer(tables, eval_seed), val_cands)
        return summarize(ranks, [int(config.select_metric.split("@")[1])])[config.select_metric]

    train_set = split.train
    curve_set = train_set
    if config.loss_sample is not None and config.loss_sample < len(train_set):
        pick = np.random.default_rng(derive_seed(seed, "loss-sample")).choice(len(train_set), config.loss_sample, replace=False)
        curve_set = train_set.subset(np.sort(pick))
    report.train_loss.append(dataset_loss(model, tables, curve_set, config.loss, eval_seed))
    report.val_loss.append(dataset_loss(model, tables, split.validation, config.loss, eval_seed))
    report.val_metric.append(validation_metric())
    best_value, best_epoch = report.val_metric[0], 0
    best = model.params.snapshot()
    stale = 0

    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(len(train_set))
        batch_losses = []
        for b, s in enumerate(range(0, len(order), config.batch_size)):
            idx = order[s : s + config.batch_size]
            model.params.zero_grad()
            y_hat = model.forward(
                tables, train_set.src[idx], train_set.dst[idx], train_set.feats[idx], seed=derive_seed(seed, "sage", epoch, b)
            )
            loss = focal_loss(y_hat, train_set.label[idx], config.loss).mean()
            value = float(loss.data)
            if not np.isfinite(value):
                raise FloatingPointError(
                    f"non-finite loss {value} at epoch {epoch}, batch {b}; offending parameter: {_offender(model)}"
                )
            loss.backward()
            grads = model.params.grads()
            if any(not np.all(np.isfinite(g)) for g in grads.values()):
                raise FloatingPointError(
                    f"non-finite gradient at epoch {epoch}, batch {b}; offending parameter: {_offender(model)}"
                )
            adam_step(model.params, grads, adam, config.lr)
            batch_losses.append(value)
        report.train_batch_loss.append(float(np.mean(batch_losses)))
        report.train_loss.append(dataset_loss(model, tables, curve_set, config.loss, eval_seed))
        report.val_loss.append(dataset_loss(model, tables, split.validation, config.loss, eval_seed))
        report.val_metric.append(validation_metric())
        report.epochs_run = epoch
        if log:
            log(
                f"epoch {epoch}: train {report.train_loss[-1]:.5f} val {report.val_loss[-1]:.5f} "
                f"val {config.select_metric} {report.val_metric[-1]:.4f}"
            )
        if report.val_metric[-1] > best_value:
            best_value, best_epoch = report.val_metric[-1], epoch
            best = model.params.snapshot()
            stale = 0
        else:
            stale += 1
            if config.patience is not None and stale >= config.patience:
                break
    model.params.restore(best)
    report.best_epoch = best_epoch
    report.timings["train_seconds"] = time.perf_counter() - t_start
    return best, report


def train_and_evaluate(model, split: DatasetSplit, tables: FeatureTables, config: TrainConfig, eval_seeds=None, log=None):
    """Train, then score the test split; the returned report carries test metrics."""
    _, report = train(model, split, tables, config, log)
    t0 = time.perf_counter()
    seeds = list(eval_seeds) if eval_seeds is not None else [config.seed]
    known = positive_targets(split.train, split.validation, split.test)
    result = evaluate(
        lambda s: model.make_scorer(tables, derive_seed(s, "eval-sampling")),
        split.test,
        tables.graph,
        config.eval_negatives,
        config.k_list,
        seeds,
        known,
    )
    report.test = result.metrics
    report.test_per_seed = result.per_seed
    report.test_queries = result.queries
    report.test_skipped = result.skipped
    report.timings["eval_seconds"] = time.perf_counter() - t0
    return report
