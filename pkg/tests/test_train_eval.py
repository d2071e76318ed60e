import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frogrec.model import FrogConfig
from frogrec.train_eval import (
    TrainConfig,
    bench_matching,
    build_candidates,
    build_model,
    evaluate,
    expected_constant_hit_rate,
    hit_rate_at_k,
    loglog_slope,
    ndcg_at_k,
    positive_targets,
    rank_all,
    rank_candidates,
    ranks_from_scores,
    run_ablation,
    summarize,
    train,
)
from frogrec.train_eval.baselines import baseline_inputs, baseline_lr, baseline_mlp


def brute_rank(scores: dict[int, float], v: int) -> int:
    """Position of v in a full sort by (score desc, id asc)."""
    ordered = sorted(scores, key=lambda w: (-scores[w], w))
    return ordered.index(v) + 1


# -- metrics -----------------------------------------------------------------------
def test_metric_examples():
    assert hit_rate_at_k([1, 5, 11, 30], 10) == 0.5
    assert ndcg_at_k([1], 10) == 1.0
    assert ndcg_at_k([3], 10) == pytest.approx(0.5, abs=1e-15)
    assert ndcg_at_k([11], 10) == 0.0
    assert ndcg_at_k([2, 100], 10) == pytest.approx(0.5 / math.log2(3))


def test_metric_input_errors():
    with pytest.raises(ValueError):
        hit_rate_at_k([], 10)
    with pytest.raises(ValueError):
        ndcg_at_k([0, 2], 10)


def test_rank_tie_break_by_id():
    scorer = lambda src, dst: np.zeros(len(dst))
    assert rank_candidates(scorer, 0, 5, [9, 3, 7]) == 2
    assert rank_candidates(scorer, 0, 2, [9, 3, 7]) == 1
    with pytest.raises(ValueError):
        rank_candidates(scorer, 0, 3, [3, 4])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30))
def test_metrics_match_brute_force(seed, k):
    rng = np.random.default_rng(seed)
    q, c = 20, 99
    ranks, ref = [], []
    src, pos, negs = np.zeros(q, int), np.empty(q, int), np.empty((q, c), int)
    # few distinct score levels so ties are common
    levels = rng.integers(0, 5, size=1000) / 4
    for i in range(q):
        ids = rng.choice(1000, c + 1, replace=False)
        pos[i], negs[i] = ids[0], ids[1:]
        ref.append(brute_rank({int(w): levels[w] for w in ids}, int(ids[0])))
    scorer = lambda s, d: levels[np.asarray(d)]
    ranks = rank_all(scorer, type("C", (), dict(src=src, pos=pos, negatives=negs))())
    assert ranks.tolist() == ref
    hr = sum(r <= k for r in ref) / q
    nd = sum(1 / math.log2(r + 1) for r in ref if r <= k) / q
    assert hit_rate_at_k(ranks, k) == hr
    assert ndcg_at_k(ranks, k) == pytest.approx(nd, rel=0, abs=1e-15)
    assert [rank_candidates(scorer, 0, int(pos[i]), negs[i]) for i in range(q)] == ref


def test_ranks_ignore_padding():
    r = ranks_from_scores([0.5], [4], np.array([[0.9, 0.1, 0.9]]), np.array([[1, 2, -1]]))
    assert r.tolist() == [2]


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 100), min_size=1, max_size=50))
def test_metrics_monotone_in_k(ranks):
    m = summarize(ranks, [1, 5, 10, 20, 100])
    hrs = [m[f"HR@{k}"] for k in (1, 5, 10, 20, 100)]
    assert hrs == sorted(hrs) and hrs[-1] == 1.0
    for k in (1, 5, 10, 20, 100):
        assert 0 <= m[f"NDCG@{k}"] <= m[f"HR@{k}"]


# -- evaluation protocol ---------------------------------------------------------
def test_candidates_exclude_friends_and_known(small_tables, small_split):
    known = positive_targets(small_split.train, small_split.validation, small_split.test)
    cands = build_candidates(small_tables.graph, small_split.test, 99, 3, known)
    assert cands.negatives.shape == (len(cands.src), 99)
    for u, v, negs in zip(cands.src, cands.pos, cands.negatives):
        assert len(set(negs.tolist())) == 99
        assert v not in negs and u not in negs
        assert not set(negs.tolist()) & set(small_tables.graph.neighbors(u).tolist())
        assert not set(negs.tolist()) & known[u]


def test_constant_scorer_near_uniform(small_tables, small_split):
    res = evaluate(lambda s: (lambda a, b, f=None: np.zeros(len(a))), small_split.test, small_tables.graph,
                   99, (10,), seeds=range(5))
    m = res.queries
    mean, std = expected_constant_hit_rate(10, 100)
    # all-tied scores fall back to id order, which is unrelated to the true item
    assert abs(res.metrics["HR@10"] - mean) <= 3 * std / math.sqrt(m)


def test_random_scorer_within_three_sigma(small_tables, small_split):
    def factory(seed):
        rng = np.random.default_rng(seed)
        return lambda a, b, f=None: rng.random(len(a))

    res = evaluate(factory, small_split.test, small_tables.graph, 99, (5, 10, 20), seeds=range(5))
    for k in (5, 10, 20):
        mean, std = expected_constant_hit_rate(k, 100)
        assert abs(res.metrics[f"HR@{k}"] - mean) <= 3 * std / math.sqrt(res.queries)


def test_oracle_scorer_is_perfect(small_tables, small_split):
    known = positive_targets(small_split.test)
    oracle = lambda a, b, f=None: np.array([float(int(v) in known.get(int(u), ())) for u, v in zip(a, b)])
    res = evaluate(lambda s: oracle, small_split.test, small_tables.graph, 99, (1, 10), seeds=[0], exclude=known)
    assert res.metrics["HR@1"] == 1.0 and res.metrics["NDCG@10"] == 1.0


# -- baselines ---------------------------------------------------------------------
def test_lr_zero_weights_half(small_tables):
    lr = baseline_lr(small_tables, 0)
    for p in lr.params.values():
        p.data[:] = 0
    assert np.all(lr.make_scorer(small_tables)(np.arange(10), np.arange(10, 20)) == 0.5)


def test_baseline_inputs_shape(small_tables):
    x = baseline_inputs(small_tables, [0, 1], [2, 3])
    assert x.shape[0] == 2 and np.all(np.isfinite(x))


@pytest.mark.parametrize("kind", ["lr", "mlp"])
def test_baselines_reduce_loss(kind, small_tables, small_split):
    model = build_model(kind, small_tables, 0)
    _, report = train(model, small_split, small_tables, TrainConfig(lr=0.01, max_epochs=3, patience=None))
    assert report.train_loss[-1] < report.train_loss[0]


# -- training ----------------------------------------------------------------------
def small_frog(tables, seed=0, **kw):
    return build_model(kw.pop("variant", "full"), tables, seed, FrogConfig(d=8, h=8, **kw))


def test_zero_learning_rate_freezes(small_tables, small_split):
    model = small_frog(small_tables)
    before = model.params.snapshot()
    _, report = train(model, small_split, small_tables, TrainConfig(lr=0.0, max_epochs=2, patience=None))
    assert len(set(report.train_loss)) == 1
    assert report.best_epoch == 0  # equal validation scores keep the earliest epoch
    for k, v in model.params.snapshot().items():
        np.testing.assert_array_equal(v, before[k])


def test_training_deterministic(small_tables, small_split, f64):
    cfg = TrainConfig(lr=0.01, max_epochs=2, patience=None, seed=4)
    reports = []
    for _ in range(2):
        model = small_frog(small_tables, seed=4)
        _, rep = train(model, small_split, small_tables, cfg)
        reports.append((rep.to_json(), model.params.snapshot()))
    assert reports[0][0] == reports[1][0]
    for k in reports[0][1]:
        np.testing.assert_array_equal(reports[0][1][k], reports[1][1][k])


def test_restores_best_epoch(small_tables, small_split):
    model = small_frog(small_tables)
    best, report = train(model, small_split, small_tables, TrainConfig(lr=0.01, max_epochs=3, patience=None))
    assert report.val_metric[report.best_epoch] == max(report.val_metric)
    assert report.val_metric.index(max(report.val_metric)) == report.best_epoch
    for k, v in model.params.snapshot().items():
        np.testing.assert_array_equal(v, best[k])


def test_train_config_validation():
    for bad in (dict(lr=-1.0), dict(batch_size=0), dict(k_list=(10, 5)), dict(select_metric="AUC"), dict(patience=0)):
        with pytest.raises(ValueError):
            TrainConfig(**bad).validate()


def test_no_global_ignores_plane(small_tables, small_split):
    model = small_frog(small_tables, variant="no-global")
    tr = small_split.train
    before = model.make_scorer(small_tables, 0)(tr.src[:200], tr.dst[:200], tr.feats[:200])
    model.A.data[:] = np.random.default_rng(0).standard_normal(model.A.shape) * 1e3
    after = model.make_scorer(small_tables, 0)(tr.src[:200], tr.dst[:200], tr.feats[:200])
    np.testing.assert_array_equal(before, after)


def test_full_variant_ablation_reproducible(small_tables, small_split):
    cfg = TrainConfig(lr=0.01, max_epochs=1, patience=None)
    a = run_ablation("full", FrogConfig(d=8, h=8), small_split, small_tables, cfg, seeds=(0,))
    b = run_ablation("full", FrogConfig(d=8, h=8), small_split, small_tables, cfg, seeds=(0,))
    assert a.to_json() == b.to_json()
    with pytest.raises(ValueError):
        run_ablation("lr", FrogConfig(), small_split, small_tables, cfg, seeds=(0,))


# -- benchmark harness --------------------------------------------------------------
def test_loglog_slope_exact():
    xs = np.array([16, 32, 64, 128])
    assert loglog_slope(xs, 3.0 * xs**2.5) == pytest.approx(2.5, abs=1e-12)


def test_bench_runs_and_validates():
    res = bench_matching((4, 8, 16), t=2, repetitions=2, batch=4, t_ratio=False)
    assert len(res.seconds) == 3 and all(s > 0 for s in res.seconds) and np.isfinite(res.slope)
    with pytest.raises(ValueError):
        bench_matching((4, 8, 16), repetitions=0)
    with pytest.raises(ValueError):
        bench_matching((8, 4, 16))
