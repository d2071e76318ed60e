"""Timing harness for the Matching-Net forward pass."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..model.matching import MatchingParams, pair_similarity
from ..numerics import Tensor, no_grad
from ..params import ParamStore


@dataclass
class BenchResult:
    d_list: list
    t: int
    batch: int
    repetitions: int
    seconds: list  # mean forward time per d, for the whole batch of pairs
    slope: float  # least-squares slope of log(time) on log(d)
    t_ratio: float | None = None  # time(2t) / time(t) at the largest d
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "d_list": list(self.d_list),
            "t": self.t,
            "batch": self.batch,
            "repetitions": self.repetitions,
            "seconds": list(self.seconds),
            "per_pair_seconds": [s / self.batch for s in self.seconds],
            "slope": self.slope,
            "t_ratio": self.t_ratio,
        }


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])


def _time_matching(d: int, t: int, batch: int, repetitions: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    store = ParamStore(rng)
    params = [MatchingParams.create(store, f"m{i}", d) for i in range(t)]
    Mu = [Tensor(rng.standard_normal((batch, d))) for _ in range(t)]
    Mv = [Tensor(rng.standard_normal((batch, d))) for _ in range(t)]
    runs = []
    with no_grad():
        for i in range(t):  # warm-up
            pair_similarity(Mu[i], Mv[i], params[i])
        for _ in range(repetitions):
            start = time.perf_counter()
            for i in range(t):
                pair_similarity(Mu[i], Mv[i], params[i])
            runs.append(time.perf_counter() - start)
    # the median is robust to scheduler hiccups
    return float(np.median(runs))


def bench_matching(d_list, t: int = 5, repetitions: int = 20, batch: int = 64, seed: int = 0, t_ratio: bool = True) -> BenchResult:
    """Mean Matching-Net forward time over ``t`` modalities for each ``d``.

    The reported slope of log-time against log-d estimates the polynomial
    order in d; with ``t_ratio`` the largest d is re-timed at ``2t``.
    """
    d_list = [int(d) for d in d_list]
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if len(d_list) < 3 or d_list != sorted(set(d_list)) or d_list[0] < 1:
        raise ValueError("d_list must hold at least 3 ascending positive sizes")
    if t < 1 or batch < 1:
        raise ValueError("t and batch must be >= 1")
    seconds = [_time_matching(d, t, batch, repetitions, seed) for d in d_list]
    result = BenchResult(d_list, t, batch, repetitions, seconds, loglog_slope(d_list, seconds))
    if t_ratio:
        double = _time_matching(d_list[-1], 2 * t, batch, repetitions, seed)
        result.t_ratio = double / seconds[-1]
    return result
