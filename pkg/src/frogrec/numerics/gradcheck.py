"""Central finite-difference gradient check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .autodiff import Parameter


@dataclass
class GradCheckResult:
    max_rel_error: float
    worst_parameter: str | None
    worst_index: tuple | None
    n_entries: int


def grad_check(
    loss_fn: Callable[[dict[str, Parameter]], "object"],
    params: dict[str, Parameter],
    h: float = 1e-5,
    names: list[str] | None = None,
) -> GradCheckResult:
    """Compare backprop gradients of ``loss_fn(params)`` with central differences.

    The relative error per entry is ``|a - n| / max(1, |a|, |n|)``; the
    maximum over all entries is returned. Parameters should be float64.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    for p in params.values():
        p.grad = None
    loss = loss_fn(params)
    value = float(np.asarray(loss.data).reshape(-1)[0])
    if not np.isfinite(value):
        raise FloatingPointError(f"loss is not finite: {value}")
    loss.backward()
    analytic = {k: p.gradient.copy() for k, p in params.items()}

    def evaluate() -> float:
        v = float(np.asarray(loss_fn(params).data).reshape(-1)[0])
        if not np.isfinite(v):
            raise FloatingPointError(f"loss is not finite during perturbation: {v}")
        return v

    worst, worst_name, worst_idx, count = 0.0, None, None, 0
    for name in names or list(params):
        p = params[name]
        flat = p.data.reshape(-1)
        a_flat = analytic[name].reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            f_plus = evaluate()
            flat[i] = orig - h
            f_minus = evaluate()
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * h)
            a = float(a_flat[i])
            err = abs(a - numeric) / max(1.0, abs(a), abs(numeric))
            count += 1
            if err > worst:
                worst, worst_name = err, name
                worst_idx = np.unravel_index(i, p.shape)
    return GradCheckResult(worst, worst_name, worst_idx, count)
