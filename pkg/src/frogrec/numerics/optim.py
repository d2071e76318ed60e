"""Adam with bias correction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(params: dict, grads: dict, state: AdamState, lr: float) -> None:
    """Apply one Adam update in place.

    ``params`` maps identifiers to arrays (or objects exposing ``.data``);
    ``grads`` maps the same identifiers to gradients. A missing gradient is
    treated as zero, so moments still decay for unused parameters.
    """
    if lr < 0:
        raise ValueError(f"learning rate must be non-negative, got {lr}")
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t
    for name, p in params.items():
        arr = p.data if hasattr(p, "data") and not isinstance(p, np.ndarray) else p
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(arr)
        elif g.shape != arr.shape:
            raise ValueError(f"gradient shape {g.shape} does not match parameter {name!r} {arr.shape}")
        m = state.first_moment.get(name)
        if m is None:
            m = state.first_moment[name] = np.zeros_like(arr)
            state.second_moment[name] = np.zeros_like(arr)
        elif m.shape != arr.shape:
            raise ValueError(f"moment shape {m.shape} does not match parameter {name!r} {arr.shape}")
        v = state.second_moment[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        arr -= (lr * (m / bc1) / (np.sqrt(v / bc2) + state.epsilon)).astype(arr.dtype)
