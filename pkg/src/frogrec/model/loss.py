from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import Tensor, as_tensor, clip, log, power


@dataclass
class LossConfig:
    alpha: float = 0.25
    gamma: float = 2.0
    eps: float = 1e-7

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if not 0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 0.5)")


def focal_loss(y_hat, y, cfg: LossConfig | None = None) -> Tensor:
    """Per-example focal loss; ``y_hat`` is clamped to ``[eps, 1 - eps]`` first."""
    cfg = cfg or LossConfig()
    p = clip(as_tensor(y_hat), cfg.eps, 1.0 - cfg.eps)
    y = np.asarray(y, dtype=p.data.dtype)
    pos = power(1.0 - p, cfg.gamma) * log(p) * (-cfg.alpha * y)
    neg = power(p, cfg.gamma) * log(1.0 - p) * (-(1.0 - cfg.alpha) * (1.0 - y))
    return pos + neg


def binary_cross_entropy(y_hat, y, eps: float = 1e-7) -> np.ndarray:
    p = np.clip(np.asarray(y_hat, dtype=np.float64), eps, 1 - eps)
    y = np.asarray(y, dtype=np.float64)
    return -(y * np.log(p) + (1 - y) * np.log(1 - p))
