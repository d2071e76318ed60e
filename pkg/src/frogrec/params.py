"""Named parameter collections."""

from __future__ import annotations

import numpy as np

from .numerics import Parameter, init_params, zeros


class ParamStore(dict):
    """Ordered ``name -> Parameter`` mapping with seeded creation helpers."""

    def __init__(self, rng: np.random.Generator | None = None):
        super().__init__()
        self.rng = rng if rng is not None else np.random.default_rng(0)

    def weight(self, name: str, shape, fan_in: int | None = None) -> Parameter:
        if name in self:
            raise KeyError(f"duplicate parameter {name!r}")
        fan_in = shape[0] if fan_in is None else fan_in
        self[name] = Parameter(init_params(shape, fan_in, self.rng), name)
        return self[name]

    def bias(self, name: str, shape) -> Parameter:
        if name in self:
            raise KeyError(f"duplicate parameter {name!r}")
        self[name] = Parameter(zeros(shape), name)
        return self[name]

    def snapshot(self) -> dict[str, np.ndarray]:
        return {k: p.data.copy() for k, p in self.items()}

    def restore(self, values: dict[str, np.ndarray]) -> None:
        for k, v in values.items():
            self[k].data[...] = v

    def zero_grad(self) -> None:
        for p in self.values():
            p.grad = None

    def grads(self) -> dict[str, np.ndarray]:
        return {k: p.grad for k, p in self.items() if p.grad is not None}

    def count(self) -> int:
        return int(sum(p.data.size for p in self.values()))
