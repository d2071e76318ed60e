from __future__ import annotations

import math

import numpy as np

from .autodiff import get_default_dtype


def init_params(shape, fan_in: int, seed) -> np.ndarray:
    """Uniform draw from [-sqrt(6/fan_in), sqrt(6/fan_in)].

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if fan_in < 1:
        raise ValueError(f"fan_in must be >= 1, got {fan_in}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    bound = math.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(get_default_dtype())


def zeros(shape) -> np.ndarray:
    return np.zeros(shape, dtype=get_default_dtype())
