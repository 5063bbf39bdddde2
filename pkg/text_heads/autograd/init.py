"""
Parameter initialization
"""
import math
from typing import Sequence

import numpy as np

from .rng import Rng
from .tensor import Tensor


__all__ = ['constant', 'glorot_uniform', 'zeros']


def glorot_uniform(rng: Rng, shape: Sequence[int], fan_in: int, fan_out: int, name: str = '') -> Tensor:
    """
    uniform in +-sqrt(6 / (fan_in + fan_out))
    """
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(rng.uniform(-limit, limit, shape), requires_grad=True, name=name)


def zeros(shape: Sequence[int], name: str = '') -> Tensor:
    return Tensor(np.zeros(tuple(shape)), requires_grad=True, name=name)


def constant(shape: Sequence[int], value: float, name: str = '') -> Tensor:
    return Tensor(np.full(tuple(shape), value), requires_grad=True, name=name)
