"""
Utilities for test case
"""
from typing import List, Optional

import numpy as np

from text_heads.autograd import Rng, Tensor
from text_heads.constants import ProviderKind
from text_heads.schemes import (
    Dataset,
    EncoderConfig,
    Example,
    HeadConfig,
    LinearHeadConfig,
    TrainConfig
)


__all__ = [
    'desk_config',
    'nested_conv1d',
    'nested_matmul',
    'nested_max_pool_1d',
    'random_tensor',
    'separable_dataset'
]


MOCK_DATA_DIR = 'tests/mock_data'

NEUTRAL_CHARS = '天地人和山水日月风云花草木石田土'
MARKER_CHARS = '偷抢骗'


def random_tensor(rng: Rng, *shape: int, requires_grad: bool = True) -> Tensor:
    return Tensor(rng.normal(shape), requires_grad=requires_grad)


def desk_config(
    head: Optional[HeadConfig] = None,
    provider: ProviderKind = ProviderKind.TRANSFORMER,
    max_len: int = 12,
    dim: int = 16,
    seed: int = 7,
    **fields: object
) -> TrainConfig:
    return TrainConfig(
        seed=seed,
        max_len=max_len,
        head=head if head is not None else LinearHeadConfig(),
        encoder=EncoderConfig(provider=provider, layers=1, heads=2, dim=dim, ff_dim=2 * dim, dropout=0.0),
        **fields
    )


def separable_dataset(size: int, seed: int) -> Dataset:
    """
    short texts where label 1 carries exactly one marker character, balanced labels
    """
    rng = Rng(seed)
    result = []
    for idx in range(size):
        label = idx % 2
        chars: List[str] = [rng.choice(NEUTRAL_CHARS) for _ in range(rng.integers(4, 9))]
        if label == 1:
            chars.insert(rng.integers(0, len(chars) + 1), rng.choice(MARKER_CHARS))
        result.append(Example(label=label, text=''.join(chars)))
    return result


def nested_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    rows, inner = a.shape
    cols = b.shape[1]
    out = np.zeros((rows, cols))
    for i in range(rows):
        for j in range(cols):
            acc = 0.0
            for t in range(inner):
                acc += a[i, t] * b[t, j]
            out[i, j] = acc
    return out


def nested_conv1d(x: np.ndarray, weights: np.ndarray, bias: np.ndarray, same: bool = False) -> np.ndarray:
    length, in_dim = x.shape
    kernels, width, _ = weights.shape
    if same:
        left = (width - 1) // 2
        x = np.concatenate([np.zeros((left, in_dim)), x, np.zeros((width - 1 - left, in_dim))])
    out_length = x.shape[0] - width + 1
    out = np.zeros((out_length, kernels))
    for t in range(out_length):
        for k in range(kernels):
            acc = bias[k]
            for j in range(width):
                for d in range(in_dim):
                    acc += x[t + j, d] * weights[k, j, d]
            out[t, k] = acc
    return out


def nested_max_pool_1d(x: np.ndarray, window: int, stride: int) -> np.ndarray:
    out_length = (x.shape[0] - window) // stride + 1
    out = np.zeros((out_length, x.shape[1]))
    for t in range(out_length):
        for k in range(x.shape[1]):
            out[t, k] = max(x[t * stride + j, k] for j in range(window))
    return out
