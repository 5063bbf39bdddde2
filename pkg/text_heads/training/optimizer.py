"""
Adam with bias correction
"""
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..autograd import Tensor
from ..constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPS
from ..exceptions import NumericError, ShapeError


__all__ = ['AdamState', 'adam_step']


class AdamState:
    """
    per-parameter first and second moments, keyed by parameter name
    """

    def __init__(self, beta1: float = ADAM_BETA1, beta2: float = ADAM_BETA2, eps: float = ADAM_EPS):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.first_moments: Dict[str, np.ndarray] = {}
        self.second_moments: Dict[str, np.ndarray] = {}

    def moments(self, name: str, shape: Tuple[int, ...]) -> Tuple[np.ndarray, np.ndarray]:
        if name not in self.first_moments:
            self.first_moments[name] = np.zeros(shape)
            self.second_moments[name] = np.zeros(shape)
        first, second = self.first_moments[name], self.second_moments[name]
        if first.shape != shape:
            raise ShapeError(f'Moments of {name} have shape {first.shape}, parameter has {shape}')
        return first, second


def adam_step(
    params: Mapping[str, Tensor],
    state: AdamState,
    learning_rate: float,
    grads: Optional[Mapping[str, np.ndarray]] = None
) -> None:
    """
    one in-place update of every parameter, gradients zeroed afterwards;
    a parameter without gradient counts as a zero gradient
    :param grads: overrides of tensor.grad by parameter name
    """
    resolved: Dict[str, np.ndarray] = {}
    for name, tensor in params.items():
        grad = grads.get(name) if grads is not None else None
        if grad is None:
            grad = tensor.grad if tensor.grad is not None else np.zeros(tensor.shape)
        if grad.shape != tensor.shape:
            raise ShapeError(f'Gradient of {name} has shape {grad.shape}, parameter has {tensor.shape}')
        if not np.all(np.isfinite(grad)):
            raise NumericError(f'Non-finite gradient for parameter {name}')
        resolved[name] = grad

    state.step += 1
    first_correction = 1.0 - state.beta1 ** state.step
    second_correction = 1.0 - state.beta2 ** state.step
    for name, tensor in params.items():
        grad = resolved[name]
        first, second = state.moments(name, tensor.shape)
        first *= state.beta1
        first += (1.0 - state.beta1) * grad
        second *= state.beta2
        second += (1.0 - state.beta2) * grad ** 2
        tensor.data = tensor.data - learning_rate * (first / first_correction) / (
            np.sqrt(second / second_correction) + state.eps
        )
        tensor.zero_grad()
