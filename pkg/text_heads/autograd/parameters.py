"""
Named parameter bookkeeping shared by providers, heads and the classifier
"""
from typing import Dict

from .tensor import Tensor


__all__ = ['ParameterStore']


class ParameterStore:
    """
    Ordered registry of named tensors

    trainable tensors are the ones the optimizer updates,
    frozen ones (static vectors) are still part of the saved state
    """

    def __init__(self) -> None:
        self._tensors: Dict[str, Tensor] = {}

    def register(self, name: str, tensor: Tensor, trainable: bool = True) -> Tensor:
        if name in self._tensors:
            raise ValueError(f'Parameter {name} has been registered')
        tensor.requires_grad = trainable
        tensor.name = name
        self._tensors[name] = tensor
        return tensor

    def parameters(self) -> Dict[str, Tensor]:
        return {name: tensor for name, tensor in self._tensors.items() if tensor.requires_grad}

    def state(self) -> Dict[str, Tensor]:
        return dict(self._tensors)

    @property
    def parameter_count(self) -> int:
        return sum(tensor.size for tensor in self.parameters().values())

    def zero_grad(self) -> None:
        for tensor in self._tensors.values():
            tensor.zero_grad()
