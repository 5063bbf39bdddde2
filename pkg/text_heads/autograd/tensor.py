"""
Dense tensor with reverse-mode automatic differentiation
"""
from contextlib import contextmanager
import threading
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import GraphError, NumericError


__all__ = ['Function', 'Graph', 'Tensor', 'as_tensor', 'backward', 'is_grad_enabled', 'no_grad']


ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]


_state = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_state, 'grad_enabled', True)


@contextmanager
def no_grad() -> Iterator[None]:
    """
    operations inside the block record no graph, per thread
    """
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


class Function:
    """
    Base of differentiable operations

    forward receives the raw arrays of the input tensors,
    backward receives dL/d(output) and returns dL/d(input) for every input,
    None standing for an input that receives no gradient
    """

    def __init__(self, *tensors: 'Tensor'):
        self.tensors = tensors

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError(f'Forward pass not implemented for {type(self).__name__}')

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError(f'Backward pass not implemented for {type(self).__name__}')

    @classmethod
    def apply(cls, *tensors: 'Tensor', **kwargs: Any) -> 'Tensor':
        func = cls(*tensors)
        out_data = func.forward(*(tensor.data for tensor in tensors), **kwargs)
        if not np.all(np.isfinite(out_data)):
            raise NumericError(f'{cls.__name__} produced non-finite values')

        requires_grad = is_grad_enabled() and any(tensor.requires_grad for tensor in tensors)
        return Tensor(out_data, requires_grad=requires_grad, creator=func if requires_grad else None)

    @staticmethod
    def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
        """
        sum out the axes numpy broadcasting added or stretched
        """
        while grad.ndim > len(shape):
            grad = grad.sum(axis=0)
        for axis, size in enumerate(shape):
            if size == 1 and grad.shape[axis] != 1:
                grad = grad.sum(axis=axis, keepdims=True)
        return grad


class Tensor:

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        creator: Optional[Function] = None,
        name: Optional[str] = None
    ):
        self.data: np.ndarray = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self.creator = creator
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self.creator is None

    def item(self) -> float:
        if self.size != 1:
            raise ValueError(f'Only one-element tensors convert to a scalar, got shape {self.shape}')
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data.copy()

    def detach(self) -> 'Tensor':
        return Tensor(self.data.copy(), requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64)
        else:
            self.grad = self.grad + grad

    def backward(self) -> None:
        backward(self)

    def __add__(self, other: Union['Tensor', float]) -> 'Tensor':
        from .functional import add
        return add(self, as_tensor(other))

    def __radd__(self, other: Union['Tensor', float]) -> 'Tensor':
        from .functional import add
        return add(as_tensor(other), self)

    def __sub__(self, other: Union['Tensor', float]) -> 'Tensor':
        from .functional import add, scale
        return add(self, scale(as_tensor(other), -1.0))

    def __neg__(self) -> 'Tensor':
        from .functional import scale
        return scale(self, -1.0)

    def __mul__(self, other: Union['Tensor', float]) -> 'Tensor':
        from .functional import mul
        return mul(self, as_tensor(other))

    def __rmul__(self, other: Union['Tensor', float]) -> 'Tensor':
        from .functional import mul
        return mul(as_tensor(other), self)

    def __matmul__(self, other: 'Tensor') -> 'Tensor':
        from .functional import matmul
        return matmul(self, other)

    def __getitem__(self, key: Any) -> 'Tensor':
        from .functional import index
        return index(self, key)

    def __repr__(self) -> str:
        return f'Tensor(shape={self.shape}, requires_grad={self.requires_grad})'


def as_tensor(value: Union[Tensor, ArrayLike]) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value, requires_grad=False)


class Graph:
    """
    Executed operations reachable from a root, in topological order:
    every tensor appears after all of its inputs
    """

    def __init__(self, nodes: List[Tensor]):
        self.nodes = nodes

    @classmethod
    def trace(cls, root: Tensor) -> 'Graph':
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            if node.creator is not None:
                for parent in node.creator.tensors:
                    if id(parent) not in visited:
                        stack.append((parent, False))
        return cls(order)

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[Tensor]:
        return iter(self.nodes)


def backward(loss: Tensor) -> None:
    """
    populate .grad of every requires_grad tensor reachable from loss with d(loss)/d(tensor);
    contributions of a tensor used several times add up
    """
    if loss.creator is None:
        raise GraphError('backward called on a tensor that was not produced by a recorded graph')
    if loss.size != 1:
        raise GraphError(f'backward needs a scalar loss, got shape {loss.shape}')

    graph = Graph.trace(loss)
    pending: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    for node in reversed(graph.nodes):
        grad = pending.pop(id(node), None)
        if grad is None:
            continue
        if node.requires_grad:
            node.accumulate_grad(grad)
        if node.creator is None:
            continue
        input_grads = node.creator.backward(grad)
        for parent, parent_grad in zip(node.creator.tensors, input_grads):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in pending:
                pending[key] = pending[key] + parent_grad
            else:
                pending[key] = parent_grad
