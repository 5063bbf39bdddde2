"""
Differentiable primitive operations

Each operation is a Function subclass plus a thin wrapper validating shapes,
all arrays are float64, shapes follow the row-major [time, feature] convention
"""
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..constants import ActivationKind, LAYER_NORM_EPS, Mode, Padding
from ..exceptions import LabelError, ParameterError, SequenceTooShortError, ShapeError, VocabularyError
from .rng import Rng
from .tensor import Function, Tensor


__all__ = [
    'activation',
    'add',
    'affine',
    'concat',
    'conv1d',
    'dropout',
    'gather',
    'index',
    'layer_norm',
    'masked_softmax',
    'matmul',
    'max_over_time',
    'max_pool_1d',
    'mul',
    'relu',
    'reshape',
    'scale',
    'sigmoid',
    'softmax_cross_entropy',
    'softmax_probabilities',
    'split_rows',
    'stack',
    'tanh',
    'total',
    'transpose'
]


Grads = Tuple[Optional[np.ndarray], ...]


class Add(Function):

    def forward(self, a: np.ndarray, b: np.ndarray, **kwargs: Any) -> np.ndarray:
        return a + b

    def backward(self, grad: np.ndarray) -> Grads:
        a, b = self.tensors
        return self.unbroadcast(grad, a.shape), self.unbroadcast(grad, b.shape)


class Mul(Function):

    def forward(self, a: np.ndarray, b: np.ndarray, **kwargs: Any) -> np.ndarray:
        return a * b

    def backward(self, grad: np.ndarray) -> Grads:
        a, b = self.tensors
        return self.unbroadcast(grad * b.data, a.shape), self.unbroadcast(grad * a.data, b.shape)


class Scale(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        self.factor = float(kwargs['factor'])
        return x * self.factor

    def backward(self, grad: np.ndarray) -> Grads:
        return (grad * self.factor,)


class MatMul(Function):

    def forward(self, a: np.ndarray, b: np.ndarray, **kwargs: Any) -> np.ndarray:
        return a @ b

    def backward(self, grad: np.ndarray) -> Grads:
        a, b = self.tensors
        return grad @ b.data.T, a.data.T @ grad


class Transpose(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        return x.T

    def backward(self, grad: np.ndarray) -> Grads:
        return (grad.T,)


class Reshape(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        return x.reshape(kwargs['shape'])

    def backward(self, grad: np.ndarray) -> Grads:
        x, = self.tensors
        return (grad.reshape(x.shape),)


class Index(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        self.key = kwargs['key']
        return x[self.key]

    def backward(self, grad: np.ndarray) -> Grads:
        x, = self.tensors
        full = np.zeros(x.shape)
        if _is_basic_key(self.key):
            full[self.key] = grad
        else:
            np.add.at(full, self.key, grad)
        return (full,)


def _is_basic_key(key: Any) -> bool:
    """
    integers and slices never select an element twice
    """
    parts = key if isinstance(key, tuple) else (key,)
    return all(isinstance(part, (int, slice, np.integer)) for part in parts)


class Total(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        return np.asarray(x.sum())

    def backward(self, grad: np.ndarray) -> Grads:
        x, = self.tensors
        return (np.full(x.shape, float(grad)),)


class Relu(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        return np.maximum(x, 0.0)

    def backward(self, grad: np.ndarray) -> Grads:
        x, = self.tensors
        # subgradient at 0 is 0
        return (grad * (x.data > 0.0),)


class Tanh(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        self.out = np.tanh(x)
        return self.out

    def backward(self, grad: np.ndarray) -> Grads:
        return (grad * (1.0 - self.out ** 2),)


class Sigmoid(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        self.out = 0.5 * (1.0 + np.tanh(0.5 * x))
        return self.out

    def backward(self, grad: np.ndarray) -> Grads:
        return (grad * self.out * (1.0 - self.out),)


ACTIVATION_FUNCTIONS = {
    ActivationKind.RELU: Relu,
    ActivationKind.TANH: Tanh,
    ActivationKind.SIGMOID: Sigmoid
}


class Concat(Function):

    def forward(self, *parts: np.ndarray, **kwargs: Any) -> np.ndarray:
        self.axis = kwargs['axis']
        self.offsets = np.cumsum([part.shape[self.axis] for part in parts])[:-1]
        return np.concatenate(parts, axis=self.axis)

    def backward(self, grad: np.ndarray) -> Grads:
        return tuple(np.split(grad, self.offsets, axis=self.axis))


class Stack(Function):

    def forward(self, *parts: np.ndarray, **kwargs: Any) -> np.ndarray:
        return np.stack(parts, axis=0)

    def backward(self, grad: np.ndarray) -> Grads:
        return tuple(grad[i] for i in range(grad.shape[0]))


class Conv1d(Function):
    """
    out[t, k] = bias[k] + sum_{j, d} xp[t + j, d] * weights[k, j, d], xp being the padded input
    """

    def forward(self, x: np.ndarray, weights: np.ndarray, bias: np.ndarray, **kwargs: Any) -> np.ndarray:
        padding: Padding = kwargs['padding']
        length, in_dim = x.shape
        kernels, width, _ = weights.shape
        self.left = 0
        if padding == Padding.SAME:
            self.left = (width - 1) // 2
            right = width - 1 - self.left
            x = np.pad(x, ((self.left, right), (0, 0)))
        self.padded_length = x.shape[0]
        self.out_length = x.shape[0] - width + 1

        # [Tout, w, Din] flattened to [Tout, w * Din]
        windows = sliding_window_view(x, width, axis=0).transpose(0, 2, 1)
        self.columns = windows.reshape(self.out_length, width * in_dim)
        self.flat_weights = weights.reshape(kernels, width * in_dim)
        return self.columns @ self.flat_weights.T + bias

    def backward(self, grad: np.ndarray) -> Grads:
        x, weights, _ = self.tensors
        kernels, width, in_dim = weights.shape
        grad_weights = (grad.T @ self.columns).reshape(kernels, width, in_dim)
        grad_bias = grad.sum(axis=0)

        grad_columns = (grad @ self.flat_weights).reshape(self.out_length, width, in_dim)
        grad_padded = np.zeros((self.padded_length, in_dim))
        for j in range(width):
            grad_padded[j:j + self.out_length] += grad_columns[:, j, :]
        length = x.shape[0]
        return grad_padded[self.left:self.left + length], grad_weights, grad_bias


class MaxOverTime(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        # argmax returns the first maximal index on ties
        self.positions = np.argmax(x, axis=0)
        self.channels = np.arange(x.shape[1])
        return x[self.positions, self.channels]

    def backward(self, grad: np.ndarray) -> Grads:
        x, = self.tensors
        full = np.zeros(x.shape)
        full[self.positions, self.channels] = grad
        return (full,)


class MaxPool1d(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        window: int = kwargs['window']
        stride: int = kwargs['stride']
        out_length = (x.shape[0] - window) // stride + 1
        # [Tout, K, window]
        windows = sliding_window_view(x, window, axis=0)[::stride][:out_length]
        offsets = np.argmax(windows, axis=2)
        self.positions = np.arange(out_length)[:, None] * stride + offsets
        self.channels = np.broadcast_to(np.arange(x.shape[1])[None, :], self.positions.shape)
        return x[self.positions, self.channels]

    def backward(self, grad: np.ndarray) -> Grads:
        x, = self.tensors
        full = np.zeros(x.shape)
        # overlapping windows may share a maximum
        np.add.at(full, (self.positions, self.channels), grad)
        return (full,)


class Dropout(Function):

    def forward(self, x: np.ndarray, **kwargs: Any) -> np.ndarray:
        self.scaled_mask = kwargs['mask'] / (1.0 - kwargs['p'])
        return x * self.scaled_mask

    def backward(self, grad: np.ndarray) -> Grads:
        return (grad * self.scaled_mask,)


class SoftmaxCrossEntropy(Function):

    def forward(self, logits: np.ndarray, **kwargs: Any) -> np.ndarray:
        self.targets = kwargs['targets']
        shifted = logits - logits.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        total_exp = exp.sum(axis=1, keepdims=True)
        self.probs = exp / total_exp
        log_probs = shifted - np.log(total_exp)
        rows = np.arange(logits.shape[0])
        return np.asarray(-log_probs[rows, self.targets].mean())

    def backward(self, grad: np.ndarray) -> Grads:
        batch = self.probs.shape[0]
        delta = self.probs.copy()
        delta[np.arange(batch), self.targets] -= 1.0
        return (float(grad) * delta / batch,)


class MaskedSoftmax(Function):
    """
    row softmax where columns at or beyond length get zero weight
    """

    def forward(self, scores: np.ndarray, **kwargs: Any) -> np.ndarray:
        length: Optional[int] = kwargs.get('length')
        masked = scores.copy()
        if length is not None:
            masked[..., length:] = -np.inf
        exp = np.exp(masked - masked.max(axis=-1, keepdims=True))
        self.out = exp / exp.sum(axis=-1, keepdims=True)
        return self.out

    def backward(self, grad: np.ndarray) -> Grads:
        inner = (grad * self.out).sum(axis=-1, keepdims=True)
        return (self.out * (grad - inner),)


class LayerNorm(Function):

    def forward(self, x: np.ndarray, gain: np.ndarray, bias: np.ndarray, **kwargs: Any) -> np.ndarray:
        eps = kwargs['eps']
        mean = x.mean(axis=-1, keepdims=True)
        var = x.var(axis=-1, keepdims=True)
        self.inv_std = 1.0 / np.sqrt(var + eps)
        self.normalized = (x - mean) * self.inv_std
        return self.normalized * gain + bias

    def backward(self, grad: np.ndarray) -> Grads:
        x, gain, bias = self.tensors
        dim = x.shape[-1]
        grad_normalized = grad * gain.data
        grad_x = self.inv_std / dim * (
            dim * grad_normalized
            - grad_normalized.sum(axis=-1, keepdims=True)
            - self.normalized * (grad_normalized * self.normalized).sum(axis=-1, keepdims=True)
        )
        reduce_axes = tuple(range(grad.ndim - 1))
        grad_gain = (grad * self.normalized).sum(axis=reduce_axes).reshape(gain.shape)
        grad_bias = grad.sum(axis=reduce_axes).reshape(bias.shape)
        return grad_x, grad_gain, grad_bias


class Gather(Function):
    """
    row lookup, rows looked up by padding_id read as zero and receive no gradient
    """

    def forward(self, table: np.ndarray, **kwargs: Any) -> np.ndarray:
        self.ids = kwargs['ids']
        padding_id: Optional[int] = kwargs.get('padding_id')
        out = table[self.ids]
        self.keep = np.ones(self.ids.shape, dtype=bool) if padding_id is None else self.ids != padding_id
        out[~self.keep] = 0.0
        return out

    def backward(self, grad: np.ndarray) -> Grads:
        table, = self.tensors
        full = np.zeros(table.shape)
        np.add.at(full, self.ids[self.keep], grad[self.keep])
        return (full,)


def add(a: Tensor, b: Tensor) -> Tensor:
    return Add.apply(a, b)


def mul(a: Tensor, b: Tensor) -> Tensor:
    return Mul.apply(a, b)


def scale(x: Tensor, factor: float) -> Tensor:
    return Scale.apply(x, factor=factor)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """
    c[i, j] = sum_t a[i, t] * b[t, j]
    """
    if len(a.shape) != 2 or len(b.shape) != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f'matmul shape mismatch: {a.shape} @ {b.shape}')
    return MatMul.apply(a, b)


def transpose(x: Tensor) -> Tensor:
    if len(x.shape) != 2:
        raise ShapeError(f'transpose expects a matrix, got shape {x.shape}')
    return Transpose.apply(x)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(shape)
    if int(np.prod(shape)) != x.size:
        raise ShapeError(f'Cannot reshape {x.shape} into {shape}')
    return Reshape.apply(x, shape=shape)


def index(x: Tensor, key: Any) -> Tensor:
    return Index.apply(x, key=key)


def total(x: Tensor) -> Tensor:
    return Total.apply(x)


def activation(kind: Union[ActivationKind, str], x: Tensor) -> Tensor:
    if isinstance(kind, str):
        kind = ActivationKind.from_value(kind)
    return ACTIVATION_FUNCTIONS[kind].apply(x)


def relu(x: Tensor) -> Tensor:
    return Relu.apply(x)


def tanh(x: Tensor) -> Tensor:
    return Tanh.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def concat(parts: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not parts:
        raise ShapeError('concat needs at least one tensor')
    reference = parts[0].shape
    ndim = len(reference)
    if not -ndim <= axis < ndim:
        raise ShapeError(f'concat axis {axis} out of range for shape {reference}')
    axis = axis % ndim
    for part in parts[1:]:
        if len(part.shape) != ndim or any(
            size != ref_size for dim, (size, ref_size) in enumerate(zip(part.shape, reference)) if dim != axis
        ):
            raise ShapeError(f'concat shape mismatch on axis {axis}: {reference} and {part.shape}')
    return Concat.apply(*parts, axis=axis)


def stack(parts: Sequence[Tensor]) -> Tensor:
    """
    stack equally shaped tensors along a new leading axis
    """
    if not parts:
        raise ShapeError('stack needs at least one tensor')
    for part in parts[1:]:
        if part.shape != parts[0].shape:
            raise ShapeError(f'stack shape mismatch: {parts[0].shape} and {part.shape}')
    return Stack.apply(*parts)


def affine(x: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """
    x @ weights + bias for x of shape [N, D] or [D]
    """
    if len(x.shape) == 1:
        row = matmul(reshape(x, (1, x.shape[0])), weights)
        return add(reshape(row, (weights.shape[1],)), bias)
    return add(matmul(x, weights), bias)


def conv1d(
    x: Tensor,
    weights: Tensor,
    bias: Tensor,
    padding: Union[Padding, str] = Padding.VALID
) -> Tensor:
    """
    1-D convolution over time of x [T, Din] with weights [K, w, Din] and bias [K]
    valid: Tout = T - w + 1
    same: Tout = T
    """
    if isinstance(padding, str):
        padding = Padding(padding)
    if len(x.shape) != 2 or len(weights.shape) != 3 or weights.shape[2] != x.shape[1]:
        raise ShapeError(f'conv1d shape mismatch: input {x.shape}, weights {weights.shape}')
    if bias.shape != (weights.shape[0],):
        raise ShapeError(f'conv1d bias shape {bias.shape} does not match {weights.shape[0]} kernels')
    width = weights.shape[1]
    if padding == Padding.VALID and x.shape[0] < width:
        raise SequenceTooShortError(f'Sequence of length {x.shape[0]} is shorter than kernel width {width}')
    if x.shape[0] < 1:
        raise SequenceTooShortError('conv1d over an empty sequence')
    return Conv1d.apply(x, weights, bias, padding=padding)


def max_over_time(x: Tensor) -> Tensor:
    """
    [T, K] -> [K], maximum of every channel across time
    """
    if len(x.shape) != 2 or x.shape[0] < 1:
        raise ShapeError(f'max_over_time needs a non-empty time axis, got shape {x.shape}')
    return MaxOverTime.apply(x)


def max_pool_1d(x: Tensor, window: int = 3, stride: int = 2) -> Tensor:
    """
    [T, K] -> [floor((T - window) / stride) + 1, K]
    """
    if len(x.shape) != 2:
        raise ShapeError(f'max_pool_1d expects [T, K], got shape {x.shape}')
    if window < 1 or stride < 1:
        raise ParameterError(f'Invalid pooling window {window} or stride {stride}')
    if x.shape[0] < window:
        raise SequenceTooShortError(f'Sequence of length {x.shape[0]} is shorter than pooling window {window}')
    return MaxPool1d.apply(x, window=window, stride=stride)


def dropout(x: Tensor, p: float, mode: Mode, rng: Optional[Rng] = None) -> Tensor:
    """
    inverted dropout, survivors scaled by 1 / (1 - p) so that eval mode is the identity
    """
    if not 0.0 <= p < 1.0:
        raise ParameterError(f'Dropout probability must lie in [0, 1), got {p}')
    if mode == Mode.EVAL or p == 0.0:
        return x
    if rng is None:
        raise ParameterError('Dropout in train mode needs a random generator')
    return Dropout.apply(x, mask=rng.keep_mask(p, x.shape), p=p)


def softmax_cross_entropy(logits: Tensor, targets: Sequence[int]) -> Tensor:
    """
    mean over the batch of -log softmax(logits)[target]
    """
    if len(logits.shape) != 2:
        raise ShapeError(f'Logits must be [B, C], got shape {logits.shape}')
    batch, classes = logits.shape
    target_array = np.asarray(targets, dtype=np.int64)
    if target_array.shape != (batch,):
        raise ShapeError(f'{len(target_array)} targets given for a batch of {batch}')
    for target in target_array:
        if not 0 <= target < classes:
            raise LabelError(f'Target {target} out of range for {classes} classes')
    return SoftmaxCrossEntropy.apply(logits, targets=target_array)


def masked_softmax(scores: Tensor, length: Optional[int] = None) -> Tensor:
    if length is not None and not 1 <= length <= scores.shape[-1]:
        raise ShapeError(f'Mask length {length} out of range for {scores.shape[-1]} positions')
    return MaskedSoftmax.apply(scores, length=length)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = LAYER_NORM_EPS) -> Tensor:
    """
    per row (x - mean) / sqrt(var + eps), then gain and bias
    """
    if gain.shape != (x.shape[-1],) or bias.shape != (x.shape[-1],):
        raise ShapeError(f'layer_norm parameters {gain.shape}, {bias.shape} do not match input {x.shape}')
    return LayerNorm.apply(x, gain, bias, eps=eps)


def gather(table: Tensor, ids: Sequence[int], padding_id: Optional[int] = None) -> Tensor:
    id_array = np.asarray(ids, dtype=np.int64)
    vocab_size = table.shape[0]
    if id_array.size and (id_array.min() < 0 or id_array.max() >= vocab_size):
        raise VocabularyError(f'Token id out of range for a vocabulary of {vocab_size}')
    return Gather.apply(table, ids=id_array, padding_id=padding_id)


def softmax_probabilities(logits: np.ndarray) -> np.ndarray:
    """
    plain softmax over the last axis, outside of any graph
    """
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def split_rows(x: Tensor) -> List[Tensor]:
    return [index(x, t) for t in range(x.shape[0])]
