"""
LSTM cell and stacked bidirectional LSTM

gate layout of the 4H pre-activation is [input, forget, candidate, output]:
i, f, o = sigmoid(.), g = tanh(.), c' = f * c + i * g, h' = o * tanh(c')
"""
from typing import Any, List, NamedTuple, Optional, Tuple

import numpy as np

from ..constants import FORGET_GATE_BIAS, Mode
from ..exceptions import ShapeError
from .functional import concat, dropout, index, split_rows, stack
from .init import glorot_uniform, zeros
from .rng import Rng
from .tensor import Function, Tensor


__all__ = ['LSTMParams', 'bilstm', 'init_bilstm_params', 'init_lstm_params', 'lstm_cell']


class LSTMParams(NamedTuple):

    input_weights: Tensor      # [D, 4H]
    hidden_weights: Tensor     # [H, 4H]
    bias: Tensor               # [4H]

    @property
    def hidden(self) -> int:
        return self.hidden_weights.shape[0]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


class LSTMCell(Function):
    """
    one timestep, the output stacks [h', c'] as a [2, H] array
    """

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        x, h, c, input_weights, hidden_weights, bias = arrays
        hidden = h.shape[0]
        z = x @ input_weights + h @ hidden_weights + bias
        self.i = _sigmoid(z[:hidden])
        self.f = _sigmoid(z[hidden:2 * hidden])
        self.g = np.tanh(z[2 * hidden:3 * hidden])
        self.o = _sigmoid(z[3 * hidden:])
        c_next = self.f * c + self.i * self.g
        self.tanh_c = np.tanh(c_next)
        h_next = self.o * self.tanh_c
        return np.stack([h_next, c_next])

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        x, h, c, input_weights, hidden_weights, _ = self.tensors
        grad_h, grad_c = grad[0], grad[1]
        grad_c = grad_c + grad_h * self.o * (1.0 - self.tanh_c ** 2)

        grad_z = np.concatenate([
            grad_c * self.g * self.i * (1.0 - self.i),
            grad_c * c.data * self.f * (1.0 - self.f),
            grad_c * self.i * (1.0 - self.g ** 2),
            grad_h * self.tanh_c * self.o * (1.0 - self.o)
        ])
        return (
            input_weights.data @ grad_z,
            hidden_weights.data @ grad_z,
            grad_c * self.f,
            np.outer(x.data, grad_z),
            np.outer(h.data, grad_z),
            grad_z
        )


def lstm_cell(x: Tensor, h: Tensor, c: Tensor, params: LSTMParams) -> Tuple[Tensor, Tensor]:
    hidden = params.hidden
    in_dim = params.input_weights.shape[0]
    if (
        x.shape != (in_dim,)
        or h.shape != (hidden,)
        or c.shape != (hidden,)
        or params.input_weights.shape != (in_dim, 4 * hidden)
        or params.hidden_weights.shape != (hidden, 4 * hidden)
        or params.bias.shape != (4 * hidden,)
    ):
        raise ShapeError(
            f'lstm_cell shape mismatch: x {x.shape}, h {h.shape}, c {c.shape}, '
            f'input weights {params.input_weights.shape}, hidden weights {params.hidden_weights.shape}, '
            f'bias {params.bias.shape}'
        )
    state = LSTMCell.apply(x, h, c, params.input_weights, params.hidden_weights, params.bias)
    return index(state, 0), index(state, 1)


def init_lstm_params(rng: Rng, in_dim: int, hidden: int, prefix: str = '') -> LSTMParams:
    bias = zeros((4 * hidden,), name=f'{prefix}bias')
    bias.data[hidden:2 * hidden] = FORGET_GATE_BIAS
    return LSTMParams(
        input_weights=glorot_uniform(rng, (in_dim, 4 * hidden), in_dim, 4 * hidden, name=f'{prefix}input_weights'),
        hidden_weights=glorot_uniform(rng, (hidden, 4 * hidden), hidden, 4 * hidden, name=f'{prefix}hidden_weights'),
        bias=bias
    )


def init_bilstm_params(rng: Rng, in_dim: int, hidden: int, layers: int) -> List[Tuple[LSTMParams, LSTMParams]]:
    """
    per layer a (forward, backward) pair, layers above the first read 2H features
    """
    result = []
    for layer in range(layers):
        layer_in = in_dim if layer == 0 else 2 * hidden
        result.append((
            init_lstm_params(rng, layer_in, hidden, prefix=f'layer{layer}.forward.'),
            init_lstm_params(rng, layer_in, hidden, prefix=f'layer{layer}.backward.')
        ))
    return result


def _run_direction(rows: List[Tensor], params: LSTMParams, reverse: bool) -> List[Tensor]:
    hidden = params.hidden
    h = Tensor(np.zeros(hidden))
    c = Tensor(np.zeros(hidden))
    outputs: List[Tensor] = [h] * len(rows)
    steps = range(len(rows) - 1, -1, -1) if reverse else range(len(rows))
    for t in steps:
        h, c = lstm_cell(rows[t], h, c, params)
        outputs[t] = h
    return outputs


def bilstm(
    seq: Tensor,
    params: List[Tuple[LSTMParams, LSTMParams]],
    dropout_p: float = 0.0,
    mode: Mode = Mode.EVAL,
    rng: Optional[Rng] = None
) -> Tuple[Tensor, Tensor]:
    """
    stacked bidirectional LSTM over seq [T, D]
    :return: outputs [T, 2H] of the top layer, and final [2H] which concatenates
             the top forward state at t = T - 1 with the top backward state at t = 0
    """
    if len(seq.shape) != 2 or seq.shape[0] < 1:
        raise ShapeError(f'bilstm needs a non-empty [T, D] sequence, got shape {seq.shape}')
    layer_input = seq
    forward_states: List[Tensor] = []
    backward_states: List[Tensor] = []
    for layer, (forward_params, backward_params) in enumerate(params):
        if layer > 0:
            layer_input = dropout(layer_input, dropout_p, mode, rng)
        rows = split_rows(layer_input)
        forward_states = _run_direction(rows, forward_params, reverse=False)
        backward_states = _run_direction(rows, backward_params, reverse=True)
        layer_input = concat([stack(forward_states), stack(backward_states)], axis=1)

    final = concat([forward_states[-1], backward_states[0]], axis=0)
    return layer_input, final
