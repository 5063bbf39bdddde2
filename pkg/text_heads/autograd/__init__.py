"""
Dense tensors with reverse-mode automatic differentiation
"""
from .functional import (  # NOQA
    activation,
    add,
    affine,
    concat,
    conv1d,
    dropout,
    gather,
    index,
    layer_norm,
    masked_softmax,
    matmul,
    max_over_time,
    max_pool_1d,
    mul,
    relu,
    reshape,
    scale,
    sigmoid,
    softmax_cross_entropy,
    softmax_probabilities,
    split_rows,
    stack,
    tanh,
    total,
    transpose
)
from .grad_check import grad_check  # NOQA
from .parameters import ParameterStore  # NOQA
from .recurrent import LSTMParams, bilstm, init_bilstm_params, init_lstm_params, lstm_cell  # NOQA
from .rng import Rng  # NOQA
from .tensor import Function, Graph, Tensor, as_tensor, backward, is_grad_enabled, no_grad  # NOQA
