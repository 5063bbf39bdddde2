"""
Embedding lookup, masked multi-head self-attention and the post-norm encoder stack
"""
import math
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from ..autograd import (
    Rng,
    Tensor,
    add,
    affine,
    concat,
    dropout,
    gather,
    index,
    layer_norm,
    masked_softmax,
    matmul,
    no_grad,
    relu,
    scale,
    transpose
)
from ..autograd.init import constant, glorot_uniform, zeros
from ..constants import Mode, PAD_ID
from ..exceptions import ShapeError
from ..schemes import EncoderConfig


__all__ = [
    'AttentionParams',
    'EncoderLayerParams',
    'EncoderParams',
    'attention',
    'attention_weights',
    'embed',
    'encoder_forward',
    'init_attention_params',
    'init_encoder_layer_params'
]


class AttentionParams(NamedTuple):

    query_weights: Tensor      # [D, D]
    query_bias: Tensor         # [D]
    key_weights: Tensor
    key_bias: Tensor
    value_weights: Tensor
    value_bias: Tensor
    output_weights: Tensor
    output_bias: Tensor


class EncoderLayerParams(NamedTuple):

    attention: AttentionParams
    attention_norm_gain: Tensor       # [D]
    attention_norm_bias: Tensor
    hidden_weights: Tensor            # [D, F]
    hidden_bias: Tensor               # [F]
    output_weights: Tensor            # [F, D]
    output_bias: Tensor               # [D]
    feed_forward_norm_gain: Tensor
    feed_forward_norm_bias: Tensor


class EncoderParams(NamedTuple):

    table: Tensor                       # [V, D]
    positional: Optional[Tensor]        # [max_len, D], None reads as zero
    layers: List[EncoderLayerParams]


def init_attention_params(rng: Rng, dim: int, prefix: str = '') -> AttentionParams:
    tensors = {}
    for role in ('query', 'key', 'value', 'output'):
        tensors[f'{role}_weights'] = glorot_uniform(rng, (dim, dim), dim, dim, name=f'{prefix}{role}_weights')
        tensors[f'{role}_bias'] = zeros((dim,), name=f'{prefix}{role}_bias')
    return AttentionParams(**tensors)


def init_encoder_layer_params(rng: Rng, dim: int, ff_dim: int, prefix: str = '') -> EncoderLayerParams:
    return EncoderLayerParams(
        attention=init_attention_params(rng, dim, prefix=f'{prefix}attention.'),
        attention_norm_gain=constant((dim,), 1.0, name=f'{prefix}attention_norm.gain'),
        attention_norm_bias=zeros((dim,), name=f'{prefix}attention_norm.bias'),
        hidden_weights=glorot_uniform(rng, (dim, ff_dim), dim, ff_dim, name=f'{prefix}feed_forward.hidden_weights'),
        hidden_bias=zeros((ff_dim,), name=f'{prefix}feed_forward.hidden_bias'),
        output_weights=glorot_uniform(rng, (ff_dim, dim), ff_dim, dim, name=f'{prefix}feed_forward.output_weights'),
        output_bias=zeros((dim,), name=f'{prefix}feed_forward.output_bias'),
        feed_forward_norm_gain=constant((dim,), 1.0, name=f'{prefix}feed_forward_norm.gain'),
        feed_forward_norm_bias=zeros((dim,), name=f'{prefix}feed_forward_norm.bias')
    )


def embed(ids: Sequence[int], table: Tensor, positional: Optional[Tensor] = None) -> Tensor:
    """
    out[t] = table[ids[t]] + positional[t], PAD ids read a zero token row
    """
    length = len(ids)
    if length < 1:
        raise ShapeError('embed needs at least one id')
    out = gather(table, ids, padding_id=PAD_ID)
    if positional is None:
        return out
    if positional.shape[1] != table.shape[1]:
        raise ShapeError(f'Positional width {positional.shape[1]} does not match table width {table.shape[1]}')
    if length > positional.shape[0]:
        raise ShapeError(f'{length} ids exceed the {positional.shape[0]} learned positions')
    return add(out, index(positional, slice(0, length)))


def _check_attention(x: Tensor, params: AttentionParams, heads: int) -> None:
    if len(x.shape) != 2:
        raise ShapeError(f'attention expects [T, D], got shape {x.shape}')
    dim = x.shape[1]
    if heads < 1 or dim % heads != 0:
        raise ShapeError(f'Width {dim} is not divisible by {heads} heads')
    for name, tensor in params._asdict().items():
        expected = (dim, dim) if name.endswith('weights') else (dim,)
        if tensor.shape != expected:
            raise ShapeError(f'attention {name} has shape {tensor.shape}, expected {expected}')


def _head_scores(x: Tensor, params: AttentionParams, heads: int, length: Optional[int]) -> List[Tensor]:
    dim = x.shape[1]
    head_dim = dim // heads
    queries = affine(x, params.query_weights, params.query_bias)
    keys = affine(x, params.key_weights, params.key_bias)
    result = []
    for head in range(heads):
        columns = (slice(None), slice(head * head_dim, (head + 1) * head_dim))
        scores = matmul(index(queries, columns), transpose(index(keys, columns)))
        result.append(masked_softmax(scale(scores, 1.0 / math.sqrt(head_dim)), length))
    return result


def attention(x: Tensor, params: AttentionParams, heads: int, length: Optional[int] = None) -> Tensor:
    """
    multi-head scaled dot-product self-attention,
    key positions at or beyond length get zero weight
    """
    _check_attention(x, params, heads)
    head_dim = x.shape[1] // heads
    values = affine(x, params.value_weights, params.value_bias)
    outputs = []
    for head, weights in enumerate(_head_scores(x, params, heads, length)):
        columns = (slice(None), slice(head * head_dim, (head + 1) * head_dim))
        outputs.append(matmul(weights, index(values, columns)))
    return affine(concat(outputs, axis=1), params.output_weights, params.output_bias)


def attention_weights(x: Tensor, params: AttentionParams, heads: int, length: Optional[int] = None) -> np.ndarray:
    """
    [heads, T, T] attention distributions, outside of any graph
    """
    _check_attention(x, params, heads)
    with no_grad():
        return np.stack([weights.data for weights in _head_scores(x, params, heads, length)])


def encoder_forward(
    ids: Sequence[int],
    config: EncoderConfig,
    params: EncoderParams,
    mode: Mode = Mode.EVAL,
    rng: Optional[Rng] = None,
    length: Optional[int] = None
) -> Tensor:
    """
    embed, then per layer
    x = norm(x + dropout(attention(x))), x = norm(x + dropout(ff(x)))
    """
    x = embed(ids, params.table, params.positional)
    for layer in params.layers:
        attended = dropout(attention(x, layer.attention, config.heads, length), config.dropout, mode, rng)
        x = layer_norm(add(x, attended), layer.attention_norm_gain, layer.attention_norm_bias)

        hidden = relu(affine(x, layer.hidden_weights, layer.hidden_bias))
        fed = dropout(affine(hidden, layer.output_weights, layer.output_bias), config.dropout, mode, rng)
        x = layer_norm(add(x, fed), layer.feed_forward_norm_gain, layer.feed_forward_norm_bias)
    return x
