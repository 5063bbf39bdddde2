"""
Service component running the finite-difference suites behind `gradcheck ops|model`
"""
import logging
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .autograd import (
    Rng,
    Tensor,
    activation,
    add,
    bilstm,
    concat,
    conv1d,
    dropout,
    gather,
    grad_check,
    index,
    init_bilstm_params,
    init_lstm_params,
    layer_norm,
    lstm_cell,
    masked_softmax,
    matmul,
    max_over_time,
    max_pool_1d,
    mul,
    reshape,
    softmax_cross_entropy,
    stack,
    total,
    transpose
)
from .constants import GRAD_CHECK_TOLERANCE, HeadKind, Mode, Padding, ProviderKind
from .encoder import attention, encoder_forward, init_attention_params
from .encoder.layers import EncoderParams, init_encoder_layer_params
from .model import TextClassifier
from .pipeline_service import PipelineService
from .schemes import (
    BiLSTMHeadConfig,
    DPCNNHeadConfig,
    EncoderConfig,
    GradCheckResult,
    HeadConfig,
    LinearHeadConfig,
    RCNNHeadConfig,
    TextCNNHeadConfig,
    TrainConfig
)
from .synth_service import SynthService


__all__ = ['GradCheckService']


logger = logging.getLogger(__name__)


Check = Tuple[Callable[[], Tensor], Dict[str, Tensor]]

OP_CHECKS: Dict[str, Callable[[Rng], Check]] = {}
KEY_BIAS = 'key_bias'

# desk scale of the full-model suite
MODEL_DIM = 16
MODEL_HIDDEN = 8
MODEL_CHANNELS = 8
MODEL_MAX_LEN = 12
MODEL_MAX_COORDS = 6
MODEL_HEAD_CONFIGS: Dict[HeadKind, HeadConfig] = {
    HeadKind.LINEAR: LinearHeadConfig(),
    HeadKind.TEXTCNN: TextCNNHeadConfig(kernels_per_size=MODEL_CHANNELS),
    HeadKind.BILSTM: BiLSTMHeadConfig(hidden=MODEL_HIDDEN),
    HeadKind.RCNN: RCNNHeadConfig(hidden=MODEL_HIDDEN),
    HeadKind.DPCNN: DPCNNHeadConfig(channels=MODEL_CHANNELS)
}


def register_op_check(name: str) -> Callable:

    def wrapper(builder: Callable[[Rng], Check]) -> Callable[[Rng], Check]:
        if name in OP_CHECKS:
            raise ValueError(f'Check {name} has been registered')
        OP_CHECKS[name] = builder
        return builder

    return wrapper


def _param(rng: Rng, shape: Sequence[int], std: float = 1.0) -> Tensor:
    return Tensor(rng.normal(shape, std=std), requires_grad=True)


def _away_from_zero(rng: Rng, shape: Sequence[int]) -> Tensor:
    """
    entries at least 0.2 away from the relu kink
    """
    values = rng.normal(shape)
    return Tensor(np.sign(values) * (0.2 + np.abs(values)), requires_grad=True)


def _distinct(rng: Rng, shape: Sequence[int]) -> Tensor:
    """
    entries at least 0.09 apart so no perturbation flips a maximum
    """
    count = int(np.prod(shape))
    values = np.array(rng.permutation(count), dtype=np.float64) * 0.1 + rng.uniform(0.0, 0.01, (count,))
    return Tensor(values.reshape(tuple(shape)), requires_grad=True)


def _differentiable(named: Dict[str, Tensor]) -> Dict[str, Tensor]:
    """
    drop key biases: a shift shared by every key score of a query row leaves the softmax unchanged,
    so their gradient is zero and a finite difference only measures round-off
    """
    return {name: tensor for name, tensor in named.items() if not name.endswith(KEY_BIAS)}


def _weighted(rng: Rng, forward: Callable[[], Tensor]) -> Callable[[], Tensor]:
    """
    scalar loss sum(out * w) with a fixed random w
    """
    weights = Tensor(rng.normal(forward().shape))
    return lambda: total(mul(forward(), weights))


@register_op_check('matmul')
def _check_matmul(rng: Rng) -> Check:
    a, b = _param(rng, (3, 4)), _param(rng, (4, 5))
    return _weighted(rng, lambda: matmul(a, b)), {'a': a, 'b': b}


@register_op_check('add_broadcast')
def _check_add(rng: Rng) -> Check:
    a, b = _param(rng, (3, 4)), _param(rng, (4,))
    return _weighted(rng, lambda: add(a, b)), {'a': a, 'b': b}


@register_op_check('mul')
def _check_mul(rng: Rng) -> Check:
    a, b = _param(rng, (3, 4)), _param(rng, (3, 4))
    return _weighted(rng, lambda: mul(a, b)), {'a': a, 'b': b}


@register_op_check('reshape_transpose')
def _check_reshape(rng: Rng) -> Check:
    x = _param(rng, (3, 4))
    return _weighted(rng, lambda: transpose(reshape(x, (6, 2)))), {'x': x}


@register_op_check('index')
def _check_index(rng: Rng) -> Check:
    x = _param(rng, (5, 4))

    def forward() -> Tensor:
        # a repeated row exercises the scatter-add path
        return concat([index(x, 2), index(x, (slice(1, 3), 1)), reshape(index(x, [0, 0, 3]), (12,))], axis=0)

    return _weighted(rng, forward), {'x': x}


@register_op_check('activations')
def _check_activations(rng: Rng) -> Check:
    x = _away_from_zero(rng, (4, 3))
    return _weighted(rng, lambda: stack([activation(kind, x) for kind in ('relu', 'tanh', 'sigmoid')])), {'x': x}


@register_op_check('concat_stack')
def _check_concat(rng: Rng) -> Check:
    a, b = _param(rng, (3, 2)), _param(rng, (3, 4))
    return _weighted(rng, lambda: stack([concat([a, b], axis=1), concat([b, a], axis=1)])), {'a': a, 'b': b}


@register_op_check('conv1d_valid')
def _check_conv_valid(rng: Rng) -> Check:
    x, weights, bias = _param(rng, (7, 3)), _param(rng, (4, 3, 3)), _param(rng, (4,))
    return (
        _weighted(rng, lambda: conv1d(x, weights, bias, padding=Padding.VALID)),
        {'x': x, 'weights': weights, 'bias': bias}
    )


@register_op_check('conv1d_same')
def _check_conv_same(rng: Rng) -> Check:
    x, weights, bias = _param(rng, (6, 3)), _param(rng, (2, 4, 3)), _param(rng, (2,))
    return (
        _weighted(rng, lambda: conv1d(x, weights, bias, padding=Padding.SAME)),
        {'x': x, 'weights': weights, 'bias': bias}
    )


@register_op_check('max_over_time')
def _check_max_over_time(rng: Rng) -> Check:
    x = _distinct(rng, (6, 4))
    return _weighted(rng, lambda: max_over_time(x)), {'x': x}


@register_op_check('max_pool_1d')
def _check_max_pool(rng: Rng) -> Check:
    x = _distinct(rng, (9, 3))
    return _weighted(rng, lambda: max_pool_1d(x, 3, 2)), {'x': x}


@register_op_check('dropout')
def _check_dropout(rng: Rng) -> Check:
    x = _param(rng, (5, 4))
    # a fresh generator per call replays the same mask
    return _weighted(rng, lambda: dropout(x, 0.3, Mode.TRAIN, Rng(7))), {'x': x}


@register_op_check('softmax_cross_entropy')
def _check_cross_entropy(rng: Rng) -> Check:
    logits = _param(rng, (4, 2))
    return (lambda: softmax_cross_entropy(logits, [0, 1, 1, 0])), {'logits': logits}


@register_op_check('masked_softmax')
def _check_masked_softmax(rng: Rng) -> Check:
    scores = _param(rng, (5, 5))
    return _weighted(rng, lambda: masked_softmax(scores, 3)), {'scores': scores}


@register_op_check('layer_norm')
def _check_layer_norm(rng: Rng) -> Check:
    x, gain, bias = _param(rng, (4, 6)), _param(rng, (6,)), _param(rng, (6,))
    return _weighted(rng, lambda: layer_norm(x, gain, bias)), {'x': x, 'gain': gain, 'bias': bias}


@register_op_check('gather')
def _check_gather(rng: Rng) -> Check:
    table = _param(rng, (6, 3))
    return _weighted(rng, lambda: gather(table, [2, 0, 5, 2, 1], padding_id=0)), {'table': table}


@register_op_check('lstm_cell')
def _check_lstm_cell(rng: Rng) -> Check:
    params = init_lstm_params(rng, 3, 4)
    x, h, c = _param(rng, (3,)), _param(rng, (4,), std=0.5), _param(rng, (4,), std=0.5)
    named = {'x': x, 'h': h, 'c': c, **params._asdict()}
    return _weighted(rng, lambda: concat(list(lstm_cell(x, h, c, params)), axis=0)), named


@register_op_check('bilstm')
def _check_bilstm(rng: Rng) -> Check:
    params = init_bilstm_params(rng, 3, 3, 2)
    seq = _param(rng, (4, 3))
    named = {'seq': seq}
    for forward_params, backward_params in params:
        named.update({tensor.name: tensor for tensor in forward_params + backward_params})

    def forward() -> Tensor:
        outputs, final = bilstm(seq, params)
        return concat([reshape(outputs, (outputs.size,)), final], axis=0)

    return _weighted(rng, forward), named


@register_op_check('attention')
def _check_attention(rng: Rng) -> Check:
    params = init_attention_params(rng, 8)
    x = _param(rng, (4, 8))
    return _weighted(rng, lambda: attention(x, params, 2, 3)), _differentiable({'x': x, **params._asdict()})


def _check_encoder(rng: Rng) -> Check:
    config = EncoderConfig(layers=1, heads=2, dim=8, ff_dim=16, max_len=6)
    table = _param(rng, (7, 8), std=0.5)
    positional = _param(rng, (6, 8), std=0.1)
    layer = init_encoder_layer_params(rng, 8, 16)
    params = EncoderParams(table=table, positional=positional, layers=[layer])
    named = {'table': table, 'positional': positional}
    named.update({tensor.name: tensor for tensor in layer.attention})
    named.update({tensor.name: tensor for tensor in layer[1:]})
    return _weighted(rng, lambda: encoder_forward([2, 4, 5, 3], config, params, length=4)), _differentiable(named)


class GradCheckService:

    @classmethod
    def ops_suite(cls, seed: int) -> List[GradCheckResult]:
        """
        every primitive on small random inputs kept clear of relu and max kinks, all coordinates perturbed
        """
        root = Rng(seed)
        results = []
        for idx, (name, builder) in enumerate(OP_CHECKS.items()):
            func, params = builder(root.spawn(idx))
            results.append(cls._result(name, grad_check(func, params)))

        # the feed-forward relu may sit on a kink
        func, params = _check_encoder(root.spawn(len(OP_CHECKS)))
        results.append(cls._result('encoder_forward', grad_check(func, params, skip_nonsmooth=True)))
        return results

    @classmethod
    def model_suite(cls, seed: int) -> List[GradCheckResult]:
        """
        the five heads on a one-layer transformer provider, cross-entropy over a padded and a full example
        """
        root = Rng(seed)
        corpus = SynthService.generate(20, seed)
        vocab = PipelineService.build_vocab(corpus)
        texts = ['某公司签订合同', '被告人某某于2020年1月涉嫌诈骗，出售蔬菜水果。']
        results = []
        for idx, (head_kind, head_config) in enumerate(MODEL_HEAD_CONFIGS.items()):
            config = cls.desk_config(head_config, seed)
            model = TextClassifier.build(config, vocab)
            encoded = [model.encode(text) for text in texts]

            def func(model: TextClassifier = model) -> Tensor:
                logits = stack([model.forward(item.ids, length=item.length, mode=Mode.EVAL) for item in encoded])
                return softmax_cross_entropy(logits, [0, 1])

            error = grad_check(
                func,
                _differentiable(model.parameters()),
                max_coords=MODEL_MAX_COORDS,
                rng=root.spawn(idx),
                skip_nonsmooth=True
            )
            results.append(cls._result(f'model.{head_kind.value}', error))
        return results

    @staticmethod
    def desk_config(head_config: HeadConfig, seed: int) -> TrainConfig:
        return TrainConfig(
            seed=seed,
            max_len=MODEL_MAX_LEN,
            head=head_config,
            encoder=EncoderConfig(
                provider=ProviderKind.TRANSFORMER,
                layers=1,
                heads=2,
                dim=MODEL_DIM,
                ff_dim=2 * MODEL_DIM,
                max_len=MODEL_MAX_LEN
            )
        )

    @staticmethod
    def _result(name: str, error: float) -> GradCheckResult:
        result = GradCheckResult(name=name, max_relative_error=error, tolerance=GRAD_CHECK_TOLERANCE)
        if result.passed:
            logger.info(f'{name}: max relative error {error:.3e}')
        else:
            logger.error(f'{name}: max relative error {error:.3e} exceeds {GRAD_CHECK_TOLERANCE}')
        return result

    @staticmethod
    def render(results: Sequence[GradCheckResult]) -> str:
        lines = [
            f'{result.name}\t{result.max_relative_error:.3e}\t{"ok" if result.passed else "FAIL"}'
            for result in results
        ]
        return '\n'.join(lines) + '\n'
