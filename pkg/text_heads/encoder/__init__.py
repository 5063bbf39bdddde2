"""
Embedding providers producing per-token embeddings [T, D]
"""
import logging
from typing import Optional, Type

import numpy as np

from ..autograd import Rng
from ..constants import ProviderKind
from ..exceptions import ConfigError
from ..pipeline_service import Vocabulary
from ..schemes import EncoderConfig
from .base import AbstractEmbeddingProvider
from .layers import (  # NOQA
    AttentionParams,
    EncoderLayerParams,
    EncoderParams,
    attention,
    attention_weights,
    embed,
    encoder_forward,
    init_attention_params,
    init_encoder_layer_params
)
from .tables import StaticTableProvider, TrainableTableProvider  # NOQA
from .transformer import TransformerProvider  # NOQA
from .vectors import load_static_vectors  # NOQA
from .wrapper import PROVIDERS_MAPPING


logger = logging.getLogger(__name__)


def get_provider_kls(provider_kind: ProviderKind) -> Type[AbstractEmbeddingProvider]:
    provider_kls = PROVIDERS_MAPPING.get(provider_kind)
    if provider_kls is None:
        raise ValueError(f'Unregistered provider for {provider_kind}')
    return provider_kls


def build_provider(
    config: EncoderConfig,
    vocab: Vocabulary,
    rng: Rng,
    read_vectors: bool = True
) -> AbstractEmbeddingProvider:
    """
    :param read_vectors: False skips the vector file, for providers whose values come from a checkpoint
    """
    table: Optional[np.ndarray] = None
    if read_vectors and config.vectors is not None:
        table, coverage = load_static_vectors(config.vectors, vocab, rng.spawn(0))
        if coverage.dim != config.dim:
            raise ConfigError(
                f'Vectors in {config.vectors} have dimension {coverage.dim}, configured dim is {config.dim}'
            )
        logger.info(f'Static vectors cover {coverage.found} of {len(vocab) - 1} tokens')
    elif read_vectors and config.provider == ProviderKind.STATIC:
        raise ConfigError('The static provider needs a vectors file')

    provider = get_provider_kls(config.provider)(config, len(vocab), rng.spawn(1), table=table)
    logger.info(f'Built {config.provider.value} provider with {provider.parameter_count} trainable parameters')
    return provider
