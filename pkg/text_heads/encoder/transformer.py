"""
Self-attention encoder provider, the desk-scale stand-in of a pretrained transformer
"""
import numpy as np

from ..autograd import Rng, Tensor
from ..constants import POSITIONAL_INIT_STD, ProviderKind
from .base import AbstractEmbeddingProvider
from .layers import EncoderParams, init_encoder_layer_params
from .wrapper import register_provider


@register_provider(ProviderKind.TRANSFORMER)
class TransformerProvider(AbstractEmbeddingProvider):

    def _build(self, rng: Rng, table: np.ndarray) -> EncoderParams:
        positional = rng.normal((self.config.max_len, self.dim), std=POSITIONAL_INIT_STD)
        layers = [
            init_encoder_layer_params(rng, self.dim, self.config.feed_forward_dim, prefix=f'layer{idx}.')
            for idx in range(self.config.layers)
        ]
        params = EncoderParams(
            table=self.register('table', Tensor(table)),
            positional=self.register('positional', Tensor(positional)),
            layers=layers
        )
        self._register_layers(layers)
        return params
