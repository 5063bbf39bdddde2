"""
Table-only providers, no attention layers
"""
import numpy as np

from ..autograd import Rng, Tensor
from ..constants import POSITIONAL_INIT_STD, ProviderKind
from .base import AbstractEmbeddingProvider
from .layers import EncoderParams
from .wrapper import register_provider


@register_provider(ProviderKind.STATIC)
class StaticTableProvider(AbstractEmbeddingProvider):
    """
    frozen table, usually read from a static-vector file, and no positions
    """

    def _build(self, rng: Rng, table: np.ndarray) -> EncoderParams:
        return EncoderParams(
            table=self.register('table', Tensor(table), trainable=False),
            positional=None,
            layers=[]
        )


@register_provider(ProviderKind.TRAINABLE)
class TrainableTableProvider(AbstractEmbeddingProvider):
    """
    learned token table plus learned positions
    """

    def _build(self, rng: Rng, table: np.ndarray) -> EncoderParams:
        positional = rng.normal((self.config.max_len, self.dim), std=POSITIONAL_INIT_STD)
        return EncoderParams(
            table=self.register('table', Tensor(table)),
            positional=self.register('positional', Tensor(positional)),
            layers=[]
        )
