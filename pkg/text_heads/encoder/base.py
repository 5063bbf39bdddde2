"""
Base embedding provider
"""
from abc import ABC, abstractmethod
from typing import List, Optional, Sequence

import numpy as np

from ..autograd import ParameterStore, Rng, Tensor
from ..constants import EMBEDDING_INIT_STD, Mode, PAD_ID, ProviderKind
from ..exceptions import ShapeError
from ..schemes import EncoderConfig
from .layers import EncoderLayerParams, EncoderParams, encoder_forward


class AbstractEmbeddingProvider(ParameterStore, ABC):
    """
    Maps ids[T] to contextual embeddings [T, D], every provider shares this signature
    """
    kind: ProviderKind

    def __init__(
        self,
        config: EncoderConfig,
        vocab_size: int,
        rng: Rng,
        table: Optional[np.ndarray] = None
    ):
        super().__init__()
        self.config = config
        self.vocab_size = vocab_size
        self.params = self._build(rng, self._initial_table(rng, table))

    @property
    def dim(self) -> int:
        return self.config.dim

    def _initial_table(self, rng: Rng, table: Optional[np.ndarray]) -> np.ndarray:
        expected = (self.vocab_size, self.dim)
        if table is None:
            table = rng.normal(expected, std=EMBEDDING_INIT_STD)
        elif table.shape != expected:
            raise ShapeError(f'Embedding table has shape {table.shape}, expected {expected}')
        table = np.array(table, dtype=np.float64)
        table[PAD_ID] = 0.0
        return table

    @abstractmethod
    def _build(self, rng: Rng, table: np.ndarray) -> EncoderParams:
        """
        allocate and register the provider parameters
        """

    def _register_layers(self, layers: List[EncoderLayerParams]) -> None:
        for layer in layers:
            for tensor in layer.attention:
                self.register(tensor.name, tensor)
            for tensor in layer[1:]:
                self.register(tensor.name, tensor)

    def forward(
        self,
        ids: Sequence[int],
        length: Optional[int] = None,
        mode: Mode = Mode.EVAL,
        rng: Optional[Rng] = None
    ) -> Tensor:
        if len(ids) > self.config.max_len:
            raise ShapeError(f'{len(ids)} ids exceed max_len {self.config.max_len}')
        return encoder_forward(ids, self.config, self.params, mode=mode, rng=rng, length=length)
