"""
Full classifier, an embedding provider with a classification head on top
"""
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .autograd import Rng, Tensor, no_grad, softmax_probabilities
from .constants import HeadKind, Mode
from .encoder import AbstractEmbeddingProvider, build_provider
from .exceptions import ShapeError
from .heads import AbstractHead, build_head
from .pipeline_service import PipelineService, Vocabulary
from .schemes import EncodedText, TrainConfig


__all__ = ['TextClassifier']


# independent random streams under the run seed
INIT_STREAM = 0
DROPOUT_STREAM = 1
SHUFFLE_STREAM = 2


class TextClassifier:

    ENCODER_PREFIX = 'encoder.'
    HEAD_PREFIX = 'head.'

    def __init__(
        self,
        config: TrainConfig,
        vocab: Vocabulary,
        provider: AbstractEmbeddingProvider,
        head: AbstractHead
    ):
        self.config = config
        self.vocab = vocab
        self.provider = provider
        self.head = head

    @classmethod
    def build(cls, config: TrainConfig, vocab: Vocabulary, read_vectors: bool = True) -> 'TextClassifier':
        """
        fresh parameters, a pure function of config.seed
        """
        rng = Rng(config.seed).spawn(INIT_STREAM)
        provider = build_provider(config.encoder, vocab, rng.spawn(0), read_vectors=read_vectors)
        head = build_head(config.head, config.encoder.dim, rng.spawn(1))
        return cls(config, vocab, provider, head)

    @property
    def head_kind(self) -> HeadKind:
        return self.head.kind

    def forward(
        self,
        ids: Sequence[int],
        length: Optional[int] = None,
        mode: Mode = Mode.EVAL,
        rng: Optional[Rng] = None
    ) -> Tensor:
        """
        :return: logits [2]
        """
        emb = self.provider.forward(ids, length=length, mode=mode, rng=rng)
        return self.head.forward(emb, length=length, mode=mode, rng=rng)

    def parameters(self) -> Dict[str, Tensor]:
        result = {f'{self.ENCODER_PREFIX}{name}': tensor for name, tensor in self.provider.parameters().items()}
        result.update({f'{self.HEAD_PREFIX}{name}': tensor for name, tensor in self.head.parameters().items()})
        return result

    def state(self) -> Dict[str, Tensor]:
        """
        every tensor, frozen ones included
        """
        result = {f'{self.ENCODER_PREFIX}{name}': tensor for name, tensor in self.provider.state().items()}
        result.update({f'{self.HEAD_PREFIX}{name}': tensor for name, tensor in self.head.state().items()})
        return result

    @property
    def parameter_count(self) -> int:
        return self.provider.parameter_count + self.head.parameter_count

    def zero_grad(self) -> None:
        self.provider.zero_grad()
        self.head.zero_grad()

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {name: tensor.data.copy() for name, tensor in self.state().items()}

    def restore(self, snapshot: Dict[str, np.ndarray]) -> None:
        for name, tensor in self.state().items():
            values = snapshot[name]
            if values.shape != tensor.shape:
                raise ShapeError(f'{name} has shape {tensor.shape}, snapshot holds {values.shape}')
            tensor.data = values.copy()

    def encode(self, text: str) -> EncodedText:
        return PipelineService.encode_pad(
            PipelineService.tokenize(text),
            self.config.max_len,
            self.vocab,
            self.config.truncation
        )

    def logits(self, encoded: EncodedText) -> np.ndarray:
        with no_grad():
            return self.forward(encoded.ids, length=encoded.length, mode=Mode.EVAL).numpy()

    def predict_proba(self, text: str) -> np.ndarray:
        """
        class probabilities [P(0), P(1)]
        """
        return softmax_probabilities(self.logits(self.encode(text)))

    def predict(self, text: str) -> Tuple[int, float]:
        """
        :return: (label, probability of that label)
        """
        probabilities = self.predict_proba(text)
        label = int(np.argmax(probabilities))
        return label, float(probabilities[label])
