"""
Base classification head
"""
from abc import ABC, abstractmethod
from typing import Any, Optional

from ..autograd import ParameterStore, Rng, Tensor, affine, dropout, index
from ..autograd.init import glorot_uniform, zeros
from ..constants import HeadKind, Mode, NUM_CLASSES
from ..exceptions import SequenceTooShortError, ShapeError


class AbstractHead(ParameterStore, ABC):
    """
    Maps encoder output [T, D] to 2-class logits

    dropout sits right before the final linear layer, named `classifier`
    """
    kind: HeadKind

    def __init__(self, config: Any, dim: int, rng: Rng):
        super().__init__()
        self.config = config
        self.dim = dim
        self._build(rng)
        classifier_in = self.feature_dim
        self.classifier_weights = self.register(
            'classifier.weights',
            glorot_uniform(rng, (classifier_in, NUM_CLASSES), classifier_in, NUM_CLASSES)
        )
        self.classifier_bias = self.register('classifier.bias', zeros((NUM_CLASSES,)))

    @property
    def min_length(self) -> int:
        return 1

    @property
    def dropout_p(self) -> float:
        return getattr(self.config, 'dropout', 0.0)

    @property
    @abstractmethod
    def feature_dim(self) -> int:
        """
        width of the vector fed into the classifier
        """

    @abstractmethod
    def _build(self, rng: Rng) -> None:
        """
        allocate and register the head parameters, classifier excluded
        """

    @abstractmethod
    def _features(self, emb: Tensor, length: int, mode: Mode, rng: Optional[Rng]) -> Tensor:
        """
        pooled feature vector [feature_dim]
        """

    def forward(
        self,
        emb: Tensor,
        length: Optional[int] = None,
        mode: Mode = Mode.EVAL,
        rng: Optional[Rng] = None
    ) -> Tensor:
        """
        :param emb: [T, D] encoder output
        :param length: true length, positions from here on are padding; T when omitted
        :return: logits [2]
        """
        length = self._check_input(emb, length)
        features = dropout(self._features(emb, length, mode, rng), self.dropout_p, mode, rng)
        return affine(features, self.classifier_weights, self.classifier_bias)

    @staticmethod
    def _unpadded(emb: Tensor, length: int) -> Tensor:
        if length == emb.shape[0]:
            return emb
        return index(emb, slice(0, length))

    def _check_input(self, emb: Tensor, length: Optional[int] = None) -> int:
        """
        :return: true length, T when omitted
        """
        if len(emb.shape) != 2 or emb.shape[1] != self.dim:
            raise ShapeError(f'{type(self).__name__} expects [T, {self.dim}], got shape {emb.shape}')
        total_length = emb.shape[0]
        if total_length < self.min_length:
            raise SequenceTooShortError(
                f'{self.kind.value} head needs at least {self.min_length} positions, got {total_length}'
            )
        if length is None:
            length = total_length
        if not 1 <= length <= total_length:
            raise ShapeError(f'True length {length} out of range for {total_length} positions')
        return length
