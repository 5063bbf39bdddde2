"""
TextCNN head, n-gram convolutions with max-over-time pooling
"""
from typing import Dict, Optional, Tuple

from ..autograd import Rng, Tensor, concat, conv1d, max_over_time, relu
from ..autograd.init import glorot_uniform, zeros
from ..constants import HeadKind, Mode, Padding
from .base import AbstractHead
from .wrapper import register_head


@register_head(HeadKind.TEXTCNN)
class TextCNNHead(AbstractHead):
    """
    per kernel size w: conv1d valid -> relu -> max over time, the pooled maps concatenated
    """

    @property
    def min_length(self) -> int:
        return max(self.config.kernel_sizes)

    @property
    def feature_dim(self) -> int:
        return len(self.config.kernel_sizes) * self.config.kernels_per_size

    def _build(self, rng: Rng) -> None:
        kernels = self.config.kernels_per_size
        self.convolutions: Dict[int, Tuple[Tensor, Tensor]] = {}
        for width in self.config.kernel_sizes:
            weights = self.register(
                f'conv{width}.weights',
                glorot_uniform(rng, (kernels, width, self.dim), width * self.dim, kernels)
            )
            bias = self.register(f'conv{width}.bias', zeros((kernels,)))
            self.convolutions[width] = (weights, bias)

    def _features(self, emb: Tensor, length: int, mode: Mode, rng: Optional[Rng]) -> Tensor:
        pooled = [
            max_over_time(relu(conv1d(emb, weights, bias, padding=Padding.VALID)))
            for weights, bias in self.convolutions.values()
        ]
        return concat(pooled, axis=0)
