"""
DPCNN head, region embedding followed by a pyramid of pooled residual blocks
"""
from typing import List, Optional, Tuple

from ..autograd import Rng, Tensor, add, conv1d, max_over_time, max_pool_1d, no_grad, relu
from ..autograd.init import glorot_uniform, zeros
from ..constants import DPCNN_POOL_STRIDE, DPCNN_POOL_WINDOW, HeadKind, Mode, Padding
from .base import AbstractHead
from .wrapper import register_head


@register_head(HeadKind.DPCNN)
class DPCNNHead(AbstractHead):
    """
    1. region embedding: same-padded conv over the embedding, [T, C]
    2. two rounds of relu -> conv on top of it, added back to the region embedding
    3. while the length allows a pooling window:
       p = max_pool(x), x = p + two rounds of relu -> conv over p
    4. max over time

    one C x C convolution is shared by step 2 and every block
    """

    @property
    def min_length(self) -> int:
        return self.config.pool_window

    @property
    def feature_dim(self) -> int:
        return self.config.channels

    def _build(self, rng: Rng) -> None:
        channels, kernel = self.config.channels, self.config.kernel
        self.region_weights = self.register(
            'region.weights',
            glorot_uniform(rng, (channels, kernel, self.dim), kernel * self.dim, channels)
        )
        self.region_bias = self.register('region.bias', zeros((channels,)))
        self.conv_weights = self.register(
            'conv.weights',
            glorot_uniform(rng, (channels, kernel, channels), kernel * channels, channels)
        )
        self.conv_bias = self.register('conv.bias', zeros((channels,)))

    def _conv_rounds(self, x: Tensor) -> Tensor:
        for _ in range(2):
            x = conv1d(relu(x), self.conv_weights, self.conv_bias, padding=Padding.SAME)
        return x

    def _pyramid(self, emb: Tensor) -> Tuple[Tensor, List[int]]:
        """
        :return: output of the last block and the length after every block
        """
        region = conv1d(emb, self.region_weights, self.region_bias, padding=Padding.SAME)
        x = add(region, self._conv_rounds(region))

        schedule = []
        while x.shape[0] >= self.config.pool_window:
            pooled = max_pool_1d(x, self.config.pool_window, self.config.pool_stride)
            x = add(pooled, self._conv_rounds(pooled))
            schedule.append(x.shape[0])
        return x, schedule

    def _features(self, emb: Tensor, length: int, mode: Mode, rng: Optional[Rng]) -> Tensor:
        x, _ = self._pyramid(emb)
        return max_over_time(x)

    def executed_schedule(self, emb: Tensor) -> List[int]:
        """
        lengths produced by the blocks that actually run on emb
        """
        self._check_input(emb)
        with no_grad():
            _, schedule = self._pyramid(emb)
        return schedule

    @staticmethod
    def block_lengths(length: int, window: int = DPCNN_POOL_WINDOW, stride: int = DPCNN_POOL_STRIDE) -> List[int]:
        """
        lengths after every pooling block, floor((T - window) / stride) + 1 while T >= window
        """
        result = []
        while length >= window:
            length = (length - window) // stride + 1
            result.append(length)
        return result
