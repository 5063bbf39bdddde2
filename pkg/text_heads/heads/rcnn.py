"""
RCNN head, BiLSTM outputs beside the embedding, relu and max-over-time pooling
"""
from typing import Optional

from ..autograd import Rng, Tensor, concat, max_over_time, relu
from ..constants import HeadKind, Mode
from .bilstm import RecurrentHead
from .wrapper import register_head


@register_head(HeadKind.RCNN)
class RCNNHead(RecurrentHead):

    @property
    def feature_dim(self) -> int:
        return 2 * self.config.hidden + self.dim

    def _features(self, emb: Tensor, length: int, mode: Mode, rng: Optional[Rng]) -> Tensor:
        outputs, _ = self._run(emb, length, mode, rng)
        # [T, 2H + D]
        combined = concat([outputs, self._unpadded(emb, length)], axis=1)
        return max_over_time(relu(combined))
