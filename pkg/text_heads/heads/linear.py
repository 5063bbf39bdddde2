"""
Baseline head, a fully connected layer over the CLS position
"""
from typing import Optional

from ..autograd import Rng, Tensor, index
from ..constants import HeadKind, Mode
from .base import AbstractHead
from .wrapper import register_head


@register_head(HeadKind.LINEAR)
class LinearHead(AbstractHead):

    @property
    def feature_dim(self) -> int:
        return self.dim

    def _build(self, rng: Rng) -> None:
        pass

    def _features(self, emb: Tensor, length: int, mode: Mode, rng: Optional[Rng]) -> Tensor:
        return index(emb, 0)
