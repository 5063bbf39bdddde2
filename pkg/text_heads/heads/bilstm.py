"""
BiLSTM head, the last hidden state fed into the classifier
"""
from typing import List, Optional, Tuple

from ..autograd import LSTMParams, Rng, Tensor, bilstm, init_bilstm_params
from ..constants import HeadKind, Mode
from .base import AbstractHead
from .wrapper import register_head


class RecurrentHead(AbstractHead):
    """
    shared allocation of the stacked bidirectional LSTM, run over the unpadded positions
    """

    def _build(self, rng: Rng) -> None:
        self.lstm: List[Tuple[LSTMParams, LSTMParams]] = init_bilstm_params(
            rng, self.dim, self.config.hidden, self.config.layers
        )
        for forward_params, backward_params in self.lstm:
            for tensor in forward_params + backward_params:
                self.register(f'lstm.{tensor.name}', tensor)

    def _run(self, emb: Tensor, length: int, mode: Mode, rng: Optional[Rng]) -> Tuple[Tensor, Tensor]:
        return bilstm(self._unpadded(emb, length), self.lstm, dropout_p=self.config.dropout, mode=mode, rng=rng)


@register_head(HeadKind.BILSTM)
class BiLSTMHead(RecurrentHead):

    @property
    def feature_dim(self) -> int:
        return 2 * self.config.hidden

    def _features(self, emb: Tensor, length: int, mode: Mode, rng: Optional[Rng]) -> Tensor:
        _, final = self._run(emb, length, mode, rng)
        return final
