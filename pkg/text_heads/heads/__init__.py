"""
Classification heads mapping encoder output [T, D] to 2 logits
"""
import logging
from typing import Type

from ..autograd import Rng
from ..constants import HeadKind
from ..schemes import HeadConfig, head_kind_of
from .base import AbstractHead
from .bilstm import BiLSTMHead, RecurrentHead  # NOQA
from .dpcnn import DPCNNHead  # NOQA
from .linear import LinearHead  # NOQA
from .rcnn import RCNNHead  # NOQA
from .textcnn import TextCNNHead  # NOQA
from .wrapper import HEADS_MAPPING


logger = logging.getLogger(__name__)


def get_head_kls(head_kind: HeadKind) -> Type[AbstractHead]:
    head_kls = HEADS_MAPPING.get(head_kind)
    if head_kls is None:
        raise ValueError(f'Unregistered head for {head_kind}')
    return head_kls


def build_head(config: HeadConfig, dim: int, rng: Rng) -> AbstractHead:
    head_kind = head_kind_of(config)
    head = get_head_kls(head_kind)(config, dim, rng)
    logger.info(f'Built {head_kind.display_name} head with {head.parameter_count} parameters')
    return head
