"""
Heads wrapper
"""
from typing import Callable, Dict, Type

from ..constants import HeadKind
from .base import AbstractHead


HEADS_MAPPING: Dict[HeadKind, Type[AbstractHead]] = {}


def register_head(head_kind: HeadKind) -> Callable:

    def wrapper(klass: Type[AbstractHead]) -> Type[AbstractHead]:
        if head_kind in HEADS_MAPPING:
            raise ValueError(f'Head {head_kind} has been registered')
        klass.kind = head_kind
        HEADS_MAPPING[head_kind] = klass
        return klass

    return wrapper
