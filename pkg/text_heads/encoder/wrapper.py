"""
Providers wrapper
"""
from typing import Callable, Dict, Type

from ..constants import ProviderKind
from .base import AbstractEmbeddingProvider


PROVIDERS_MAPPING: Dict[ProviderKind, Type[AbstractEmbeddingProvider]] = {}


def register_provider(provider_kind: ProviderKind) -> Callable:

    def wrapper(klass: Type[AbstractEmbeddingProvider]) -> Type[AbstractEmbeddingProvider]:
        if provider_kind in PROVIDERS_MAPPING:
            raise ValueError(f'Provider {provider_kind} has been registered')
        klass.kind = provider_kind
        PROVIDERS_MAPPING[provider_kind] = klass
        return klass

    return wrapper
