"""
Service component reading key=value run configuration, merged with command-line overrides
"""
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import ValidationError

from .constants import HeadKind
from .exceptions import ConfigError
from .schemes import HEAD_CONFIG_KLS, HeadConfig, TrainConfig


__all__ = ['CONFIG_KEYS', 'ConfigService']


logger = logging.getLogger(__name__)


def _int_list(raw: str) -> List[int]:
    return [int(part) for part in raw.split(',') if part.strip()]


# flat key -> (section, field, converter); section is '' for TrainConfig itself
CONFIG_KEYS: Dict[str, Tuple[str, str, Callable[[str], Any]]] = {
    'batch_size': ('', 'batch_size', int),
    'epochs': ('', 'epochs', int),
    'learning_rate': ('', 'learning_rate', float),
    'seed': ('', 'seed', int),
    'max_len': ('', 'max_len', int),
    'truncation': ('', 'truncation', str),
    'provider': ('encoder', 'provider', str),
    'vectors': ('encoder', 'vectors', str),
    'dim': ('encoder', 'dim', int),
    'encoder_layers': ('encoder', 'layers', int),
    'encoder_heads': ('encoder', 'heads', int),
    'ff_dim': ('encoder', 'ff_dim', int),
    'encoder_dropout': ('encoder', 'dropout', float),
    'head': ('head', 'kind', str),
    'kernel_sizes': ('head', 'kernel_sizes', _int_list),
    'kernels_per_size': ('head', 'kernels_per_size', int),
    'head_layers': ('head', 'layers', int),
    'hidden': ('head', 'hidden', int),
    'channels': ('head', 'channels', int),
    'kernel': ('head', 'kernel', int),
    'pool_window': ('head', 'pool_window', int),
    'pool_stride': ('head', 'pool_stride', int),
    'dropout': ('head', 'dropout', float)
}


class ConfigService:

    @classmethod
    def parse_file(cls, path: Union[str, Path]) -> Dict[str, str]:
        """
        `key=value` per line, blank lines and lines starting with # ignored
        """
        try:
            content = Path(path).read_text(encoding='utf-8')
        except UnicodeDecodeError:
            raise ConfigError(f'Config {path} is not valid UTF-8')
        values = cls.parse_text(content, source=str(path))
        logger.info(f'Read {len(values)} config keys from {path}')
        return values

    @classmethod
    def parse_text(cls, content: str, source: str = '<config>') -> Dict[str, str]:
        result: Dict[str, str] = {}
        for line_number, line in enumerate(content.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            key, separator, value = line.partition('=')
            key, value = key.strip(), value.strip()
            if not separator:
                raise ConfigError(f'{source} line {line_number}: expected key=value')
            if key not in CONFIG_KEYS:
                raise ConfigError(f'{source} line {line_number}: unknown key {key}')
            result[key] = value
        return result

    @classmethod
    def merge(cls, file_values: Mapping[str, str], flag_values: Mapping[str, Optional[str]]) -> Dict[str, str]:
        """
        flags over file values, unset flags (None) leave the file value
        """
        merged = dict(file_values)
        for key, value in flag_values.items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f'Unknown config key {key}')
            if value is not None:
                merged[key] = value
        return merged

    @classmethod
    def train_config(cls, values: Mapping[str, str]) -> TrainConfig:
        sections: Dict[str, Dict[str, Any]] = {'': {}, 'encoder': {}}
        for key, raw in values.items():
            section, field, converter = CONFIG_KEYS[key]
            if section == 'head':
                continue
            sections[section][field] = cls._convert(key, raw, converter)

        head_kind = HeadKind.LINEAR
        if 'head' in values:
            head_kind = cls.head_kind(values['head'])
        try:
            return TrainConfig(
                **sections[''],
                encoder=sections['encoder'],
                head=cls.head_config(head_kind, values)
            )
        except ValidationError as e:
            raise ConfigError(cls._describe(e))

    @classmethod
    def head_config(cls, head_kind: HeadKind, values: Mapping[str, str]) -> HeadConfig:
        """
        head keys that the given kind has no field for are left out
        """
        head_kls = HEAD_CONFIG_KLS[head_kind]
        fields: Dict[str, Any] = {}
        for key, raw in values.items():
            section, field, converter = CONFIG_KEYS[key]
            if section != 'head' or field == 'kind' or field not in head_kls.model_fields:
                continue
            fields[field] = cls._convert(key, raw, converter)
        try:
            return head_kls(**fields)
        except ValidationError as e:
            raise ConfigError(cls._describe(e))

    @staticmethod
    def head_kind(raw: str) -> HeadKind:
        try:
            return HeadKind.from_value(raw.strip())
        except ValueError as e:
            raise ConfigError(str(e))

    @staticmethod
    def _convert(key: str, raw: str, converter: Callable[[str], Any]) -> Any:
        try:
            return converter(raw)
        except ValueError:
            raise ConfigError(f'Invalid value for {key}: {raw!r}')

    @staticmethod
    def _describe(error: ValidationError) -> str:
        first = error.errors()[0]
        location = '.'.join(str(part) for part in first['loc'])
        return f'Invalid configuration {location}: {first["msg"]}'
