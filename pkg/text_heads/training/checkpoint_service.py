"""
Service component to persist trained classifiers in a line-oriented text format
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from ..constants import CHECKPOINT_MAGIC, CHECKPOINT_VERSION, HeadKind
from ..exceptions import (
    CheckpointFormatError,
    CheckpointKindError,
    CheckpointShapeError,
    CheckpointTruncatedError,
    CheckpointVersionError
)
from ..model import TextClassifier
from ..pipeline_service import Vocabulary
from ..schemes import TrainConfig


__all__ = ['CheckpointService']


logger = logging.getLogger(__name__)


ARCH_KEY = 'arch'
VOCAB_KEY = 'vocab'


def _flatten(values: Dict[str, Any], prefix: str = '') -> Iterator[Tuple[str, Any]]:
    for key, value in values.items():
        if isinstance(value, dict):
            yield from _flatten(value, prefix=f'{prefix}{key}.')
        else:
            yield f'{prefix}{key}', value


def _unflatten(pairs: Dict[str, Any]) -> Dict[str, Any]:
    result: Dict[str, Any] = {}
    for key, value in pairs.items():
        node = result
        *parents, leaf = key.split('.')
        for parent in parents:
            node = node.setdefault(parent, {})
        node[leaf] = value
    return result


class CheckpointService:
    """
    header: `TEXTHEADS-CKPT v1`, `arch=<head kind>`, one `key=<json>` line per config field,
    `vocab=<json list>`, a blank line;
    then per tensor a name line, a shape line and one line of 17-significant-digit values
    """

    @classmethod
    def save(cls, model: TextClassifier, path: Union[str, Path]) -> None:
        lines = [f'{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}', f'{ARCH_KEY}={model.head_kind.value}']
        for key, value in _flatten(model.config.model_dump(mode='json')):
            lines.append(f'{key}={json.dumps(value, ensure_ascii=False)}')
        lines.append(f'{VOCAB_KEY}={json.dumps(model.vocab.tokens, ensure_ascii=False)}')
        lines.append('')
        for name, tensor in model.state().items():
            lines.append(name)
            lines.append(' '.join(str(size) for size in tensor.shape))
            lines.append(' '.join(format(value, '.17g') for value in tensor.data.reshape(-1).tolist()))

        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        logger.info(f'Saved {model.head_kind.display_name} checkpoint to {path}')

    @classmethod
    def load(cls, path: Union[str, Path], expected_kind: Optional[HeadKind] = None) -> TextClassifier:
        """
        :param expected_kind: head the caller needs, a different recorded head raises CheckpointKindError
        """
        try:
            content = Path(path).read_text(encoding='utf-8')
        except UnicodeDecodeError:
            raise CheckpointFormatError(f'{path} is not a UTF-8 checkpoint')
        lines = content.split('\n')
        if lines and lines[-1] == '':
            lines.pop()

        head_kind, config, vocab, body_start = cls._read_header(lines)
        if expected_kind is not None and head_kind != expected_kind:
            raise CheckpointKindError(
                f'Checkpoint holds a {head_kind.value} head, expected {expected_kind.value}'
            )

        model = TextClassifier.build(config, vocab, read_vectors=False)
        cls._read_tensors(lines[body_start:], model)
        logger.info(f'Loaded {head_kind.display_name} checkpoint from {path}')
        return model

    @classmethod
    def _read_header(cls, lines: List[str]) -> Tuple[HeadKind, TrainConfig, Vocabulary, int]:
        if not lines:
            raise CheckpointTruncatedError('Checkpoint is empty')
        magic, _, version = lines[0].partition(' ')
        if magic != CHECKPOINT_MAGIC:
            raise CheckpointFormatError(f'Not a checkpoint, first line is {lines[0][:40]!r}')
        if version != CHECKPOINT_VERSION:
            raise CheckpointVersionError(f'Unsupported checkpoint version {version!r}, expected {CHECKPOINT_VERSION}')

        pairs: Dict[str, Any] = {}
        blank_at = None
        for idx in range(1, len(lines)):
            line = lines[idx]
            if line == '':
                blank_at = idx
                break
            key, separator, raw_value = line.partition('=')
            if not separator:
                raise CheckpointFormatError(f'Header line {idx + 1} is not key=value')
            try:
                pairs[key] = json.loads(raw_value) if key != ARCH_KEY else raw_value
            except json.JSONDecodeError:
                raise CheckpointFormatError(f'Header line {idx + 1} holds an invalid value for {key}')
        if blank_at is None:
            raise CheckpointTruncatedError('Checkpoint header is not terminated')

        if ARCH_KEY not in pairs or VOCAB_KEY not in pairs:
            raise CheckpointFormatError('Checkpoint header misses arch or vocab')
        try:
            head_kind = HeadKind.from_value(pairs.pop(ARCH_KEY))
        except ValueError as e:
            raise CheckpointFormatError(str(e))
        try:
            vocab = Vocabulary(pairs.pop(VOCAB_KEY))
        except (TypeError, ValueError) as e:
            raise CheckpointFormatError(f'Invalid vocabulary: {e}')
        try:
            config = TrainConfig.model_validate(_unflatten(pairs))
        except ValidationError as e:
            raise CheckpointFormatError(f'Invalid configuration: {e.errors()[0]["msg"]}')
        if config.head_kind != head_kind:
            raise CheckpointFormatError(
                f'arch={head_kind.value} disagrees with the configured {config.head_kind.value} head'
            )
        return head_kind, config, vocab, blank_at + 1

    @classmethod
    def _read_tensors(cls, lines: List[str], model: TextClassifier) -> None:
        state = model.state()
        seen = set()
        for offset in range(0, len(lines), 3):
            block = lines[offset:offset + 3]
            if len(block) < 3:
                raise CheckpointTruncatedError(f'Tensor {block[0]!r} is incomplete')
            name, shape_line, values_line = block
            if name not in state:
                raise CheckpointShapeError(f'Unknown tensor {name} for a {model.head_kind.value} classifier')
            try:
                shape = tuple(int(size) for size in shape_line.split())
                values = np.array([float(value) for value in values_line.split()], dtype=np.float64)
            except ValueError:
                raise CheckpointFormatError(f'Tensor {name} holds a non-numeric shape or value')

            tensor = state[name]
            if shape != tensor.shape:
                raise CheckpointShapeError(f'Tensor {name} has shape {shape}, the model expects {tensor.shape}')
            expected = int(np.prod(shape))
            if values.size != expected:
                if offset + 3 >= len(lines):
                    raise CheckpointTruncatedError(f'Tensor {name} has {values.size} of {expected} values')
                raise CheckpointFormatError(f'Tensor {name} has {values.size} values, expected {expected}')
            tensor.data = values.reshape(shape)
            seen.add(name)

        missing = [name for name in state if name not in seen]
        if missing:
            raise CheckpointTruncatedError(f'Checkpoint misses {len(missing)} tensors, first {missing[0]}')
