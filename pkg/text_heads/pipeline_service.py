"""
Service component for dataset ingestion, tokenization, encoding and splitting
"""
from collections import Counter
from decimal import Decimal, ROUND_HALF_UP
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import ValidationError
import unicodedata

from .autograd import Rng
from .constants import (
    CLS_ID,
    MIN_SPLIT_SIZE,
    PAD_ID,
    RESERVED_TOKENS,
    TruncationStrategy,
    UNK_ID
)
from .exceptions import LabelError, ParameterError, ParseError, SizeError
from .schemes import Dataset, EncodedText, Example, SplitSpec


__all__ = ['PipelineService', 'Vocabulary']


logger = logging.getLogger(__name__)


ASCII_WHITESPACE = frozenset(' \t\n\r\x0b\x0c')
LABEL_VALUES = {'0': 0, '1': 1}


class Vocabulary:
    """
    Character-level token map, ids are dense from 0 and 0-2 are reserved for PAD, UNK and CLS
    """

    def __init__(self, tokens: Sequence[str]):
        if tuple(tokens[:len(RESERVED_TOKENS)]) != RESERVED_TOKENS:
            raise ValueError(f'Vocabulary must start with the reserved tokens {RESERVED_TOKENS}')
        self._tokens: List[str] = list(tokens)
        self._ids: Dict[str, int] = {}
        for idx, token in enumerate(self._tokens):
            if token in self._ids:
                raise ValueError(f'Token {token!r} appears twice in the vocabulary')
            self._ids[token] = idx

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> 'Vocabulary':
        """
        reserved tokens followed by the given ones
        """
        return cls(list(RESERVED_TOKENS) + list(tokens))

    @property
    def tokens(self) -> List[str]:
        return list(self._tokens)

    def lookup(self, token: str) -> int:
        return self._ids.get(token, UNK_ID)

    def token(self, token_id: int) -> str:
        return self._tokens[token_id]

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._ids

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self._tokens == other._tokens


class PipelineService:

    @classmethod
    def load_dataset(cls, path: Union[str, Path]) -> Dataset:
        """
        read `<label>\\t<text>` lines, blank lines skipped, file order kept
        :param path: UTF-8 dataset file
        :type path: Union[str, Path]
        :return: Dataset
        """
        try:
            content = Path(path).read_text(encoding='utf-8')
        except UnicodeDecodeError as e:
            raise ParseError(f'{path} is not valid UTF-8: {e}')

        result: Dataset = []
        for line_number, line in enumerate(content.split('\n'), start=1):
            line = line.rstrip('\r')
            if not line.strip():
                continue
            label_field, separator, text = line.partition('\t')
            if not separator:
                raise ParseError('expected `<label>\\t<text>`', line_number)
            if label_field not in LABEL_VALUES:
                raise LabelError(f'label must be 0 or 1, got {label_field!r}', line_number)
            try:
                result.append(Example(label=LABEL_VALUES[label_field], text=text))
            except ValidationError:
                raise ParseError('text is empty after trimming', line_number)
        logger.info(f'Loaded {len(result)} examples from {path}')
        return result

    @classmethod
    def write_dataset(cls, path: Union[str, Path], dataset: Dataset) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        lines = [f'{example.label}\t{example.text}\n' for example in dataset]
        target.write_text(''.join(lines), encoding='utf-8')

    @classmethod
    def tokenize(cls, text: str) -> List[str]:
        """
        one token per Unicode scalar value, ASCII whitespace and control characters dropped
        """
        return [
            char for char in text
            if char not in ASCII_WHITESPACE and unicodedata.category(char) != 'Cc'
        ]

    @classmethod
    def build_vocab(cls, dataset: Dataset, min_count: int = 1) -> Vocabulary:
        """
        ids 3, 4, ... by descending frequency, ties by first occurrence
        """
        counts: Counter = Counter()
        for example in dataset:
            counts.update(cls.tokenize(example.text))
        # Counter keeps first-occurrence order and sorted() is stable
        ranked = sorted(counts.items(), key=lambda item: -item[1])
        return Vocabulary.from_tokens(token for token, count in ranked if count >= min_count)

    @classmethod
    def encode_pad(
        cls,
        tokens: Sequence[str],
        max_len: int,
        vocab: Vocabulary,
        truncation: TruncationStrategy = TruncationStrategy.HEAD
    ) -> EncodedText:
        """
        [CLS] + ids(tokens) cut to max_len - 1 tokens and right-padded with PAD to max_len
        """
        if max_len < 2:
            raise ParameterError(f'max_len must be at least 2, got {max_len}')
        budget = max_len - 1
        kept = list(tokens)
        if len(kept) > budget:
            if truncation == TruncationStrategy.HEAD:
                kept = kept[:budget]
            elif truncation == TruncationStrategy.TAIL:
                kept = kept[len(kept) - budget:]
            else:
                head = budget // 4
                kept = kept[:head] + kept[len(kept) - (budget - head):]
        ids = [CLS_ID] + [vocab.lookup(token) for token in kept]
        length = len(ids)
        ids.extend([PAD_ID] * (max_len - length))
        return EncodedText(ids=ids, length=length)

    @classmethod
    def encode_dataset(
        cls,
        dataset: Dataset,
        max_len: int,
        vocab: Vocabulary,
        truncation: TruncationStrategy = TruncationStrategy.HEAD
    ) -> List[EncodedText]:
        return [cls.encode_pad(cls.tokenize(example.text), max_len, vocab, truncation) for example in dataset]

    @classmethod
    def split_dataset(
        cls,
        dataset: Dataset,
        spec: Optional[SplitSpec] = None
    ) -> Tuple[Dataset, Dataset, Dataset]:
        """
        seeded shuffle, then test and validation counts by round-half-up of N * fraction,
        train takes the remainder
        :return: (train, val, test)
        """
        if spec is None:
            spec = SplitSpec()
        total = len(dataset)
        if total < MIN_SPLIT_SIZE:
            raise SizeError(f'Dataset of {total} examples is too small to split, need at least {MIN_SPLIT_SIZE}')

        test_size = cls._round_half_up(total, spec.test_fraction)
        val_size = cls._round_half_up(total, spec.validation_fraction)
        shuffled = Rng(spec.seed).shuffle(dataset)
        test = shuffled[:test_size]
        val = shuffled[test_size:test_size + val_size]
        train = shuffled[test_size + val_size:]
        logger.info(f'Split {total} examples into {len(train)} / {len(val)} / {len(test)}')
        return train, val, test

    @staticmethod
    def _round_half_up(total: int, fraction: float) -> int:
        amount = Decimal(total) * Decimal(str(fraction))
        return int(amount.quantize(Decimal(1), rounding=ROUND_HALF_UP))
