"""
Static-vector file reader
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..autograd import Rng
from ..constants import EMBEDDING_INIT_STD, PAD_ID
from ..exceptions import FormatError, ParseError
from ..pipeline_service import Vocabulary
from ..schemes import VectorCoverage


__all__ = ['load_static_vectors']


logger = logging.getLogger(__name__)


def _is_header(fields: List[str]) -> bool:
    # word2vec-style `<count> <dim>` first line
    return len(fields) == 2 and all(field.isdigit() for field in fields)


def load_static_vectors(
    path: Union[str, Path],
    vocab: Vocabulary,
    rng: Optional[Rng] = None
) -> Tuple[np.ndarray, VectorCoverage]:
    """
    read `<token> <v1> ... <vD>` lines into a [V, D] table

    vocabulary tokens absent from the file keep a random normal row,
    the PAD row is zero whatever the file says
    :return: (table, coverage)
    """
    try:
        content = Path(path).read_text(encoding='utf-8')
    except UnicodeDecodeError as e:
        raise ParseError(f'{path} is not valid UTF-8: {e}')

    vectors: Dict[str, np.ndarray] = {}
    dim: Optional[int] = None
    for line_number, line in enumerate(content.split('\n'), start=1):
        fields = line.split()
        if not fields:
            continue
        if line_number == 1 and _is_header(fields):
            continue
        token, values = fields[0], fields[1:]
        if not values:
            raise FormatError(f'token {token!r} has no values', line_number)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise FormatError(f'expected {dim} values, got {len(values)}', line_number)
        try:
            row = np.array([float(value) for value in values], dtype=np.float64)
        except ValueError:
            raise FormatError('values must be decimal numbers', line_number)
        if not np.all(np.isfinite(row)):
            raise FormatError('values must be finite', line_number)
        vectors.setdefault(token, row)

    if dim is None:
        raise FormatError(f'{path} holds no vectors')

    if rng is None:
        rng = Rng(0)
    table = rng.normal((len(vocab), dim), std=EMBEDDING_INIT_STD)
    missing = []
    for token_id, token in enumerate(vocab.tokens):
        if token_id == PAD_ID:
            continue
        if token in vectors:
            table[token_id] = vectors[token]
        else:
            missing.append(token)
    table[PAD_ID] = 0.0

    coverage = VectorCoverage(dim=dim, found=len(vocab) - 1 - len(missing), missing=missing)
    if missing:
        logger.warning(f'{len(missing)} of {len(vocab) - 1} vocabulary tokens have no vector in {path}')
    return table, coverage
