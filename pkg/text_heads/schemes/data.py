"""
Scheme definition of dataset records
"""
from typing import List

from pydantic import BaseModel, ConfigDict, field_validator

from ..constants import LABEL_ILLEGAL, LABEL_LEGAL


class Example(BaseModel):
    """
    One labeled text, 1 describes illegal behavior and 0 does not
    """
    model_config = ConfigDict(frozen=True)

    label: int
    text: str

    @field_validator('label')
    @classmethod
    def check_label(cls, value: int) -> int:
        if value not in (LABEL_LEGAL, LABEL_ILLEGAL):
            raise ValueError(f'Invalid given label: {value}')
        return value

    @field_validator('text')
    @classmethod
    def check_text(cls, value: str) -> str:
        if not value.strip():
            raise ValueError('Text is empty after trimming')
        return value


# ordered, load order until an explicit seeded shuffle
Dataset = List[Example]


class EncodedText(BaseModel):

    ids: List[int]      # [CLS] + token ids, right-padded to max_len
    length: int         # true length including CLS, positions from here on are padding


class VectorCoverage(BaseModel):
    """
    how many vocabulary tokens a static-vector file covered
    """
    dim: int
    found: int
    missing: List[str]
