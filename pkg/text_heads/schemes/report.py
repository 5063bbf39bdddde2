"""
Scheme definition of metrics and run reports
"""
from typing import List

from pydantic import BaseModel, Field

from ..constants import GRAD_CHECK_TOLERANCE, HeadKind
from .config import TrainConfig


def format_wall_time(seconds: float) -> str:
    """
    zero-padded h:mm:ss, e.g. 00:04:02
    """
    total = int(round(seconds))
    hours, rest = divmod(total, 3600)
    minutes, secs = divmod(rest, 60)
    return f'{hours:02d}:{minutes:02d}:{secs:02d}'


class Metrics(BaseModel):

    loss: float = Field(..., ge=0.0)                  # mean cross-entropy over examples
    accuracy: float = Field(..., ge=0.0, le=1.0)      # correct / total


class EpochRecord(BaseModel):

    epoch: int      # 1-based
    train: Metrics
    val: Metrics


class RunReport(BaseModel):
    """
    per-epoch metrics of one training run plus its wall time
    """
    config: TrainConfig
    epochs: List[EpochRecord]
    steps: int                      # optimizer steps taken
    wall_time_seconds: float
    best_epoch: int
    best_val_accuracy: float

    @property
    def wall_time(self) -> str:
        return format_wall_time(self.wall_time_seconds)


class BenchRow(BaseModel):

    head: HeadKind
    batch_size: int
    wall_time_seconds: float
    best_val_accuracy: float

    @property
    def wall_time(self) -> str:
        return format_wall_time(self.wall_time_seconds)


class BenchReport(BaseModel):

    heads: List[HeadKind]
    batch_sizes: List[int]
    rows: List[BenchRow]


class GradCheckResult(BaseModel):

    name: str
    max_relative_error: float
    tolerance: float = GRAD_CHECK_TOLERANCE

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.tolerance
