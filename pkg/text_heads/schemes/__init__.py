"""
Scheme definitions of the cross-project objects
"""
from .config import (  # NOQA
    BiLSTMHeadConfig,
    DPCNNHeadConfig,
    EncoderConfig,
    HEAD_CONFIG_KLS,
    HeadConfig,
    LinearHeadConfig,
    RCNNHeadConfig,
    SplitSpec,
    TextCNNHeadConfig,
    TrainConfig,
    head_kind_of
)
from .data import Dataset, EncodedText, Example, VectorCoverage  # NOQA
from .report import (  # NOQA
    BenchReport,
    BenchRow,
    EpochRecord,
    GradCheckResult,
    Metrics,
    RunReport,
    format_wall_time
)
