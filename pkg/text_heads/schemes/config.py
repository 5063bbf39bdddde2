"""
Scheme definition of run configuration
"""
from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from ..constants import (
    BATCH_SIZE,
    DPCNN_CHANNELS,
    DPCNN_KERNEL,
    DPCNN_POOL_STRIDE,
    DPCNN_POOL_WINDOW,
    ENCODER_DIM,
    ENCODER_DROPOUT,
    ENCODER_HEADS,
    ENCODER_LAYERS,
    EPOCHS,
    HEAD_DROPOUT,
    HeadKind,
    LEARNING_RATE,
    MAX_LEN,
    ProviderKind,
    RECURRENT_HIDDEN,
    RECURRENT_LAYERS,
    SEED,
    TEST_FRACTION,
    TEXTCNN_KERNEL_SIZES,
    TEXTCNN_KERNELS_PER_SIZE,
    TRAIN_FRACTION,
    TruncationStrategy,
    VALIDATION_FRACTION
)


class EncoderConfig(BaseModel):
    """
    Embedding provider standing in for the pretrained encoder
    """
    provider: ProviderKind = ProviderKind.TRANSFORMER
    layers: int = Field(ENCODER_LAYERS, ge=0)
    heads: int = Field(ENCODER_HEADS, ge=1)
    dim: int = Field(ENCODER_DIM, ge=1)
    ff_dim: Optional[int] = Field(None, ge=1)      # 4 * dim when unset
    max_len: int = Field(MAX_LEN, ge=2)
    dropout: float = Field(ENCODER_DROPOUT, ge=0.0, lt=1.0)
    vectors: Optional[str] = None                  # static-vector file, static provider only

    @model_validator(mode='after')
    def check_dimensions(self) -> 'EncoderConfig':
        if self.dim % self.heads != 0:
            raise ValueError(f'dim {self.dim} is not divisible by {self.heads} heads')
        return self

    @property
    def feed_forward_dim(self) -> int:
        return self.ff_dim if self.ff_dim is not None else 4 * self.dim


class LinearHeadConfig(BaseModel):

    kind: Literal['linear'] = 'linear'


class TextCNNHeadConfig(BaseModel):

    kind: Literal['textcnn'] = 'textcnn'
    kernel_sizes: List[Annotated[int, Field(ge=1)]] = Field(
        default_factory=lambda: list(TEXTCNN_KERNEL_SIZES),
        min_length=1
    )
    kernels_per_size: int = Field(TEXTCNN_KERNELS_PER_SIZE, ge=1)
    dropout: float = Field(HEAD_DROPOUT, ge=0.0, lt=1.0)

    @field_validator('kernel_sizes')
    @classmethod
    def check_unique_sizes(cls, sizes: List[int]) -> List[int]:
        if len(set(sizes)) != len(sizes):
            raise ValueError(f'kernel sizes must be distinct, got {sizes}')
        return sizes


class BiLSTMHeadConfig(BaseModel):

    kind: Literal['bilstm'] = 'bilstm'
    layers: int = Field(RECURRENT_LAYERS, ge=1)
    hidden: int = Field(RECURRENT_HIDDEN, ge=1)
    dropout: float = Field(HEAD_DROPOUT, ge=0.0, lt=1.0)


class RCNNHeadConfig(BaseModel):

    kind: Literal['rcnn'] = 'rcnn'
    layers: int = Field(RECURRENT_LAYERS, ge=1)
    hidden: int = Field(RECURRENT_HIDDEN, ge=1)
    dropout: float = Field(HEAD_DROPOUT, ge=0.0, lt=1.0)


class DPCNNHeadConfig(BaseModel):

    kind: Literal['dpcnn'] = 'dpcnn'
    channels: int = Field(DPCNN_CHANNELS, ge=1)
    kernel: int = Field(DPCNN_KERNEL, ge=1)
    pool_window: int = Field(DPCNN_POOL_WINDOW, ge=2)
    pool_stride: int = Field(DPCNN_POOL_STRIDE, ge=1)
    dropout: float = Field(HEAD_DROPOUT, ge=0.0, lt=1.0)


HeadConfig = Annotated[
    Union[LinearHeadConfig, TextCNNHeadConfig, BiLSTMHeadConfig, RCNNHeadConfig, DPCNNHeadConfig],
    Field(discriminator='kind')
]

HEAD_CONFIG_KLS = {
    HeadKind.LINEAR: LinearHeadConfig,
    HeadKind.TEXTCNN: TextCNNHeadConfig,
    HeadKind.BILSTM: BiLSTMHeadConfig,
    HeadKind.RCNN: RCNNHeadConfig,
    HeadKind.DPCNN: DPCNNHeadConfig
}


def head_kind_of(config: BaseModel) -> HeadKind:
    return HeadKind.from_value(getattr(config, 'kind'))


class TrainConfig(BaseModel):
    """
    One training run, defaults follow the 10-epoch, batch-64 protocol
    learning rate 1e-3 suits from-scratch desk models, 2e-5 is the fine-tuning regime
    """
    batch_size: int = Field(BATCH_SIZE, ge=1)
    epochs: int = Field(EPOCHS, ge=1)
    learning_rate: float = Field(LEARNING_RATE, gt=0.0)
    seed: int = SEED
    max_len: int = Field(MAX_LEN, ge=2)
    truncation: TruncationStrategy = TruncationStrategy.HEAD
    head: HeadConfig = Field(default_factory=LinearHeadConfig)
    encoder: EncoderConfig = Field(default_factory=EncoderConfig)

    @model_validator(mode='after')
    def sync_max_len(self) -> 'TrainConfig':
        if self.encoder.max_len != self.max_len:
            self.encoder = self.encoder.model_copy(update={'max_len': self.max_len})
        return self

    @property
    def head_kind(self) -> HeadKind:
        return head_kind_of(self.head)


class SplitSpec(BaseModel):
    """
    fractions of the whole dataset
    """
    test_fraction: float = Field(TEST_FRACTION, ge=0.0, le=1.0)
    validation_fraction: float = Field(VALIDATION_FRACTION, ge=0.0, le=1.0)
    train_fraction: float = Field(TRAIN_FRACTION, ge=0.0, le=1.0)
    seed: int = SEED

    @model_validator(mode='after')
    def check_fractions(self) -> 'SplitSpec':
        fractions = self.test_fraction + self.validation_fraction + self.train_fraction
        if abs(fractions - 1.0) > 1e-9:
            raise ValueError(f'Split fractions sum to {fractions}, not 1')
        return self
