"""
Constants components
"""
from enum import Enum, IntEnum


class HeadKind(Enum):
    """
    Classification heads stacked on top of the embedding provider
    | value   | display  | description                                        |
    |---------+----------+----------------------------------------------------|
    | linear  | Baseline | fully connected layer over the CLS position        |
    | textcnn | CNN      | 2/3/4-gram convolutions with max-over-time pooling |
    | bilstm  | RNN      | two-layer BiLSTM, last hidden state                |
    | rcnn    | RCNN     | BiLSTM outputs concatenated with embedding, pooled |
    | dpcnn   | DPCNN    | region embedding and pooled residual pyramid       |
    """
    LINEAR = 'linear'
    TEXTCNN = 'textcnn'
    BILSTM = 'bilstm'
    RCNN = 'rcnn'
    DPCNN = 'dpcnn'

    @property
    def display_name(self) -> str:
        return HEAD_DISPLAY_NAMES[self]

    @classmethod
    def from_value(cls, kind: str) -> 'HeadKind':
        for item in cls:
            if item.value == kind:
                return item
        raise ValueError(f'Invalid given head kind: {kind}')


HEAD_DISPLAY_NAMES = {
    HeadKind.LINEAR: 'Baseline',
    HeadKind.TEXTCNN: 'CNN',
    HeadKind.BILSTM: 'RNN',
    HeadKind.RCNN: 'RCNN',
    HeadKind.DPCNN: 'DPCNN'
}


class ProviderKind(Enum):
    """
    Embedding providers, all of them map ids[T] to [T, D]

    static is a frozen table read from a vector file,
    trainable is a learned token table plus learned positions,
    and transformer stacks self-attention layers on top of the trainable table
    """
    STATIC = 'static'
    TRAINABLE = 'trainable'
    TRANSFORMER = 'transformer'

    @classmethod
    def from_value(cls, kind: str) -> 'ProviderKind':
        for item in cls:
            if item.value == kind:
                return item
        raise ValueError(f'Invalid given provider kind: {kind}')


class ActivationKind(Enum):

    RELU = 'relu'
    TANH = 'tanh'
    SIGMOID = 'sigmoid'

    @classmethod
    def from_value(cls, kind: str) -> 'ActivationKind':
        for item in cls:
            if item.value == kind:
                return item
        raise ValueError(f'Invalid given activation kind: {kind}')


class Padding(Enum):
    """
    valid keeps only fully covered windows, Tout = T - w + 1
    same pads floor((w-1)/2) zeros on the left and ceil((w-1)/2) on the right, Tout = T
    """
    VALID = 'valid'
    SAME = 'same'


class Mode(Enum):

    TRAIN = 'train'
    EVAL = 'eval'


class TruncationStrategy(Enum):
    """
    Which part of an over-long text survives encode_pad
    * head: the first max_len - 1 tokens
    * tail: the last max_len - 1 tokens
    * head_tail: the first quarter of the budget and the last rest of it
    """
    HEAD = 'head'
    TAIL = 'tail'
    HEAD_TAIL = 'head_tail'

    @classmethod
    def from_value(cls, strategy: str) -> 'TruncationStrategy':
        for item in cls:
            if item.value == strategy:
                return item
        raise ValueError(f'Invalid given truncation strategy: {strategy}')


class ExitCode(IntEnum):

    SUCCESS = 0
    USAGE = 1
    DATA = 2
    NUMERIC = 3


# reserved vocabulary ids
PAD_ID = 0
UNK_ID = 1
CLS_ID = 2
PAD_TOKEN = '[PAD]'
UNK_TOKEN = '[UNK]'
CLS_TOKEN = '[CLS]'
RESERVED_TOKENS = (PAD_TOKEN, UNK_TOKEN, CLS_TOKEN)

NUM_CLASSES = 2
LABEL_LEGAL = 0
LABEL_ILLEGAL = 1

# whole-dataset fractions of the split
TEST_FRACTION = 0.20
VALIDATION_FRACTION = 0.16
TRAIN_FRACTION = 0.64
MIN_SPLIT_SIZE = 5

# classification head defaults
TEXTCNN_KERNEL_SIZES = (2, 3, 4)
TEXTCNN_KERNELS_PER_SIZE = 100
RECURRENT_LAYERS = 2
RECURRENT_HIDDEN = 768
DPCNN_CHANNELS = 250
DPCNN_KERNEL = 3
DPCNN_POOL_WINDOW = 3
DPCNN_POOL_STRIDE = 2
HEAD_DROPOUT = 0.1
FORGET_GATE_BIAS = 1.0

# encoder defaults, desk scale
ENCODER_LAYERS = 2
ENCODER_HEADS = 4
ENCODER_DIM = 128
ENCODER_DROPOUT = 0.1
LAYER_NORM_EPS = 1e-5
EMBEDDING_INIT_STD = 0.1
POSITIONAL_INIT_STD = 0.02

# training defaults
BATCH_SIZE = 64
EPOCHS = 10
LEARNING_RATE = 1e-3
MAX_LEN = 128
SEED = 42
BENCH_BATCH_SIZES = (64, 16)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

GRAD_CHECK_EPS = 1e-5
GRAD_CHECK_FLOOR = 1e-8
GRAD_CHECK_TOLERANCE = 1e-4

CHECKPOINT_MAGIC = 'TEXTHEADS-CKPT'
CHECKPOINT_VERSION = 'v1'
REPORT_COLUMNS = ('Training time', 'Batch Size', 'Val Acc')
SUMMARY_COLUMNS = ('Training time', 'Batch Size', 'Model')
OMITTED_TIME = '--:--:--'
