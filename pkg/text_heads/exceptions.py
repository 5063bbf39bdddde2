"""
Errors raised across the project
"""
from typing import Optional


class TextHeadsError(Exception):

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class ShapeError(TextHeadsError):
    pass


class SequenceTooShortError(ShapeError):
    pass


class ParameterError(TextHeadsError):
    pass


class GraphError(TextHeadsError):
    pass


class NumericError(TextHeadsError):
    pass


class VocabularyError(TextHeadsError):
    pass


class SizeError(TextHeadsError):
    pass


class ConfigError(TextHeadsError):
    pass


class LineError(TextHeadsError):
    """
    error located at a 1-based line of an input file
    """

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f'line {line_number}: {message}'
        super().__init__(message)


class ParseError(LineError):
    pass


class LabelError(LineError):
    pass


class FormatError(LineError):
    pass


class CheckpointError(TextHeadsError):
    pass


class CheckpointFormatError(CheckpointError):
    pass


class CheckpointVersionError(CheckpointError):
    pass


class CheckpointTruncatedError(CheckpointError):
    pass


class CheckpointShapeError(CheckpointError):
    pass


class CheckpointKindError(CheckpointError):
    pass
