"""
Optimization, evaluation, benchmark protocol and checkpoints
"""
from .checkpoint_service import CheckpointService  # NOQA
from .optimizer import AdamState, adam_step  # NOQA
from .training_service import TrainingService  # NOQA
