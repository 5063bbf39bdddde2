"""
Service component for training, evaluation and the benchmark protocol
"""
from concurrent.futures import ProcessPoolExecutor
import logging
import math
import time
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..autograd import Rng, backward, softmax_cross_entropy, stack
from ..constants import (
    BENCH_BATCH_SIZES,
    Mode,
    OMITTED_TIME,
    REPORT_COLUMNS,
    SUMMARY_COLUMNS
)
from ..exceptions import SizeError
from ..model import DROPOUT_STREAM, SHUFFLE_STREAM, TextClassifier
from ..pipeline_service import PipelineService, Vocabulary
from ..schemes import (
    BenchReport,
    BenchRow,
    Dataset,
    EncodedText,
    EpochRecord,
    HeadConfig,
    Metrics,
    RunReport,
    TrainConfig,
    head_kind_of
)
from .optimizer import AdamState, adam_step


__all__ = ['TrainingService']


logger = logging.getLogger(__name__)


def _bench_cell(
    train_set: Dataset,
    val_set: Dataset,
    config: TrainConfig,
    vocab: Optional[Vocabulary]
) -> BenchRow:
    _, report = TrainingService.train(train_set, val_set, config, vocab=vocab)
    return BenchRow(
        head=config.head_kind,
        batch_size=config.batch_size,
        wall_time_seconds=report.wall_time_seconds,
        best_val_accuracy=report.best_val_accuracy
    )


class TrainingService:

    @classmethod
    def train(
        cls,
        train_set: Dataset,
        val_set: Dataset,
        config: TrainConfig,
        vocab: Optional[Vocabulary] = None
    ) -> Tuple[TextClassifier, RunReport]:
        """
        train from fresh parameters, keeping the epoch of best validation accuracy
        :param vocab: built from train_set when omitted
        :return: (model at its best epoch, report)
        """
        if not train_set:
            raise SizeError('Training split is empty')
        if not val_set:
            raise SizeError('Validation split is empty')
        if vocab is None:
            vocab = PipelineService.build_vocab(train_set)

        model = TextClassifier.build(config, vocab)
        logger.info(
            f'Training {config.head_kind.display_name} on {len(train_set)} examples, '
            f'{model.parameter_count} parameters'
        )
        train_encoded = PipelineService.encode_dataset(train_set, config.max_len, vocab, config.truncation)
        train_labels = [example.label for example in train_set]
        val_encoded = PipelineService.encode_dataset(val_set, config.max_len, vocab, config.truncation)
        val_labels = [example.label for example in val_set]

        state = AdamState()
        shuffle_rng = Rng(config.seed).spawn(SHUFFLE_STREAM)
        dropout_rng = Rng(config.seed).spawn(DROPOUT_STREAM)
        records: List[EpochRecord] = []
        steps = 0
        best_epoch, best_accuracy = 0, -1.0
        best_snapshot: Dict[str, np.ndarray] = model.snapshot()

        start = time.monotonic()
        for epoch in range(1, config.epochs + 1):
            steps += cls.run_epoch(
                model, train_encoded, train_labels, state,
                shuffle_rng.spawn(epoch), dropout_rng.spawn(epoch)
            )
            record = EpochRecord(
                epoch=epoch,
                train=cls.evaluate_encoded(model, train_encoded, train_labels),
                val=cls.evaluate_encoded(model, val_encoded, val_labels)
            )
            records.append(record)
            logger.info(
                f'Epoch {epoch}/{config.epochs}: train loss {record.train.loss:.6f}, '
                f'train acc {record.train.accuracy:.4f}, val loss {record.val.loss:.6f}, '
                f'val acc {record.val.accuracy:.4f}'
            )
            if record.val.accuracy > best_accuracy:
                best_epoch, best_accuracy = epoch, record.val.accuracy
                best_snapshot = model.snapshot()
        wall_time = time.monotonic() - start

        model.restore(best_snapshot)
        report = RunReport(
            config=config,
            epochs=records,
            steps=steps,
            wall_time_seconds=wall_time,
            best_epoch=best_epoch,
            best_val_accuracy=best_accuracy
        )
        logger.info(f'Best val acc {best_accuracy:.4f} at epoch {best_epoch}, wall time {report.wall_time}')
        return model, report

    @classmethod
    def run_epoch(
        cls,
        model: TextClassifier,
        encoded: Sequence[EncodedText],
        labels: Sequence[int],
        state: AdamState,
        shuffle_rng: Rng,
        dropout_rng: Rng
    ) -> int:
        """
        one shuffled pass in fixed-size batches, the last partial batch kept
        :return: optimizer steps taken, ceil(N / batch_size)
        """
        batch_size = model.config.batch_size
        order = shuffle_rng.permutation(len(encoded))
        steps = 0
        for offset in range(0, len(order), batch_size):
            batch = order[offset:offset + batch_size]
            logits = stack([
                model.forward(encoded[i].ids, length=encoded[i].length, mode=Mode.TRAIN, rng=dropout_rng)
                for i in batch
            ])
            loss = softmax_cross_entropy(logits, [labels[i] for i in batch])
            backward(loss)
            adam_step(model.parameters(), state, model.config.learning_rate)
            steps += 1
        return steps

    @classmethod
    def evaluate(cls, model: TextClassifier, dataset: Dataset) -> Metrics:
        """
        eval-mode mean cross-entropy and accuracy
        """
        if not dataset:
            raise SizeError('Cannot evaluate an empty split')
        config = model.config
        encoded = PipelineService.encode_dataset(dataset, config.max_len, model.vocab, config.truncation)
        return cls.evaluate_encoded(model, encoded, [example.label for example in dataset])

    @classmethod
    def evaluate_encoded(
        cls,
        model: TextClassifier,
        encoded: Sequence[EncodedText],
        labels: Sequence[int]
    ) -> Metrics:
        if not encoded:
            raise SizeError('Cannot evaluate an empty split')
        logits = np.stack([model.logits(item) for item in encoded])
        shifted = logits - logits.max(axis=1, keepdims=True)
        log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        targets = np.asarray(labels, dtype=np.int64)
        rows = np.arange(len(targets))
        loss = float(-log_probs[rows, targets].mean())
        # argmax picks class 0 on ties
        accuracy = float((np.argmax(logits, axis=1) == targets).mean())
        return Metrics(loss=max(loss, 0.0), accuracy=accuracy)

    @classmethod
    def bench(
        cls,
        head_configs: Sequence[HeadConfig],
        train_set: Dataset,
        val_set: Dataset,
        config: TrainConfig,
        batch_sizes: Sequence[int] = BENCH_BATCH_SIZES,
        jobs: int = 1
    ) -> BenchReport:
        """
        one training run per (head, batch size), rows in that order
        :param jobs: more than 1 runs the cells in separate processes
        """
        vocab = PipelineService.build_vocab(train_set)
        cells = [
            config.model_copy(update={'head': head_config, 'batch_size': batch_size})
            for head_config in head_configs
            for batch_size in batch_sizes
        ]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                futures = [executor.submit(_bench_cell, train_set, val_set, cell, vocab) for cell in cells]
                rows = [future.result() for future in futures]
        else:
            rows = []
            for cell in cells:
                logger.info(f'Bench cell {cell.head_kind.display_name}, batch size {cell.batch_size}')
                rows.append(_bench_cell(train_set, val_set, cell, vocab))
        return BenchReport(
            heads=[head_kind_of(head_config) for head_config in head_configs],
            batch_sizes=list(batch_sizes),
            rows=rows
        )

    @classmethod
    def render_run_report(cls, report: RunReport, include_time: bool = True) -> str:
        """
        the Training time / Batch Size / Val Acc row, then per-epoch metrics
        """
        wall_time = report.wall_time if include_time else OMITTED_TIME
        lines = [
            '\t'.join(REPORT_COLUMNS),
            f'{wall_time}\t{report.config.batch_size}\t{cls._percent(report.best_val_accuracy)}',
            '',
            'epoch\ttrain_loss\ttrain_acc\tval_loss\tval_acc'
        ]
        for record in report.epochs:
            lines.append(
                f'{record.epoch}\t{record.train.loss:.6f}\t{record.train.accuracy:.6f}'
                f'\t{record.val.loss:.6f}\t{record.val.accuracy:.6f}'
            )
        return '\n'.join(lines) + '\n'

    @classmethod
    def render_bench_report(cls, report: BenchReport, include_time: bool = True) -> str:
        """
        one table per head, then a cross-model timing summary at the first batch size
        """
        blocks = []
        for head in report.heads:
            lines = [head.display_name, '\t'.join(REPORT_COLUMNS)]
            for row in report.rows:
                if row.head != head:
                    continue
                wall_time = row.wall_time if include_time else OMITTED_TIME
                lines.append(f'{wall_time}\t{row.batch_size}\t{cls._percent(row.best_val_accuracy)}')
            blocks.append('\n'.join(lines))

        if report.batch_sizes:
            summary_batch = report.batch_sizes[0]
            lines = ['Summary', '\t'.join(SUMMARY_COLUMNS)]
            for row in report.rows:
                if row.batch_size != summary_batch:
                    continue
                wall_time = row.wall_time if include_time else OMITTED_TIME
                lines.append(f'{wall_time}\t{row.batch_size}\t{row.head.display_name}')
            blocks.append('\n'.join(lines))
        return '\n\n'.join(blocks) + '\n'

    @staticmethod
    def _percent(accuracy: float) -> str:
        return f'{accuracy * 100:.2f}%'

    @staticmethod
    def expected_steps(size: int, batch_size: int, epochs: int) -> int:
        return epochs * math.ceil(size / batch_size)
