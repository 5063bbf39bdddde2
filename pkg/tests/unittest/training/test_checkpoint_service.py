"""
Unit test for CheckpointService
"""
from pathlib import Path
import tempfile
from unittest import TestCase

import numpy as np

from text_heads.constants import HeadKind, ProviderKind, TruncationStrategy
from text_heads.exceptions import (
    CheckpointFormatError,
    CheckpointKindError,
    CheckpointShapeError,
    CheckpointTruncatedError,
    CheckpointVersionError
)
from text_heads.model import TextClassifier
from text_heads.pipeline_service import PipelineService
from text_heads.schemes import DPCNNHeadConfig, TextCNNHeadConfig
from text_heads.training import CheckpointService, TrainingService
from tests.utils import desk_config, separable_dataset


class CheckpointServiceTestCase(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / 'model.ckpt'
        self.dataset = separable_dataset(12, seed=1)
        self.vocab = PipelineService.build_vocab(self.dataset)
        config = desk_config(head=DPCNNHeadConfig(channels=4), truncation=TruncationStrategy.TAIL)
        self.model = TextClassifier.build(config, self.vocab)
        # move away from the seeded initialization
        for tensor in self.model.parameters().values():
            tensor.data = tensor.data + 0.01 * np.arange(tensor.size).reshape(tensor.shape) / 7.0
        CheckpointService.save(self.model, self.path)

    def tearDown(self):
        self.tmp.cleanup()

    def _lines(self):
        return self.path.read_text(encoding='utf-8').split('\n')

    def _write(self, lines):
        self.path.write_text('\n'.join(lines), encoding='utf-8')

    def test_header(self):
        lines = self._lines()
        self.assertEqual(lines[0], 'TEXTHEADS-CKPT v1')
        self.assertEqual(lines[1], 'arch=dpcnn')
        self.assertIn('head.kind="dpcnn"', lines)
        self.assertIn('encoder.dim=16', lines)
        self.assertIn('truncation="tail"', lines)
        self.assertTrue(any(line.startswith('vocab=["[PAD]", "[UNK]", "[CLS]"') for line in lines))

    def test_round_trip_is_exact(self):
        loaded = CheckpointService.load(self.path)
        self.assertEqual(loaded.head_kind, HeadKind.DPCNN)
        self.assertEqual(loaded.config, self.model.config)
        self.assertEqual(loaded.vocab, self.vocab)
        for name, tensor in self.model.state().items():
            np.testing.assert_array_equal(loaded.state()[name].data, tensor.data)
        self.assertEqual(
            TrainingService.evaluate(loaded, self.dataset),
            TrainingService.evaluate(self.model, self.dataset)
        )

    def test_frozen_static_table_round_trip(self):
        config = desk_config(provider=ProviderKind.STATIC, dim=4)
        config = config.model_copy(
            update={'encoder': config.encoder.model_copy(update={'vectors': 'tests/mock_data/vectors/vectors.txt'})}
        )
        model = TextClassifier.build(config, self.vocab)
        CheckpointService.save(model, self.path)
        loaded = CheckpointService.load(self.path)
        np.testing.assert_array_equal(
            loaded.state()['encoder.table'].data,
            model.state()['encoder.table'].data
        )
        self.assertEqual(loaded.parameter_count, model.parameter_count)

    def test_bad_magic(self):
        lines = self._lines()
        lines[0] = 'NOT-A-CKPT v1'
        self._write(lines)
        with self.assertRaises(CheckpointFormatError):
            CheckpointService.load(self.path)

    def test_version(self):
        lines = self._lines()
        lines[0] = 'TEXTHEADS-CKPT v2'
        self._write(lines)
        with self.assertRaises(CheckpointVersionError):
            CheckpointService.load(self.path)

    def test_truncated_values(self):
        lines = self._lines()[:-1]
        lines[-1] = lines[-1].split()[0]
        self._write(lines)
        with self.assertRaises(CheckpointTruncatedError):
            CheckpointService.load(self.path)

    def test_missing_tensors(self):
        self._write(self._lines()[:-4])
        with self.assertRaises(CheckpointTruncatedError):
            CheckpointService.load(self.path)

    def test_unterminated_header(self):
        self._write(self._lines()[:3])
        with self.assertRaises(CheckpointTruncatedError):
            CheckpointService.load(self.path)

    def test_shape_mismatch(self):
        lines = self._lines()
        index = lines.index('head.region.bias')
        lines[index + 1] = '5'
        lines[index + 2] = ' '.join(['0'] * 5)
        self._write(lines)
        with self.assertRaises(CheckpointShapeError):
            CheckpointService.load(self.path)

    def test_expected_kind(self):
        with self.assertRaises(CheckpointKindError):
            CheckpointService.load(self.path, expected_kind=HeadKind.BILSTM)
        self.assertEqual(CheckpointService.load(self.path, expected_kind=HeadKind.DPCNN).head_kind, HeadKind.DPCNN)

    def test_arch_disagrees_with_config(self):
        lines = self._lines()
        lines[1] = 'arch=textcnn'
        self._write(lines)
        with self.assertRaises(CheckpointFormatError):
            CheckpointService.load(self.path)

    def test_other_head_tensors_do_not_fit(self):
        other = TextClassifier.build(desk_config(head=TextCNNHeadConfig(kernels_per_size=2)), self.vocab)
        other_path = Path(self.tmp.name) / 'other.ckpt'
        CheckpointService.save(other, other_path)
        header = self._lines()
        body = other_path.read_text(encoding='utf-8').split('\n')
        blank = header.index('')
        self._write(header[:blank + 1] + body[body.index('') + 1:])
        with self.assertRaises(CheckpointShapeError):
            CheckpointService.load(self.path)
