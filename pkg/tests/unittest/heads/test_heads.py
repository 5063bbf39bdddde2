"""
Unit test for the classification heads
"""
from unittest import TestCase

import numpy as np

from text_heads.autograd import Rng, Tensor
from text_heads.constants import HeadKind, Mode
from text_heads.exceptions import SequenceTooShortError, ShapeError
from text_heads.heads import (
    BiLSTMHead,
    DPCNNHead,
    LinearHead,
    RCNNHead,
    TextCNNHead,
    build_head,
    get_head_kls
)
from text_heads.schemes import (
    BiLSTMHeadConfig,
    DPCNNHeadConfig,
    LinearHeadConfig,
    RCNNHeadConfig,
    TextCNNHeadConfig
)


DIM = 6


def _emb(length: int, seed: int = 0) -> Tensor:
    return Tensor(Rng(seed).normal((length, DIM)))


class RegistryTestCase(TestCase):

    def test_every_kind_is_registered(self):
        expected = {
            HeadKind.LINEAR: LinearHead,
            HeadKind.TEXTCNN: TextCNNHead,
            HeadKind.BILSTM: BiLSTMHead,
            HeadKind.RCNN: RCNNHead,
            HeadKind.DPCNN: DPCNNHead
        }
        for kind, kls in expected.items():
            self.assertIs(get_head_kls(kind), kls)
            self.assertEqual(kls.kind, kind)

    def test_every_head_outputs_two_logits(self):
        configs = [
            LinearHeadConfig(),
            TextCNNHeadConfig(kernels_per_size=3),
            BiLSTMHeadConfig(hidden=4),
            RCNNHeadConfig(hidden=4),
            DPCNNHeadConfig(channels=5)
        ]
        for config in configs:
            head = build_head(config, DIM, Rng(1))
            self.assertEqual(head.forward(_emb(10), length=7).shape, (2,))

    def test_wrong_width(self):
        head = build_head(LinearHeadConfig(), DIM, Rng(1))
        with self.assertRaises(ShapeError):
            head.forward(Tensor(np.zeros((4, DIM + 1))))
        with self.assertRaises(ShapeError):
            head.forward(_emb(4), length=5)


class LinearHeadTestCase(TestCase):

    def test_parameter_count(self):
        self.assertEqual(build_head(LinearHeadConfig(), 128, Rng(0)).parameter_count, 2 * 128 + 2)

    def test_depends_on_first_position_only(self):
        head = build_head(LinearHeadConfig(), DIM, Rng(2))
        emb = _emb(5, seed=3)
        changed = emb.data.copy()
        changed[1:] = Rng(4).normal((4, DIM))
        np.testing.assert_array_equal(head.forward(emb).data, head.forward(Tensor(changed)).data)
        changed[0] += 1.0
        self.assertFalse(np.allclose(head.forward(emb).data, head.forward(Tensor(changed)).data))

    def test_logits_are_affine_in_cls(self):
        head = build_head(LinearHeadConfig(), DIM, Rng(5))
        emb = _emb(3, seed=6)
        expected = emb.data[0] @ head.classifier_weights.data + head.classifier_bias.data
        np.testing.assert_allclose(head.forward(emb).data, expected, atol=1e-12)


class TextCNNHeadTestCase(TestCase):

    def test_parameter_count(self):
        head = build_head(TextCNNHeadConfig(), 128, Rng(0))
        convolutions = sum(100 * width * 128 + 100 for width in (2, 3, 4))
        self.assertEqual(head.parameter_count, convolutions + 300 * 2 + 2)

    def test_minimum_length(self):
        head = build_head(TextCNNHeadConfig(kernel_sizes=[2, 3, 4], kernels_per_size=2), DIM, Rng(1))
        self.assertEqual(head.min_length, 4)
        head.forward(_emb(4))
        with self.assertRaises(SequenceTooShortError):
            head.forward(_emb(3))

    def test_features_are_non_negative(self):
        head = build_head(TextCNNHeadConfig(kernels_per_size=3), DIM, Rng(2))
        features = head._features(_emb(8, seed=7), 8, Mode.EVAL, None)
        self.assertEqual(features.shape, (9,))
        self.assertTrue(np.all(features.data >= 0.0))


class RecurrentHeadTestCase(TestCase):

    def test_parameter_names(self):
        head = build_head(BiLSTMHeadConfig(hidden=3, layers=2), DIM, Rng(0))
        names = list(head.parameters())
        self.assertIn('lstm.layer0.forward.input_weights', names)
        self.assertIn('lstm.layer1.backward.hidden_weights', names)
        self.assertEqual(names[-2:], ['classifier.weights', 'classifier.bias'])
        self.assertEqual(head.parameters()['lstm.layer1.forward.input_weights'].shape, (6, 12))

    def test_padding_positions_are_ignored(self):
        for config in (BiLSTMHeadConfig(hidden=3), RCNNHeadConfig(hidden=3)):
            head = build_head(config, DIM, Rng(1))
            emb = _emb(8, seed=2)
            changed = emb.data.copy()
            changed[5:] = Rng(3).normal((3, DIM))
            np.testing.assert_array_equal(
                head.forward(emb, length=5).data,
                head.forward(Tensor(changed), length=5).data
            )

    def test_rcnn_all_negative_features_give_bias_logits(self):
        head = build_head(RCNNHeadConfig(hidden=2, layers=1), DIM, Rng(4))
        forward_params, backward_params = head.lstm[0]
        for params in (forward_params, backward_params):
            params.input_weights.data = np.zeros(params.input_weights.shape)
            params.hidden_weights.data = np.zeros(params.hidden_weights.shape)
            # input and output gates open, candidate saturated at -1
            params.bias.data = np.array([10.0, 10.0, 0.0, 0.0, -10.0, -10.0, 10.0, 10.0])
        head.classifier_bias.data = np.array([0.3, -0.1])
        emb = Tensor(-np.abs(Rng(5).normal((4, DIM))) - 0.1)
        np.testing.assert_allclose(head.forward(emb).data, head.classifier_bias.data, atol=1e-12)

    def test_feature_widths_at_full_hidden_size(self):
        emb = Tensor(Rng(7).normal((2, 768)))
        bilstm_head = build_head(BiLSTMHeadConfig(hidden=768, layers=1), 768, Rng(8))
        self.assertEqual(bilstm_head._features(emb, 2, Mode.EVAL, None).shape, (1536,))
        rcnn_head = build_head(RCNNHeadConfig(hidden=768, layers=1), 768, Rng(9))
        self.assertEqual(rcnn_head._features(emb, 2, Mode.EVAL, None).shape, (2304,))
        self.assertEqual(rcnn_head.classifier_weights.shape, (2304, 2))

    def test_rcnn_feature_width(self):
        head = build_head(RCNNHeadConfig(hidden=3), DIM, Rng(6))
        self.assertEqual(head.feature_dim, 2 * 3 + DIM)
        self.assertEqual(head.classifier_weights.shape, (12, 2))


class DPCNNHeadTestCase(TestCase):

    def test_schedule_of_128(self):
        self.assertEqual(DPCNNHead.block_lengths(128), [63, 31, 15, 7, 3, 1])
        head = build_head(DPCNNHeadConfig(channels=2), DIM, Rng(0))
        self.assertEqual(head.executed_schedule(_emb(128)), [63, 31, 15, 7, 3, 1])

    def test_schedule_recurrence(self):
        for length in range(3, 513):
            expected = []
            current = length
            while current >= 3:
                current = (current - 3) // 2 + 1
                expected.append(current)
            self.assertEqual(DPCNNHead.block_lengths(length), expected)
            self.assertLess(expected[-1], 3)

    def test_executed_blocks_follow_schedule(self):
        head = build_head(DPCNNHeadConfig(channels=2), DIM, Rng(1))
        for length in (3, 4, 5, 12, 33):
            self.assertEqual(head.executed_schedule(_emb(length)), DPCNNHead.block_lengths(length))

    def test_forward_keeps_no_per_call_state(self):
        head = build_head(DPCNNHeadConfig(channels=2), DIM, Rng(1))
        before = dict(vars(head))
        head.forward(_emb(12))
        self.assertEqual(set(vars(head)), set(before))
        for name, value in before.items():
            self.assertIs(vars(head)[name], value)

    def test_minimum_length(self):
        head = build_head(DPCNNHeadConfig(channels=2), DIM, Rng(2))
        with self.assertRaises(SequenceTooShortError):
            head.forward(_emb(2))

    def test_shared_convolution(self):
        head = build_head(DPCNNHeadConfig(channels=4, kernel=3), DIM, Rng(3))
        shapes = {name: tensor.shape for name, tensor in head.parameters().items()}
        self.assertEqual(shapes, {
            'region.weights': (4, 3, DIM),
            'region.bias': (4,),
            'conv.weights': (4, 3, 4),
            'conv.bias': (4,),
            'classifier.weights': (4, 2),
            'classifier.bias': (2,)
        })

    def test_zero_convolutions_leave_region_bias(self):
        head = build_head(DPCNNHeadConfig(channels=4), DIM, Rng(4))
        head.conv_weights.data = np.zeros(head.conv_weights.shape)
        head.region_weights.data = np.zeros(head.region_weights.shape)
        head.region_bias.data = np.array([0.5, -1.0, 2.0, 0.0])
        head.classifier_bias.data = np.array([0.25, -0.25])
        expected = head.region_bias.data @ head.classifier_weights.data + head.classifier_bias.data
        np.testing.assert_allclose(head.forward(_emb(20, seed=5)).data, expected, atol=1e-12)


class HeadDeterminismTestCase(TestCase):

    def test_same_seed_same_logits(self):
        for config in (TextCNNHeadConfig(kernels_per_size=2), DPCNNHeadConfig(channels=3), RCNNHeadConfig(hidden=2)):
            first = build_head(config, DIM, Rng(9)).forward(_emb(9))
            second = build_head(config, DIM, Rng(9)).forward(_emb(9))
            np.testing.assert_array_equal(first.data, second.data)

    def test_train_mode_dropout_is_seeded(self):
        head = build_head(TextCNNHeadConfig(kernels_per_size=4, dropout=0.5), DIM, Rng(10))
        emb = _emb(8)
        first = head.forward(emb, mode=Mode.TRAIN, rng=Rng(11)).data
        second = head.forward(emb, mode=Mode.TRAIN, rng=Rng(11)).data
        np.testing.assert_array_equal(first, second)
