"""
Unit test for embedding lookup, self-attention and the encoder stack
"""
from unittest import TestCase

import numpy as np

from text_heads.autograd import Rng, Tensor, total
from text_heads.constants import Mode, PAD_ID
from text_heads.encoder import (
    EncoderParams,
    attention,
    attention_weights,
    embed,
    encoder_forward,
    init_attention_params,
    init_encoder_layer_params
)
from text_heads.exceptions import ShapeError
from text_heads.schemes import EncoderConfig


class EmbedTestCase(TestCase):

    def setUp(self):
        rng = Rng(41)
        self.table = Tensor(rng.normal((6, 4)), requires_grad=True)
        self.positional = Tensor(rng.normal((5, 4)), requires_grad=True)

    def test_rows_plus_positions(self):
        out = embed([2, 3, PAD_ID], self.table, self.positional)
        np.testing.assert_allclose(out.data[0], self.table.data[2] + self.positional.data[0])
        np.testing.assert_allclose(out.data[1], self.table.data[3] + self.positional.data[1])
        # padding reads a zero token row but keeps its position
        np.testing.assert_allclose(out.data[2], self.positional.data[2])

    def test_without_positions(self):
        out = embed([4, 5], self.table)
        np.testing.assert_array_equal(out.data, self.table.data[[4, 5]])

    def test_padding_row_gets_no_gradient(self):
        total(embed([PAD_ID, 2, 2], self.table, self.positional)).backward()
        np.testing.assert_array_equal(self.table.grad[PAD_ID], 0.0)
        np.testing.assert_array_equal(self.table.grad[2], 2.0)
        np.testing.assert_array_equal(self.positional.grad[:3], 1.0)
        np.testing.assert_array_equal(self.positional.grad[3:], 0.0)

    def test_too_many_ids(self):
        with self.assertRaises(ShapeError):
            embed([1] * 6, self.table, self.positional)
        with self.assertRaises(ShapeError):
            embed([], self.table)


class AttentionTestCase(TestCase):

    def setUp(self):
        self.params = init_attention_params(Rng(42), 8, prefix='attention.')

    def test_zero_queries_attend_uniformly(self):
        self.params.query_weights.data = np.zeros((8, 8))
        x = Tensor(Rng(43).normal((5, 8)))
        weights = attention_weights(x, self.params, heads=2)
        self.assertEqual(weights.shape, (2, 5, 5))
        np.testing.assert_allclose(weights, 0.2)

    def test_rows_sum_to_one(self):
        x = Tensor(Rng(44).normal((6, 8)))
        weights = attention_weights(x, self.params, heads=4)
        np.testing.assert_allclose(weights.sum(axis=-1), 1.0)

    def test_single_position_returns_projected_value(self):
        x = Tensor(Rng(45).normal((1, 8)))
        p = self.params
        out = attention(x, p, heads=2)
        value = x.data @ p.value_weights.data + p.value_bias.data
        np.testing.assert_allclose(out.data, value @ p.output_weights.data + p.output_bias.data, atol=1e-12)

    def test_masked_keys_get_zero_weight(self):
        x = Tensor(Rng(46).normal((6, 8)))
        weights = attention_weights(x, self.params, heads=2, length=4)
        np.testing.assert_array_equal(weights[:, :, 4:], 0.0)
        np.testing.assert_allclose(weights.sum(axis=-1), 1.0)

    def test_padding_content_does_not_leak(self):
        rng = Rng(47)
        x = rng.normal((6, 8))
        changed = x.copy()
        changed[4:] = rng.normal((2, 8))
        out = attention(Tensor(x), self.params, heads=2, length=4).data
        out_changed = attention(Tensor(changed), self.params, heads=2, length=4).data
        np.testing.assert_allclose(out[:4], out_changed[:4], atol=1e-12)

    def test_heads_must_divide_width(self):
        with self.assertRaises(ShapeError):
            attention(Tensor(np.zeros((3, 8))), self.params, heads=3)

    def test_parameter_names(self):
        self.assertEqual(self.params.query_weights.name, 'attention.query_weights')
        self.assertEqual(self.params.output_bias.name, 'attention.output_bias')


class EncoderForwardTestCase(TestCase):

    def setUp(self):
        rng = Rng(48)
        self.config = EncoderConfig(layers=2, heads=2, dim=8, ff_dim=16, max_len=6, dropout=0.5)
        self.params = EncoderParams(
            table=Tensor(rng.normal((10, 8)), requires_grad=True),
            positional=Tensor(rng.normal((6, 8)), requires_grad=True),
            layers=[init_encoder_layer_params(rng, 8, 16, prefix=f'layer{idx}.') for idx in range(2)]
        )

    def test_output_shape_and_normalised_rows(self):
        out = encoder_forward([2, 4, 5, 0, 0, 0], self.config, self.params, length=3).data
        self.assertEqual(out.shape, (6, 8))
        np.testing.assert_allclose(out.mean(axis=-1), 0.0, atol=1e-10)

    def test_eval_mode_is_deterministic(self):
        first = encoder_forward([2, 4, 5], self.config, self.params).data
        second = encoder_forward([2, 4, 5], self.config, self.params, mode=Mode.EVAL).data
        np.testing.assert_array_equal(first, second)

    def test_train_mode_applies_dropout(self):
        evaluated = encoder_forward([2, 4, 5], self.config, self.params).data
        trained = encoder_forward([2, 4, 5], self.config, self.params, mode=Mode.TRAIN, rng=Rng(1)).data
        self.assertFalse(np.allclose(evaluated, trained))

    def test_no_layers_is_plain_embedding(self):
        config = self.config.model_copy(update={'layers': 0})
        params = self.params._replace(layers=[])
        out = encoder_forward([2, 4], config, params).data
        np.testing.assert_allclose(out, self.params.table.data[[2, 4]] + self.params.positional.data[:2])
