"""
Unit test for the LSTM cell and the bidirectional LSTM
"""
from unittest import TestCase

import numpy as np

from text_heads.autograd import (
    LSTMParams,
    Rng,
    Tensor,
    bilstm,
    index,
    init_bilstm_params,
    init_lstm_params,
    lstm_cell,
    stack
)
from text_heads.constants import FORGET_GATE_BIAS
from text_heads.exceptions import ShapeError


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


class LSTMCellTestCase(TestCase):

    def test_matches_gate_equations(self):
        rng = Rng(21)
        params = init_lstm_params(rng, 3, 4)
        params.bias.data = rng.normal((16,))
        x, h, c = rng.normal((3,)), rng.normal((4,)), rng.normal((4,))

        h_next, c_next = lstm_cell(Tensor(x), Tensor(h), Tensor(c), params)

        z = x @ params.input_weights.data + h @ params.hidden_weights.data + params.bias.data
        i, f, g, o = _sigmoid(z[:4]), _sigmoid(z[4:8]), np.tanh(z[8:12]), _sigmoid(z[12:])
        expected_c = f * c + i * g
        np.testing.assert_allclose(c_next.data, expected_c, atol=1e-12)
        np.testing.assert_allclose(h_next.data, o * np.tanh(expected_c), atol=1e-12)

    def test_forget_gate_bias(self):
        params = init_lstm_params(Rng(0), 2, 3)
        np.testing.assert_array_equal(params.bias.data[3:6], FORGET_GATE_BIAS)
        np.testing.assert_array_equal(params.bias.data[:3], 0.0)
        np.testing.assert_array_equal(params.bias.data[6:], 0.0)

    def test_zero_parameters_with_unit_cell(self):
        params = LSTMParams(
            input_weights=Tensor(np.zeros((1, 4))),
            hidden_weights=Tensor(np.zeros((1, 4))),
            bias=Tensor(np.zeros(4))
        )
        h_next, c_next = lstm_cell(Tensor([0.0]), Tensor([0.0]), Tensor([1.0]), params)
        # every gate at 0.5, candidate 0: c' = 0.5, h' = 0.5 * tanh(0.5)
        self.assertAlmostEqual(c_next.item(), 0.5, places=12)
        self.assertAlmostEqual(h_next.item(), 0.5 * np.tanh(0.5), places=12)
        self.assertAlmostEqual(h_next.item(), 0.231059, places=6)

    def test_shape_mismatch(self):
        params = init_lstm_params(Rng(0), 2, 3)
        with self.assertRaises(ShapeError):
            lstm_cell(Tensor(np.zeros(3)), Tensor(np.zeros(3)), Tensor(np.zeros(3)), params)


class BiLSTMTestCase(TestCase):

    def test_output_shapes(self):
        params = init_bilstm_params(Rng(1), 5, 4, layers=2)
        outputs, final = bilstm(Tensor(Rng(2).normal((6, 5))), params)
        self.assertEqual(outputs.shape, (6, 8))
        self.assertEqual(final.shape, (8,))

    def test_final_joins_forward_end_and_backward_start(self):
        params = init_bilstm_params(Rng(3), 5, 4, layers=1)
        outputs, final = bilstm(Tensor(Rng(4).normal((7, 5))), params)
        np.testing.assert_array_equal(final.data[:4], outputs.data[6, :4])
        np.testing.assert_array_equal(final.data[4:], outputs.data[0, 4:])

    def test_reversed_input_with_swapped_directions(self):
        forward_params, backward_params = init_bilstm_params(Rng(5), 3, 4, layers=1)[0]
        seq = Rng(6).normal((5, 3))

        outputs, _ = bilstm(Tensor(seq), [(forward_params, backward_params)])
        mirrored, _ = bilstm(Tensor(seq[::-1].copy()), [(backward_params, forward_params)])

        np.testing.assert_allclose(mirrored.data[::-1, :4], outputs.data[:, 4:], atol=1e-12)
        np.testing.assert_allclose(mirrored.data[::-1, 4:], outputs.data[:, :4], atol=1e-12)

    def test_single_step_final_is_the_only_output(self):
        params = init_bilstm_params(Rng(11), 3, 4, layers=2)
        outputs, final = bilstm(Tensor(Rng(12).normal((1, 3))), params)
        self.assertEqual(outputs.shape, (1, 8))
        np.testing.assert_array_equal(final.data, outputs.data[0])

    def test_empty_sequence(self):
        params = init_bilstm_params(Rng(7), 3, 2, layers=1)
        with self.assertRaises(ShapeError):
            bilstm(Tensor(np.zeros((0, 3))), params)

    def test_gradient_reaches_every_timestep(self):
        params = init_bilstm_params(Rng(8), 3, 2, layers=1)
        seq = Tensor(Rng(9).normal((4, 3)), requires_grad=True)
        _, final = bilstm(seq, params)
        index(stack([final]), (0, 0)).backward()
        self.assertTrue(np.all(np.abs(seq.grad).sum(axis=1) > 0.0))

    def test_params_are_named(self):
        params = init_bilstm_params(Rng(10), 3, 2, layers=2)
        forward_params, backward_params = params[1]
        self.assertIsInstance(forward_params, LSTMParams)
        self.assertEqual(forward_params.input_weights.name, 'layer1.forward.input_weights')
        self.assertEqual(backward_params.bias.name, 'layer1.backward.bias')
        self.assertEqual(forward_params.input_weights.shape, (4, 8))
