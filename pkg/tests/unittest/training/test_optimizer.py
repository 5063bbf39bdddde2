"""
Unit test for Adam
"""
from unittest import TestCase

import numpy as np

from text_heads.autograd import Rng, Tensor
from text_heads.exceptions import NumericError, ShapeError
from text_heads.training import AdamState, adam_step


class AdamStepTestCase(TestCase):

    def test_first_step_moves_by_learning_rate(self):
        param = Tensor([0.0], requires_grad=True)
        param.grad = np.array([1.0])
        state = AdamState()
        adam_step({'w': param}, state, 0.1)
        self.assertAlmostEqual(param.item(), -0.1, places=7)
        self.assertEqual(state.step, 1)
        np.testing.assert_allclose(state.first_moments['w'], [0.1])
        np.testing.assert_allclose(state.second_moments['w'], [0.001])

    def test_zero_gradient_leaves_parameter(self):
        param = Tensor([1.5, -2.0], requires_grad=True)
        state = AdamState()
        adam_step({'w': param}, state, 0.1)
        np.testing.assert_array_equal(param.data, [1.5, -2.0])
        self.assertEqual(state.step, 1)

    def test_gradients_are_zeroed(self):
        param = Tensor([1.0], requires_grad=True)
        param.grad = np.array([0.5])
        adam_step({'w': param}, AdamState(), 0.01)
        self.assertIsNone(param.grad)

    def test_non_finite_gradient_names_parameter(self):
        param = Tensor([1.0], requires_grad=True)
        param.grad = np.array([np.nan])
        state = AdamState()
        with self.assertRaises(NumericError) as cm:
            adam_step({'head.classifier.bias': param}, state, 0.01)
        self.assertIn('head.classifier.bias', cm.exception.message)
        self.assertEqual(state.step, 0)
        self.assertEqual(param.item(), 1.0)

    def test_gradient_shape_mismatch(self):
        param = Tensor([1.0, 2.0], requires_grad=True)
        with self.assertRaises(ShapeError):
            adam_step({'w': param}, AdamState(), 0.01, grads={'w': np.zeros(3)})

    def test_identical_runs_identical_trajectories(self):
        def run() -> np.ndarray:
            rng = Rng(5)
            param = Tensor(rng.normal((4,)), requires_grad=True)
            state = AdamState()
            for _ in range(20):
                adam_step({'w': param}, state, 0.05, grads={'w': rng.normal((4,))})
            return param.data

        np.testing.assert_array_equal(run(), run())

    def test_descends_a_quadratic(self):
        param = Tensor([3.0, -4.0], requires_grad=True)
        state = AdamState()
        for _ in range(500):
            param.grad = 2.0 * param.data
            adam_step({'w': param}, state, 0.05)
        self.assertLess(float(np.abs(param.data).max()), 0.1)
