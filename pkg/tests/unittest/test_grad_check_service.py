"""
Unit test for GradCheckService
"""
from unittest import TestCase
from unittest.mock import patch

import numpy as np

from text_heads.autograd import Rng, Tensor, total
from text_heads.autograd.functional import Tanh
from text_heads.constants import GRAD_CHECK_TOLERANCE
from text_heads.encoder import attention, init_attention_params
from text_heads.grad_check_service import OP_CHECKS, GradCheckService
from text_heads.schemes import GradCheckResult


def _flipped_tanh_backward(self, grad: np.ndarray):
    return (-grad * (1.0 - self.out ** 2),)


class OpsSuiteTestCase(TestCase):

    def test_every_primitive_passes(self):
        results = GradCheckService.ops_suite(42)
        self.assertEqual([result.name for result in results], list(OP_CHECKS) + ['encoder_forward'])
        for result in results:
            self.assertTrue(result.passed, f'{result.name}: {result.max_relative_error}')

    def test_passes_for_several_seeds(self):
        for seed in (0, 1, 3, 7, 42):
            failed = [result.name for result in GradCheckService.ops_suite(seed) if not result.passed]
            self.assertEqual(failed, [], f'seed {seed}')

    def test_key_bias_is_left_out(self):
        _, params = OP_CHECKS['attention'](Rng(0))
        self.assertNotIn('key_bias', params)
        self.assertIn('query_bias', params)
        # shifting every key score of a query row by the same amount leaves the softmax unchanged
        attention_params = init_attention_params(Rng(1), 8)
        total(attention(Tensor(Rng(2).normal((4, 8))), attention_params, 2)).backward()
        np.testing.assert_allclose(attention_params.key_bias.grad, 0.0, atol=1e-12)

    def test_seeded(self):
        first = GradCheckService.ops_suite(3)
        second = GradCheckService.ops_suite(3)
        self.assertEqual(first, second)

    def test_broken_backward_is_reported(self):
        with patch.object(Tanh, 'backward', _flipped_tanh_backward):
            with self.assertLogs('text_heads.grad_check_service', level='ERROR'):
                results = {result.name: result for result in GradCheckService.ops_suite(42)}
        self.assertFalse(results['activations'].passed)
        self.assertTrue(results['matmul'].passed)


class ModelSuiteTestCase(TestCase):

    def test_five_heads_pass(self):
        results = GradCheckService.model_suite(42)
        self.assertEqual(
            [result.name for result in results],
            ['model.linear', 'model.textcnn', 'model.bilstm', 'model.rcnn', 'model.dpcnn']
        )
        for result in results:
            self.assertTrue(result.passed, f'{result.name}: {result.max_relative_error}')


class RenderTestCase(TestCase):

    def test_render(self):
        results = [
            GradCheckResult(name='matmul', max_relative_error=2.5e-9),
            GradCheckResult(name='activations', max_relative_error=1.0)
        ]
        self.assertEqual(
            GradCheckService.render(results),
            'matmul\t2.500e-09\tok\nactivations\t1.000e+00\tFAIL\n'
        )
        self.assertEqual(results[0].tolerance, GRAD_CHECK_TOLERANCE)
