"""
Unit test for Tensor, Graph and backward
"""
from unittest import TestCase

import numpy as np

from text_heads.autograd import (
    Graph,
    Tensor,
    add,
    backward,
    is_grad_enabled,
    matmul,
    mul,
    no_grad,
    relu,
    total
)
from text_heads.exceptions import GraphError, NumericError


class TensorTestCase(TestCase):

    def test_data_is_float64(self):
        tensor = Tensor([[1, 2], [3, 4]])
        self.assertEqual(tensor.data.dtype, np.float64)
        self.assertEqual(tensor.shape, (2, 2))
        self.assertEqual(tensor.size, 4)

    def test_item_needs_single_element(self):
        self.assertEqual(Tensor([3.5]).item(), 3.5)
        with self.assertRaises(ValueError):
            Tensor([1.0, 2.0]).item()

    def test_operators(self):
        a = Tensor([1.0, 2.0])
        b = Tensor([3.0, 5.0])
        np.testing.assert_array_equal((a + b).data, [4.0, 7.0])
        np.testing.assert_array_equal((a - b).data, [-2.0, -3.0])
        np.testing.assert_array_equal((a * b).data, [3.0, 10.0])
        np.testing.assert_array_equal((-a).data, [-1.0, -2.0])
        np.testing.assert_array_equal((2.0 * a).data, [2.0, 4.0])

    def test_detach_drops_history(self):
        a = Tensor([1.0], requires_grad=True)
        detached = (a * a).detach()
        self.assertTrue(detached.is_leaf)
        self.assertFalse(detached.requires_grad)


class BackwardTestCase(TestCase):

    def test_shared_input_gradients_add_up(self):
        x = Tensor([3.0], requires_grad=True)
        loss = total(add(mul(x, x), x))
        backward(loss)
        # d(x^2 + x) / dx = 2x + 1
        np.testing.assert_allclose(x.grad, [7.0])

    def test_matmul_gradients(self):
        a = Tensor([[1.0, 2.0], [3.0, 4.0]], requires_grad=True)
        b = Tensor([[5.0], [6.0]], requires_grad=True)
        total(matmul(a, b)).backward()
        np.testing.assert_allclose(a.grad, [[5.0, 6.0], [5.0, 6.0]])
        np.testing.assert_allclose(b.grad, [[4.0], [6.0]])

    def test_gradients_accumulate_across_calls(self):
        x = Tensor([2.0], requires_grad=True)
        total(mul(x, x)).backward()
        total(mul(x, x)).backward()
        np.testing.assert_allclose(x.grad, [8.0])
        x.zero_grad()
        self.assertIsNone(x.grad)

    def test_constant_inputs_receive_no_gradient(self):
        x = Tensor([1.0, -1.0], requires_grad=True)
        c = Tensor([2.0, 2.0])
        total(mul(x, c)).backward()
        np.testing.assert_allclose(x.grad, [2.0, 2.0])
        self.assertIsNone(c.grad)

    def test_leaf_loss_is_rejected(self):
        with self.assertRaises(GraphError):
            backward(Tensor([1.0], requires_grad=True))

    def test_non_scalar_loss_is_rejected(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        with self.assertRaises(GraphError):
            backward(mul(x, x))

    def test_relu_subgradient_at_zero(self):
        x = Tensor([-1.0, 0.0, 2.0], requires_grad=True)
        total(relu(x)).backward()
        np.testing.assert_array_equal(x.grad, [0.0, 0.0, 1.0])

    def test_non_finite_forward_raises(self):
        x = Tensor([1e308], requires_grad=True)
        with self.assertRaises(NumericError):
            mul(x, Tensor([1e308]))


class GraphTestCase(TestCase):

    def test_topological_order(self):
        x = Tensor([1.0], requires_grad=True)
        y = mul(x, x)
        z = add(y, x)
        loss = total(z)
        nodes = list(Graph.trace(loss))
        position = {id(node): idx for idx, node in enumerate(nodes)}
        self.assertEqual(len(nodes), 4)
        self.assertLess(position[id(x)], position[id(y)])
        self.assertLess(position[id(y)], position[id(z)])
        self.assertLess(position[id(z)], position[id(loss)])


class NoGradTestCase(TestCase):

    def test_no_graph_is_recorded(self):
        x = Tensor([1.0], requires_grad=True)
        with no_grad():
            self.assertFalse(is_grad_enabled())
            y = mul(x, x)
        self.assertTrue(is_grad_enabled())
        self.assertFalse(y.requires_grad)
        self.assertIsNone(y.creator)

    def test_restores_state_on_error(self):
        with self.assertRaises(RuntimeError):
            with no_grad():
                raise RuntimeError('boom')
        self.assertTrue(is_grad_enabled())
