"""
Tests for the tape and backward pass.
"""
import numpy as np
from django.test import SimpleTestCase

from apps.autodiff import ops
from apps.autodiff.tensor import Tape, Tensor, backward, no_grad
from apps.common.exceptions import ArgumentError


class BackwardTests(SimpleTestCase):

    def test_sum_gives_ones(self):
        x = Tensor(np.arange(6.0).reshape(2, 3), requires_grad=True)
        ops.sum(x).backward()
        np.testing.assert_array_equal(x.grad, np.ones((2, 3)))

    def test_unused_leaf_has_zero_grad(self):
        x = Tensor(np.ones(3), requires_grad=True)
        y = Tensor(np.ones(4), requires_grad=True)
        ops.sum(x * 2.0).backward()
        np.testing.assert_array_equal(y.grad, np.zeros(4))

    def test_fan_out_accumulates(self):
        x = Tensor(np.array([1.0, -2.0]), requires_grad=True)
        ops.sum(x * 3.0 + x * x).backward()
        np.testing.assert_array_equal(x.grad, 3.0 + 2.0 * x.data)

    def test_grads_accumulate_across_calls(self):
        x = Tensor(np.ones(2), requires_grad=True)
        ops.sum(x).backward()
        ops.sum(x).backward()
        np.testing.assert_array_equal(x.grad, [2.0, 2.0])
        x.zero_grad()
        np.testing.assert_array_equal(x.grad, [0.0, 0.0])

    def test_non_scalar_loss(self):
        x = Tensor(np.ones(3), requires_grad=True)
        with self.assertRaises(ArgumentError):
            backward(x * 2.0)

    def test_broadcast_operand_sums_over_broadcast_axes(self):
        a = Tensor(np.ones((4, 3)), requires_grad=True)
        b = Tensor(np.array([1.0, 2.0, 3.0]), requires_grad=True)
        ops.sum(a * b).backward()
        np.testing.assert_array_equal(b.grad, [4.0, 4.0, 4.0])
        np.testing.assert_array_equal(a.grad, np.tile([1.0, 2.0, 3.0], (4, 1)))

    def test_backward_is_linear(self):
        rng = np.random.default_rng(5)
        data = rng.standard_normal((3, 4))

        def losses(x):
            return ops.sum(ops.tanh(x) * 2.0), ops.mean(ops.sigmoid(x @ np.ones((4, 2))))

        grads = []
        for a, b in ((1.0, 0.0), (0.0, 1.0), (0.7, -1.3)):
            x = Tensor(data, requires_grad=True)
            first, second = losses(x)
            (first * a + second * b).backward()
            grads.append(x.grad)
        np.testing.assert_allclose(grads[2], 0.7 * grads[0] - 1.3 * grads[1], atol=1e-12)

    def test_tape_visits_each_node_once(self):
        x = Tensor(np.ones(2), requires_grad=True)
        shared = x * 2.0
        loss = ops.sum(shared + shared * shared)
        tape = Tape.record(loss)
        self.assertEqual(len(tape), len({id(n) for n in tape.nodes}))
        self.assertIs(tape.nodes[-1], loss)
        self.assertIs(tape.nodes[0], x)
        backward(loss)
        np.testing.assert_array_equal(x.grad, 2.0 * (1.0 + 2.0 * 2.0))

    def test_tape_is_consumed(self):
        x = Tensor(np.ones(2), requires_grad=True)
        hidden = x * 2.0
        ops.sum(hidden).backward()
        self.assertTrue(hidden.is_leaf)

    def test_no_grad_records_nothing(self):
        x = Tensor(np.ones(2), requires_grad=True)
        with no_grad():
            y = x * 2.0
        self.assertFalse(y.requires_grad)
        np.testing.assert_array_equal(y.data, [2.0, 2.0])

    def test_numpy_operands_defer_to_tensor(self):
        x = Tensor(np.ones(2), requires_grad=True)
        y = np.array([2.0, 3.0]) * x
        self.assertIsInstance(y, Tensor)
        ops.sum(y).backward()
        np.testing.assert_array_equal(x.grad, [2.0, 3.0])
