"""
Tests for the LSTM cell and sequence runner.
"""
import numpy as np
from django.test import SimpleTestCase

from apps.autodiff import ops
from apps.autodiff.gradcheck import grad_check
from apps.autodiff.recurrent import LSTMWeights, lstm_cell, lstm_sequence
from apps.autodiff.tensor import Tensor
from apps.common.exceptions import ShapeError


def weights_of(w_input, w_hidden, bias):
    return LSTMWeights(Tensor(w_input), Tensor(w_hidden), Tensor(bias))


def random_weights(rng, inputs, hidden, scale=0.5):
    return weights_of(
        rng.standard_normal((inputs, 4 * hidden)) * scale,
        rng.standard_normal((hidden, 4 * hidden)) * scale,
        rng.standard_normal(4 * hidden) * scale,
    )


class LSTMCellTests(SimpleTestCase):

    def test_zero_weights_give_zero_output(self):
        weights = weights_of(np.zeros((3, 8)), np.zeros((2, 8)), np.zeros(8))
        x = np.random.default_rng(0).standard_normal((4, 3)) * 10
        h, c = lstm_cell(x, np.zeros((4, 2)), np.zeros((4, 2)), weights)
        np.testing.assert_array_equal(h.data, 0.0)
        np.testing.assert_array_equal(c.data, 0.0)

    def test_saturated_gates_keep_cell(self):
        hidden = 3
        bias = np.zeros(4 * hidden)
        bias[:hidden] = -10.0
        bias[hidden:2 * hidden] = 10.0
        weights = weights_of(np.zeros((2, 4 * hidden)), np.zeros((hidden, 4 * hidden)), bias)
        c_prev = np.array([[0.3, -0.7, 1.2]])
        _, c = lstm_cell(np.ones((1, 2)), np.zeros((1, hidden)), c_prev, weights)
        np.testing.assert_allclose(c.data, c_prev, atol=1e-4)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(1)
        weights = random_weights(rng, 3, 4)
        h_prev = rng.standard_normal((2, 4))
        c_prev = rng.standard_normal((2, 4))
        projection = rng.standard_normal((2, 4))

        def f(x):
            h, _ = lstm_cell(x, h_prev, c_prev, weights)
            return ops.sum(h * projection)

        self.assertLessEqual(grad_check(f, [rng.standard_normal((2, 3))]), 1e-4)

    def test_gradient_through_weights(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((2, 5, 3))

        def f(w_input, w_hidden, bias):
            outputs, (h, c) = lstm_sequence(x, LSTMWeights(w_input, w_hidden, bias))
            return ops.sum(outputs * 0.5) + ops.sum(c)

        w = random_weights(rng, 3, 2)
        self.assertLessEqual(grad_check(f, [w.w_input.data, w.w_hidden.data, w.bias.data]), 1e-4)

    def test_shape_mismatch(self):
        weights = random_weights(np.random.default_rng(3), 3, 2)
        with self.assertRaises(ShapeError):
            lstm_cell(np.ones((1, 4)), np.zeros((1, 2)), np.zeros((1, 2)), weights)
        with self.assertRaises(ShapeError):
            lstm_cell(np.ones((1, 3)), np.zeros((1, 3)), np.zeros((1, 3)), weights)
        with self.assertRaises(ShapeError):
            LSTMWeights(Tensor(np.ones((3, 8))), Tensor(np.ones((2, 6))), Tensor(np.ones(8)))


class LSTMSequenceTests(SimpleTestCase):

    def setUp(self):
        rng = np.random.default_rng(4)
        self.weights = random_weights(rng, 3, 4)
        self.xs = rng.standard_normal((2, 6, 3))

    def test_carried_state_matches_single_pass(self):
        whole, _ = lstm_sequence(self.xs, self.weights)
        first, state = lstm_sequence(self.xs[:, :4], self.weights)
        second, _ = lstm_sequence(self.xs[:, 4:], self.weights, state)
        np.testing.assert_allclose(np.concatenate([first.data, second.data], axis=1), whole.data, atol=1e-12)

    def test_reverse_keeps_step_order(self):
        backward_out, _ = lstm_sequence(self.xs, self.weights, reverse=True)
        flipped, _ = lstm_sequence(self.xs[:, ::-1], self.weights)
        np.testing.assert_allclose(backward_out.data, flipped.data[:, ::-1], atol=1e-12)

    def test_causality(self):
        outputs, _ = lstm_sequence(self.xs, self.weights)
        changed = self.xs.copy()
        changed[:, 3:] += 5.0
        perturbed, _ = lstm_sequence(changed, self.weights)
        np.testing.assert_array_equal(perturbed.data[:, :3], outputs.data[:, :3])
