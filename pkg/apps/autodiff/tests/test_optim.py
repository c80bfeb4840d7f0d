"""
Tests for the Adam optimizer.
"""
import numpy as np
from django.test import SimpleTestCase

from apps.autodiff import ops
from apps.autodiff.optim import Adam, AdamState, adam_step
from apps.autodiff.tensor import Tensor
from apps.common.exceptions import ShapeError


class AdamStepTests(SimpleTestCase):

    def test_first_step_has_magnitude_lr(self):
        params = [np.array([1.0, -2.0, 0.5])]
        grads = [np.array([0.3, -4.0, 1e-3])]
        updated, state = adam_step(params, grads, AdamState(), lr=0.01)
        step = updated[0] - params[0]
        np.testing.assert_allclose(step, -0.01 * np.sign(grads[0]), rtol=1e-4)
        self.assertEqual(state.step, 1)

    def test_zero_grad_is_fixed_point(self):
        params = [np.array([1.0, 2.0])]
        state = AdamState()
        for _ in range(5):
            params, state = adam_step(params, [np.zeros(2)], state, lr=0.1)
        np.testing.assert_array_equal(params[0], [1.0, 2.0])

    def test_identical_runs_are_bit_identical(self):
        def run():
            rng = np.random.default_rng(9)
            params, state = [rng.standard_normal((3, 2))], AdamState()
            for _ in range(20):
                params, state = adam_step(params, [rng.standard_normal((3, 2))], state, lr=1e-3)
            return params[0]
        self.assertEqual(run().tobytes(), run().tobytes())

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeError):
            adam_step([np.ones(2)], [np.ones(3)], AdamState(), lr=0.1)
        with self.assertRaises(ShapeError):
            adam_step([np.ones(2)], [np.ones(2)], AdamState(1, [np.ones(3)], [np.ones(3)]), lr=0.1)

    def test_inputs_are_not_modified(self):
        params = [np.ones(2)]
        adam_step(params, [np.ones(2)], AdamState(), lr=0.1)
        np.testing.assert_array_equal(params[0], 1.0)


class AdamTests(SimpleTestCase):

    def test_minimizes_quadratic(self):
        x = Tensor(np.array([3.0, -2.0]), requires_grad=True)
        optimizer = Adam({'x': x})
        for _ in range(500):
            optimizer.zero_grad()
            ops.sum(x * x).backward()
            optimizer.step(0.05)
        np.testing.assert_allclose(x.data, 0.0, atol=0.1)
