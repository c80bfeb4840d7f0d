"""
Central-difference gradient checking.
"""
import logging

import numpy as np

from .tensor import Tensor, backward, no_grad

logger = logging.getLogger(__name__)

REL_FLOOR = 1e-8


def relative_error(analytic, numeric):
    return np.abs(analytic - numeric) / np.maximum(REL_FLOOR, np.abs(analytic) + np.abs(numeric))


def numeric_gradient(f, arrays, index, eps=1e-5, skip=None):
    """Central differences of scalar ``f`` in every unskipped element of ``arrays[index]``."""
    base = arrays[index]
    grad = np.zeros_like(base)
    for position in np.ndindex(base.shape):
        if skip is not None and skip[position]:
            continue
        values = []
        for delta in (eps, -eps):
            shifted = [a.copy() for a in arrays]
            shifted[index][position] += delta
            with no_grad():
                values.append(f(*[Tensor(a) for a in shifted]).item())
        grad[position] = (values[0] - values[1]) / (2.0 * eps)
    return grad


def grad_check(f, inputs, eps=1e-5, skip=None):
    """
    Compare tape gradients of scalar ``f`` with central differences.

    Args:
        f: Callable taking one Tensor per input and returning a scalar Tensor
        inputs: float64 arrays
        eps: Finite-difference step
        skip: Optional list with one boolean mask (or None) per input; True
            marks elements left out of the check, e.g. inputs sitting on a kink

    Returns:
        float: maximum relative error over all checked elements
    """
    arrays = [np.array(a, dtype=np.float64) for a in inputs]
    skip = list(skip) if skip is not None else [None] * len(arrays)
    leaves = [Tensor(a, requires_grad=True) for a in arrays]
    backward(f(*leaves))
    worst = 0.0
    for index, leaf in enumerate(leaves):
        numeric = numeric_gradient(f, arrays, index, eps, skip[index])
        checked = np.ones(leaf.shape, dtype=bool) if skip[index] is None else ~np.asarray(skip[index])
        if checked.any():
            worst = max(worst, float(relative_error(leaf.grad, numeric)[checked].max()))
    logger.debug(f'grad_check over {len(arrays)} inputs: max relative error {worst:.3e}')
    return worst
