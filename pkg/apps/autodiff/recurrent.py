"""
LSTM cell and sequence runner composed from differentiable primitives.

Gate order in the stacked weights is [input, forget, cell, output].
"""
import attrs
import numpy as np

from apps.common.exceptions import ShapeError

from . import ops
from .tensor import Tensor, as_tensor


@attrs.frozen
class LSTMWeights:
    """
    Stacked gate weights of one LSTM.

    w_input: (inputs, 4 * hidden)
    w_hidden: (hidden, 4 * hidden)
    bias: (4 * hidden,)
    """

    w_input: Tensor
    w_hidden: Tensor
    bias: Tensor

    def __attrs_post_init__(self):
        hidden = self.w_hidden.shape[0]
        if (self.w_hidden.shape != (hidden, 4 * hidden) or self.w_input.shape[1] != 4 * hidden
                or self.bias.shape != (4 * hidden,)):
            raise ShapeError(
                f'inconsistent LSTM weights {self.w_input.shape}, {self.w_hidden.shape}, {self.bias.shape}'
            )

    @property
    def hidden(self):
        return self.w_hidden.shape[0]

    @property
    def inputs(self):
        return self.w_input.shape[0]


def lstm_cell(x_t, h_prev, c_prev, weights):
    """
    One LSTM step.

    Args:
        x_t: (batch, inputs)
        h_prev, c_prev: (batch, hidden)
        weights: LSTMWeights

    Returns:
        tuple[Tensor, Tensor]: (h_t, c_t)
    """
    x_t, h_prev, c_prev = as_tensor(x_t), as_tensor(h_prev), as_tensor(c_prev)
    hidden = weights.hidden
    if x_t.shape[-1] != weights.inputs:
        raise ShapeError(f'LSTM input width {x_t.shape[-1]} != {weights.inputs}')
    if h_prev.shape[-1] != hidden or c_prev.shape != h_prev.shape:
        raise ShapeError(f'LSTM state {h_prev.shape}/{c_prev.shape} does not match hidden size {hidden}')
    z = x_t @ weights.w_input + h_prev @ weights.w_hidden + weights.bias
    i = ops.sigmoid(z[..., :hidden])
    f = ops.sigmoid(z[..., hidden:2 * hidden])
    g = ops.tanh(z[..., 2 * hidden:3 * hidden])
    o = ops.sigmoid(z[..., 3 * hidden:])
    c_t = f * c_prev + i * g
    h_t = o * ops.tanh(c_t)
    return h_t, c_t


def lstm_sequence(xs, weights, state=None, reverse=False):
    """
    Run ``lstm_cell`` over axis 1 of ``xs``.

    Args:
        xs: (batch, steps, inputs)
        state: Optional (h, c), each (batch, hidden); zeros when None
        reverse: Walk the steps backwards (outputs stay in input order)

    Returns:
        tuple: outputs (batch, steps, hidden) and the final (h, c)
    """
    xs = as_tensor(xs)
    if xs.ndim != 3:
        raise ShapeError(f'lstm_sequence needs (batch, steps, inputs), got {xs.shape}')
    batch, steps, _ = xs.shape
    if state is None:
        zeros = Tensor(np.zeros((batch, weights.hidden)))
        state = (zeros, zeros)
    h, c = state
    outputs = [None] * steps
    order = range(steps - 1, -1, -1) if reverse else range(steps)
    for t in order:
        h, c = lstm_cell(xs[:, t, :], h, c, weights)
        outputs[t] = h
    return ops.stack(outputs, axis=1), (h, c)
