"""
Adam optimizer.
"""
import attrs
import numpy as np

from apps.common.exceptions import ShapeError


@attrs.define
class AdamState:
    step: int = 0
    m: list = attrs.Factory(list)
    v: list = attrs.Factory(list)

    @classmethod
    def zeros_like(cls, params):
        return cls(0, [np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(params, grads, state, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """
    One bias-corrected Adam update.

    Args:
        params, grads: Lists of same-shape arrays
        state: AdamState; empty moments are initialized to zeros

    Returns:
        tuple[list, AdamState]: new parameters and state; inputs are not modified

    Raises:
        ShapeError: Parameter, gradient and moment shapes disagree
    """
    if not state.m:
        state = AdamState.zeros_like(params)
    if not len(params) == len(grads) == len(state.m) == len(state.v):
        raise ShapeError('params, grads and Adam moments differ in count')
    step = state.step + 1
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if not p.shape == g.shape == m.shape == v.shape:
            raise ShapeError(f'Adam shapes differ: param {p.shape}, grad {g.shape}, moment {m.shape}')
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        m_hat = m / (1.0 - beta1 ** step)
        v_hat = v / (1.0 - beta2 ** step)
        new_params.append(p - lr * m_hat / (np.sqrt(v_hat) + eps))
        new_m.append(m)
        new_v.append(v)
    return new_params, AdamState(step, new_m, new_v)


class Adam:
    """Adam over a name -> Tensor mapping, reading each tensor's ``grad``."""

    def __init__(self, params, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = dict(params)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.state = AdamState()

    def zero_grad(self):
        for tensor in self.params.values():
            tensor.zero_grad()

    def step(self, lr):
        tensors = list(self.params.values())
        updated, self.state = adam_step(
            [t.data for t in tensors], [t.grad for t in tensors], self.state,
            lr, self.beta1, self.beta2, self.eps,
        )
        for tensor, value in zip(tensors, updated):
            tensor.data = value
