"""
Parameterized layers over the autodiff ops.

A Module exposes its parameters under dotted names derived from attribute
names (``blocks.0.down.weight``); checkpoints store tensors under these
names.
"""
import math

import numpy as np

from apps.autodiff import ops
from apps.autodiff.recurrent import LSTMWeights, lstm_sequence
from apps.autodiff.tensor import Tensor
from apps.common.exceptions import CompatibilityError, ShapeError


def parameter(rng, shape, fan_in):
    bound = 1.0 / math.sqrt(fan_in)
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True)


def constant_parameter(value, shape):
    return Tensor(np.full(shape, float(value)), requires_grad=True)


class Module:

    def named_parameters(self, prefix=''):
        for name, value in vars(self).items():
            if name.startswith('_'):
                continue
            path = f'{prefix}{name}'
            if isinstance(value, Tensor) and value.requires_grad:
                yield path, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f'{path}.')
            elif isinstance(value, (list, tuple)):
                for index, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f'{path}.{index}.')

    def parameters(self):
        """Name -> Tensor, sorted by name."""
        return dict(sorted(self.named_parameters()))

    def parameter_arrays(self):
        return {name: tensor.data.copy() for name, tensor in self.parameters().items()}

    def load_parameters(self, arrays):
        """
        Replace every parameter value.

        Raises:
            CompatibilityError: Missing, unexpected or mis-shaped tensors
        """
        params = self.parameters()
        missing = sorted(set(params) - set(arrays))
        unexpected = sorted(set(arrays) - set(params))
        if missing or unexpected:
            raise CompatibilityError(f'parameter names differ: missing {missing}, unexpected {unexpected}')
        for name, tensor in params.items():
            value = np.asarray(arrays[name], dtype=np.float64)
            if value.shape != tensor.shape:
                raise CompatibilityError(f'{name}: expected {tensor.shape}, got {value.shape}')
            tensor.data = value.copy()
            tensor.zero_grad()

    def zero_grad(self):
        for tensor in self.parameters().values():
            tensor.zero_grad()

    def parameter_count(self):
        return sum(t.size for t in self.parameters().values())


class Dense(Module):
    """y = x @ weight + bias over the last axis."""

    def __init__(self, rng, n_in, n_out, bias=True):
        self.weight = parameter(rng, (n_in, n_out), n_in)
        self.bias = parameter(rng, (n_out,), n_in) if bias else None

    def __call__(self, x):
        y = ops.matmul(x, self.weight)
        return y + self.bias if self.bias is not None else y


class Conv1d(Module):

    def __init__(self, rng, in_channels, out_channels, kernel=1, padding=0):
        fan_in = in_channels * kernel
        self.weight = parameter(rng, (out_channels, in_channels, kernel), fan_in)
        self.bias = parameter(rng, (out_channels,), fan_in)
        self.padding = padding

    def __call__(self, x):
        return ops.conv1d(x, self.weight, self.bias, padding=self.padding)


class Conv2d(Module):

    def __init__(self, rng, in_channels, out_channels, kernel, stride=1, padding=0, bias=True):
        kh, kw = kernel
        fan_in = in_channels * kh * kw
        self.weight = parameter(rng, (out_channels, in_channels, kh, kw), fan_in)
        self.bias = parameter(rng, (out_channels,), fan_in) if bias else None
        self.stride = stride
        self.padding = padding

    def __call__(self, x):
        return ops.conv2d(x, self.weight, self.bias, self.stride, self.padding)


class ConvTranspose2d(Module):

    def __init__(self, rng, in_channels, out_channels, kernel, stride=1, padding=0, output_padding=0, bias=True):
        kh, kw = kernel
        fan_in = in_channels * kh * kw
        self.weight = parameter(rng, (in_channels, out_channels, kh, kw), fan_in)
        self.bias = parameter(rng, (out_channels,), fan_in) if bias else None
        self.stride = stride
        self.padding = padding
        self.output_padding = output_padding

    def __call__(self, x):
        return ops.conv_transpose2d(x, self.weight, self.bias, self.stride, self.padding, self.output_padding)


class LayerNorm(Module):
    """Normalization over the last axis with a learnable affine."""

    def __init__(self, width, eps=1e-5):
        self.gamma = constant_parameter(1.0, (width,))
        self.beta = constant_parameter(0.0, (width,))
        self.eps = eps

    def __call__(self, x):
        return ops.layer_norm(x, self.gamma, self.beta, self.eps)


class PReLU(Module):

    def __init__(self, channels, axis=-1, init=0.25):
        self.alpha = constant_parameter(init, (channels,))
        self.axis = axis

    def __call__(self, x):
        return ops.prelu(x, self.alpha, self.axis)


class LSTM(Module):
    """Single-layer LSTM over axis 1 of (batch, steps, features)."""

    def __init__(self, rng, n_in, hidden):
        self.w_input = parameter(rng, (n_in, 4 * hidden), hidden)
        self.w_hidden = parameter(rng, (hidden, 4 * hidden), hidden)
        self.bias = parameter(rng, (4 * hidden,), hidden)
        self.hidden = hidden

    @property
    def weights(self):
        return LSTMWeights(self.w_input, self.w_hidden, self.bias)

    def __call__(self, xs, state=None, reverse=False):
        if state is not None and state[0].shape != (xs.shape[0], self.hidden):
            raise ShapeError(f'LSTM state {state[0].shape} does not fit batch {xs.shape[0]} x {self.hidden}')
        return lstm_sequence(xs, self.weights, state, reverse)
