"""
Differentiable operations.

Each function computes its forward value with numpy and attaches a pullback
returning one gradient per input. Binary elementwise operations broadcast
with numpy rules; the gradient of a broadcast operand is summed back over
the broadcast axes.
"""
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import special

from apps.common.exceptions import ArgumentError, ShapeError

from .tensor import Tensor, as_tensor

LOG_FLOOR = 1e-12


def unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` over the axes numpy broadcast."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_shape(a, b):
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError as exc:
        raise ShapeError(f'cannot broadcast {a.shape} with {b.shape}') from exc


def add(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b)
    return Tensor.from_op(a.data + b.data, (a, b), lambda g: (unbroadcast(g, a.shape), unbroadcast(g, b.shape)))


def sub(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b)
    return Tensor.from_op(a.data - b.data, (a, b), lambda g: (unbroadcast(g, a.shape), unbroadcast(-g, b.shape)))


def mul(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b)

    def pullback(g):
        return unbroadcast(g * b.data, a.shape), unbroadcast(g * a.data, b.shape)

    return Tensor.from_op(a.data * b.data, (a, b), pullback)


def div(a, b):
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b)
    out = a.data / b.data

    def pullback(g):
        return unbroadcast(g / b.data, a.shape), unbroadcast(-g * out / b.data, b.shape)

    return Tensor.from_op(out, (a, b), pullback)


def matmul(a, b):
    """Matrix product over the last two axes, broadcasting leading axes."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(f'matmul needs at least 2-D operands, got {a.shape} and {b.shape}')
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f'matmul inner dimensions differ: {a.shape} @ {b.shape}')
    try:
        out = a.data @ b.data
    except ValueError as exc:
        raise ShapeError(str(exc)) from exc

    def pullback(g):
        grad_a = g @ np.swapaxes(b.data, -1, -2)
        grad_b = np.swapaxes(a.data, -1, -2) @ g
        return unbroadcast(grad_a, a.shape), unbroadcast(grad_b, b.shape)

    return Tensor.from_op(out, (a, b), pullback)


def sigmoid(x):
    x = as_tensor(x)
    out = special.expit(x.data)
    return Tensor.from_op(out, (x,), lambda g: (g * out * (1.0 - out),))


def tanh(x):
    x = as_tensor(x)
    out = np.tanh(x.data)
    return Tensor.from_op(out, (x,), lambda g: (g * (1.0 - out ** 2),))


def abs(x):
    x = as_tensor(x)
    return Tensor.from_op(np.abs(x.data), (x,), lambda g: (g * np.sign(x.data),))


def log10_safe(x, floor=LOG_FLOOR):
    """log10 of max(x, floor); no gradient flows where x is below the floor."""
    x = as_tensor(x)
    live = x.data > floor
    clipped = np.where(live, x.data, floor)

    def pullback(g):
        return (np.where(live, g / (clipped * np.log(10.0)), 0.0),)

    return Tensor.from_op(np.log10(clipped), (x,), pullback)


def clip(x, low, high):
    x = as_tensor(x)
    inside = (x.data >= low) & (x.data <= high)
    return Tensor.from_op(np.clip(x.data, low, high), (x,), lambda g: (np.where(inside, g, 0.0),))


def _expand_reduced(g, shape, axis, keepdims):
    if axis is not None and not keepdims:
        axes = (axis,) if np.isscalar(axis) else tuple(axis)
        axes = tuple(a % len(shape) for a in axes)
        g = np.expand_dims(g, axes)
    return np.broadcast_to(g, shape)


def sum(x, axis=None, keepdims=False):
    x = as_tensor(x)
    out = x.data.sum(axis=axis, keepdims=keepdims)
    return Tensor.from_op(out, (x,), lambda g: (_expand_reduced(g, x.shape, axis, keepdims).copy(),))


def mean(x, axis=None, keepdims=False):
    x = as_tensor(x)
    out = x.data.mean(axis=axis, keepdims=keepdims)
    count = x.size / max(out.size, 1)
    return Tensor.from_op(out, (x,), lambda g: (_expand_reduced(g, x.shape, axis, keepdims) / count,))


def reshape(x, shape):
    x = as_tensor(x)
    try:
        out = x.data.reshape(shape)
    except ValueError as exc:
        raise ShapeError(f'cannot reshape {x.shape} to {shape}') from exc
    return Tensor.from_op(out, (x,), lambda g: (g.reshape(x.shape),))


def transpose(x, axes):
    x = as_tensor(x)
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    return Tensor.from_op(np.transpose(x.data, axes), (x,), lambda g: (np.transpose(g, inverse),))


def _is_basic(index):
    parts = index if isinstance(index, tuple) else (index,)
    return all(p is None or p is Ellipsis or isinstance(p, (int, np.integer, slice)) for p in parts)


def take(x, index):
    """Basic or advanced indexing; repeated positions accumulate in the gradient."""
    x = as_tensor(x)
    out = np.array(x.data[index])
    basic = _is_basic(index)

    def pullback(g):
        grad = np.zeros_like(x.data)
        if basic:
            grad[index] += g
        else:
            np.add.at(grad, index, g)
        return (grad,)

    return Tensor.from_op(out, (x,), pullback)


def concat(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise ShapeError(str(exc)) from exc
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]
    return Tensor.from_op(out, tensors, lambda g: tuple(np.split(g, bounds, axis=axis)))


def stack(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    try:
        out = np.stack([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise ShapeError(str(exc)) from exc
    return Tensor.from_op(out, tensors, lambda g: tuple(np.take(g, i, axis=axis) for i in range(len(tensors))))


def prelu(x, alpha, axis=-1):
    """
    Parametric ReLU with one learnable slope per channel along ``axis``.

    At x == 0 the gradient takes the positive-side slope.
    """
    x, alpha = as_tensor(x), as_tensor(alpha)
    axis = axis % x.ndim
    if alpha.shape != (x.shape[axis],):
        raise ShapeError(f'prelu slopes {alpha.shape} do not match {x.shape[axis]} channels on axis {axis}')
    view = [1] * x.ndim
    view[axis] = -1
    slope = alpha.data.reshape(view)
    positive = x.data >= 0
    out = np.where(positive, x.data, slope * x.data)
    reduce_axes = tuple(a for a in range(x.ndim) if a != axis)

    def pullback(g):
        grad_x = np.where(positive, g, g * slope)
        grad_alpha = np.where(positive, 0.0, g * x.data).sum(axis=reduce_axes)
        return grad_x, grad_alpha

    return Tensor.from_op(out, (x, alpha), pullback)


def layer_norm(x, gamma=None, beta=None, eps=1e-5):
    """
    Normalize over the last axis, then apply the optional affine ``gamma``, ``beta``.
    """
    x = as_tensor(x)
    width = x.shape[-1]
    for param in (gamma, beta):
        if param is not None and as_tensor(param).shape != (width,):
            raise ShapeError(f'layer norm affine must be ({width},), got {as_tensor(param).shape}')
    centred = x.data - x.data.mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt((centred ** 2).mean(axis=-1, keepdims=True) + eps)
    normed = centred * inv_std

    gamma_t = as_tensor(gamma) if gamma is not None else None
    beta_t = as_tensor(beta) if beta is not None else None
    scale = gamma_t.data if gamma_t is not None else 1.0
    out = normed * scale + (beta_t.data if beta_t is not None else 0.0)
    lead = tuple(range(x.ndim - 1))

    def pullback(g):
        g_normed = g * scale
        grad_x = inv_std * (
            g_normed
            - g_normed.mean(axis=-1, keepdims=True)
            - normed * (g_normed * normed).mean(axis=-1, keepdims=True)
        )
        grads = [grad_x]
        if gamma_t is not None:
            grads.append((g * normed).sum(axis=lead))
        if beta_t is not None:
            grads.append(g.sum(axis=lead))
        return tuple(grads)

    inputs = (x,) + tuple(t for t in (gamma_t, beta_t) if t is not None)
    return Tensor.from_op(out, inputs, pullback)


def _pair(value):
    return (value, value) if np.isscalar(value) else tuple(value)


def _positions(start, stride, count):
    return slice(start, start + stride * (count - 1) + 1, stride)


def conv1d(x, weight, bias=None, stride=1, padding=0):
    """
    1-D cross-correlation.

    Args:
        x: (batch, in_channels, length)
        weight: (out_channels, in_channels, kernel)
        bias: Optional (out_channels,)
    """
    x, weight = as_tensor(x), as_tensor(weight)
    if x.ndim != 3 or weight.ndim != 3 or x.shape[1] != weight.shape[1]:
        raise ShapeError(f'conv1d input {x.shape} does not match weight {weight.shape}')
    kernel = weight.shape[2]
    length = x.shape[2]
    out_len = (length + 2 * padding - kernel) // stride + 1
    if out_len < 1:
        raise ShapeError(f'conv1d kernel {kernel} is longer than padded input {length + 2 * padding}')
    padded = np.pad(x.data, ((0, 0), (0, 0), (padding, padding)))
    windows = sliding_window_view(padded, kernel, axis=2)[:, :, ::stride][:, :, :out_len]
    out = np.einsum('bclk,ock->bol', windows, weight.data, optimize=True)
    bias_t = as_tensor(bias) if bias is not None else None
    if bias_t is not None:
        out = out + bias_t.data[:, np.newaxis]

    def pullback(g):
        grad_w = np.einsum('bol,bclk->ock', g, windows, optimize=True)
        grad_windows = np.einsum('bol,ock->bclk', g, weight.data, optimize=True)
        grad_padded = np.zeros_like(padded)
        for k in range(kernel):
            grad_padded[:, :, _positions(k, stride, out_len)] += grad_windows[..., k]
        grads = [grad_padded[:, :, padding:padding + length], grad_w]
        if bias_t is not None:
            grads.append(g.sum(axis=(0, 2)))
        return tuple(grads)

    inputs = (x, weight) + ((bias_t,) if bias_t is not None else ())
    return Tensor.from_op(out, inputs, pullback)


def conv2d(x, weight, bias=None, stride=1, padding=0):
    """
    2-D cross-correlation.

    Args:
        x: (batch, in_channels, height, width)
        weight: (out_channels, in_channels, kernel_h, kernel_w)
        stride, padding: int or (h, w) pair
    """
    x, weight = as_tensor(x), as_tensor(weight)
    if x.ndim != 4 or weight.ndim != 4 or x.shape[1] != weight.shape[1]:
        raise ShapeError(f'conv2d input {x.shape} does not match weight {weight.shape}')
    (sh, sw), (ph, pw) = _pair(stride), _pair(padding)
    kh, kw = weight.shape[2:]
    height, width = x.shape[2:]
    out_h = (height + 2 * ph - kh) // sh + 1
    out_w = (width + 2 * pw - kw) // sw + 1
    if out_h < 1 or out_w < 1:
        raise ShapeError(f'conv2d kernel {(kh, kw)} exceeds padded input {(height + 2 * ph, width + 2 * pw)}')
    padded = np.pad(x.data, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    windows = sliding_window_view(padded, (kh, kw), axis=(2, 3))[:, :, ::sh, ::sw][:, :, :out_h, :out_w]
    out = np.einsum('bchwij,ocij->bohw', windows, weight.data, optimize=True)
    bias_t = as_tensor(bias) if bias is not None else None
    if bias_t is not None:
        out = out + bias_t.data[:, np.newaxis, np.newaxis]

    def pullback(g):
        grad_w = np.einsum('bohw,bchwij->ocij', g, windows, optimize=True)
        grad_windows = np.einsum('bohw,ocij->bchwij', g, weight.data, optimize=True)
        grad_padded = np.zeros_like(padded)
        for i in range(kh):
            for j in range(kw):
                grad_padded[:, :, _positions(i, sh, out_h), _positions(j, sw, out_w)] += grad_windows[..., i, j]
        grads = [grad_padded[:, :, ph:ph + height, pw:pw + width], grad_w]
        if bias_t is not None:
            grads.append(g.sum(axis=(0, 2, 3)))
        return tuple(grads)

    inputs = (x, weight) + ((bias_t,) if bias_t is not None else ())
    return Tensor.from_op(out, inputs, pullback)


def conv_transpose2d(x, weight, bias=None, stride=1, padding=0, output_padding=0):
    """
    Transposed 2-D convolution, the adjoint of ``conv2d`` in its input.

    Args:
        x: (batch, in_channels, height, width)
        weight: (in_channels, out_channels, kernel_h, kernel_w)

    Output size per axis is (n - 1) * stride - 2 * padding + kernel + output_padding.
    """
    x, weight = as_tensor(x), as_tensor(weight)
    if x.ndim != 4 or weight.ndim != 4 or x.shape[1] != weight.shape[0]:
        raise ShapeError(f'conv_transpose2d input {x.shape} does not match weight {weight.shape}')
    (sh, sw), (ph, pw), (oh, ow) = _pair(stride), _pair(padding), _pair(output_padding)
    if oh >= sh and oh > 0 or ow >= sw and ow > 0:
        raise ArgumentError(f'output padding {(oh, ow)} must be smaller than stride {(sh, sw)}')
    kh, kw = weight.shape[2:]
    height, width = x.shape[2:]
    full_h = (height - 1) * sh + kh + oh
    full_w = (width - 1) * sw + kw + ow
    if full_h - 2 * ph < 1 or full_w - 2 * pw < 1:
        raise ShapeError(f'conv_transpose2d padding {(ph, pw)} removes the whole output')
    full = np.zeros((x.shape[0], weight.shape[1], full_h, full_w))
    for i in range(kh):
        for j in range(kw):
            full[:, :, _positions(i, sh, height), _positions(j, sw, width)] += np.einsum(
                'bchw,co->bohw', x.data, weight.data[:, :, i, j], optimize=True)
    out = full[:, :, ph:full_h - ph, pw:full_w - pw]
    bias_t = as_tensor(bias) if bias is not None else None
    if bias_t is not None:
        out = out + bias_t.data[:, np.newaxis, np.newaxis]

    def pullback(g):
        g_full = np.zeros_like(full)
        g_full[:, :, ph:full_h - ph, pw:full_w - pw] = g
        grad_x = np.zeros_like(x.data)
        grad_w = np.zeros_like(weight.data)
        for i in range(kh):
            for j in range(kw):
                g_ij = g_full[:, :, _positions(i, sh, height), _positions(j, sw, width)]
                grad_x += np.einsum('bohw,co->bchw', g_ij, weight.data[:, :, i, j], optimize=True)
                grad_w[:, :, i, j] = np.einsum('bchw,bohw->co', x.data, g_ij, optimize=True)
        grads = [grad_x, grad_w]
        if bias_t is not None:
            grads.append(g.sum(axis=(0, 2, 3)))
        return tuple(grads)

    inputs = (x, weight) + ((bias_t,) if bias_t is not None else ())
    return Tensor.from_op(np.ascontiguousarray(out), inputs, pullback)


def overlap_add(frames, hop):
    """
    Sum (frames, width) rows into one signal, row t starting at t * hop.
    """
    frames = as_tensor(frames)
    if frames.ndim != 2:
        raise ShapeError(f'overlap_add needs (frames, width), got {frames.shape}')
    count, width = frames.shape
    total = (count - 1) * hop + width
    index = (np.arange(count) * hop)[:, np.newaxis] + np.arange(width)
    out = np.zeros(total)
    np.add.at(out, index.ravel(), frames.data.ravel())
    return Tensor.from_op(out, (frames,), lambda g: (g[index],))
