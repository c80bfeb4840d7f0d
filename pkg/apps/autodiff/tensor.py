"""
Dense float tensors with define-by-run reverse-mode differentiation.

Every operation on a tensor that requires gradients records its inputs and a
pullback on the output node. ``backward`` orders the recorded graph
topologically, visits each node once in reverse and accumulates gradients
into the leaves. The graph is consumed by the pass.
"""
import contextlib
import threading

import numpy as np

from apps.common.exceptions import ArgumentError

_local = threading.local()


def grad_enabled():
    return getattr(_local, 'enabled', True)


@contextlib.contextmanager
def no_grad():
    """Run operations without recording them."""
    previous = grad_enabled()
    _local.enabled = False
    try:
        yield
    finally:
        _local.enabled = previous


class Tensor:
    """
    An n-dimensional float64 array that can take part in differentiation.

    Leaves created with ``requires_grad=True`` carry a zero-initialized
    ``grad`` accumulator of the same shape.
    """

    __array_priority__ = 100
    __array_ufunc__ = None

    def __init__(self, data, requires_grad=False, name=None):
        self.data = np.array(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = np.zeros_like(self.data) if self.requires_grad else None
        self.name = name
        self._inputs = ()
        self._pullback = None

    @classmethod
    def from_op(cls, data, inputs, pullback):
        """
        Output node of an operation.

        Args:
            data: Forward value
            inputs: Input tensors, in pullback order
            pullback: Callable mapping the output gradient to one gradient
                (or None) per input
        """
        out = cls.__new__(cls)
        out.data = np.asarray(data, dtype=np.float64)
        out.grad = None
        out.name = None
        out.requires_grad = grad_enabled() and any(t.requires_grad for t in inputs)
        out._inputs = tuple(inputs) if out.requires_grad else ()
        out._pullback = pullback if out.requires_grad else None
        return out

    @property
    def is_leaf(self):
        return self._pullback is None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def numpy(self):
        return self.data

    def item(self):
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else self.data.item()

    def zero_grad(self):
        if self.requires_grad:
            self.grad = np.zeros_like(self.data)

    def detach(self):
        return Tensor(self.data)

    def backward(self):
        backward(self)

    def __repr__(self):
        flag = ', requires_grad=True' if self.requires_grad else ''
        return f'Tensor(shape={self.shape}{flag})'

    def __add__(self, other):
        return _ops().add(self, other)

    def __radd__(self, other):
        return _ops().add(other, self)

    def __sub__(self, other):
        return _ops().sub(self, other)

    def __rsub__(self, other):
        return _ops().sub(other, self)

    def __mul__(self, other):
        return _ops().mul(self, other)

    def __rmul__(self, other):
        return _ops().mul(other, self)

    def __truediv__(self, other):
        return _ops().div(self, other)

    def __rtruediv__(self, other):
        return _ops().div(other, self)

    def __neg__(self):
        return _ops().mul(self, -1.0)

    def __matmul__(self, other):
        return _ops().matmul(self, other)

    def __getitem__(self, index):
        return _ops().take(self, index)

    def reshape(self, shape):
        return _ops().reshape(self, shape)

    def transpose(self, axes):
        return _ops().transpose(self, axes)

    def sum(self, axis=None, keepdims=False):
        return _ops().sum(self, axis, keepdims)

    def mean(self, axis=None, keepdims=False):
        return _ops().mean(self, axis, keepdims)


def _ops():
    from apps.autodiff import ops
    return ops


def as_tensor(value):
    return value if isinstance(value, Tensor) else Tensor(value)


class Tape:
    """Recorded operations reachable from one output, in topological order."""

    def __init__(self, nodes):
        self.nodes = nodes

    def __len__(self):
        return len(self.nodes)

    @classmethod
    def record(cls, output):
        order, seen = [], set()
        stack = [(output, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._inputs:
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))
        return cls(order)

    def run(self, output, seed):
        grads = {id(output): seed}
        for node in reversed(self.nodes):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue
            if node.is_leaf:
                node.grad = node.grad + grad if node.grad is not None else grad.copy()
                continue
            for parent, parent_grad in zip(node._inputs, node._pullback(grad)):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = grads[key] + parent_grad if key in grads else parent_grad
        for node in self.nodes:
            if not node.is_leaf:
                node._inputs = ()
                node._pullback = None


def backward(loss):
    """
    Accumulate d(loss)/d(leaf) into every requires-grad leaf reachable from ``loss``.

    Raises:
        ArgumentError: If ``loss`` is not a scalar
    """
    if loss.size != 1:
        raise ArgumentError(f'backward needs a scalar loss, got shape {loss.shape}')
    if not loss.requires_grad:
        return
    tape = Tape.record(loss)
    tape.run(loss, np.ones_like(loss.data))
