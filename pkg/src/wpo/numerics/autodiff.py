"""Reverse-mode automatic differentiation on dense numpy arrays.

A GradientTape records every derived Tensor in creation order, which is a
valid topological order of the computation graph. backward() replays the
tape in reverse and accumulates vector-Jacobian products into the leaves.

The primitive set is deliberately small (add/sub/mul, matmul, tanh, relu,
square, reductions, reshape, transpose, row gather); the models built on
top of it stay within a few tens of thousands of parameters, so a dynamic
tape is fast enough and keeps the gradient machinery fully testable.
"""

from __future__ import annotations

import numpy as np


class NumericsError(ValueError):
    """Contract violation inside the numerics layer."""


def _reduce_to(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, (g, s) in enumerate(zip(grad.shape, shape)) if s == 1 and g != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    """Node in the computation graph; wraps a float64 ndarray."""

    __slots__ = ("data", "tape", "is_leaf", "parents", "vjps")

    def __init__(self, data, tape=None, is_leaf=False, parents=(), vjps=()):
        self.data = np.asarray(data, dtype=np.float64)
        self.tape = tape
        self.is_leaf = is_leaf
        self.parents = parents
        self.vjps = vjps
        if tape is not None:
            tape._nodes.append(self)
            if is_leaf:
                tape._leaves.append(self)

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"Tensor(shape={self.data.shape}, leaf={self.is_leaf})"

    # operator sugar; constants (plain arrays / floats) are lifted tape-free
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)


class GradientTape:
    """Single-writer record of primitive operations.

    Not safe to share while recording; the resulting tensors are immutable
    and may be read concurrently.
    """

    def __init__(self):
        self._nodes = []
        self._leaves = []

    def leaf(self, data) -> Tensor:
        """Register a differentiable input (parameters, watched features)."""
        arr = np.asarray(data, dtype=np.float64)
        if not np.isfinite(arr).all():
            raise NumericsError("leaf tensor contains non-finite entries")
        return Tensor(arr, tape=self, is_leaf=True)

    @property
    def nodes(self):
        return tuple(self._nodes)

    @property
    def leaves(self):
        return tuple(self._leaves)


def constant(data) -> Tensor:
    """Tensor that participates in the graph but receives no gradient."""
    return Tensor(data)


def _lift(x) -> Tensor:
    return x if isinstance(x, Tensor) else constant(x)


def _merge_tape(a: Tensor, b: Tensor):
    if a.tape is not None and b.tape is not None and a.tape is not b.tape:
        raise NumericsError("operands recorded on different tapes")
    return a.tape if a.tape is not None else b.tape


def add(a, b) -> Tensor:
    a, b = _lift(a), _lift(b)
    out = a.data + b.data
    return Tensor(out, _merge_tape(a, b), parents=(a, b),
                  vjps=(lambda g: _reduce_to(g, a.data.shape),
                        lambda g: _reduce_to(g, b.data.shape)))


def sub(a, b) -> Tensor:
    a, b = _lift(a), _lift(b)
    out = a.data - b.data
    return Tensor(out, _merge_tape(a, b), parents=(a, b),
                  vjps=(lambda g: _reduce_to(g, a.data.shape),
                        lambda g: _reduce_to(-g, b.data.shape)))


def mul(a, b) -> Tensor:
    a, b = _lift(a), _lift(b)
    out = a.data * b.data
    return Tensor(out, _merge_tape(a, b), parents=(a, b),
                  vjps=(lambda g: _reduce_to(g * b.data, a.data.shape),
                        lambda g: _reduce_to(g * a.data, b.data.shape)))


def matmul(a, b) -> Tensor:
    """Matrix product; supports stacked (batched) operands via numpy @."""
    a, b = _lift(a), _lift(b)
    if a.data.ndim < 2 or b.data.ndim < 2:
        raise NumericsError("matmul requires operands with ndim >= 2")
    out = a.data @ b.data

    def g_a(g):
        return _reduce_to(g @ np.swapaxes(b.data, -1, -2), a.data.shape)

    def g_b(g):
        return _reduce_to(np.swapaxes(a.data, -1, -2) @ g, b.data.shape)

    return Tensor(out, _merge_tape(a, b), parents=(a, b), vjps=(g_a, g_b))


def tanh(x) -> Tensor:
    x = _lift(x)
    out = np.tanh(x.data)
    return Tensor(out, x.tape, parents=(x,), vjps=(lambda g: g * (1.0 - out * out),))


def relu(x) -> Tensor:
    x = _lift(x)
    mask = x.data > 0
    return Tensor(x.data * mask, x.tape, parents=(x,), vjps=(lambda g: g * mask,))


def square(x) -> Tensor:
    x = _lift(x)
    return Tensor(x.data * x.data, x.tape, parents=(x,),
                  vjps=(lambda g: 2.0 * x.data * g,))


def tsum(x) -> Tensor:
    """Full reduction to a scalar."""
    x = _lift(x)
    return Tensor(x.data.sum(), x.tape, parents=(x,),
                  vjps=(lambda g: np.broadcast_to(g, x.data.shape).copy(),))


def tmean(x) -> Tensor:
    x = _lift(x)
    n = x.data.size
    return Tensor(x.data.mean(), x.tape, parents=(x,),
                  vjps=(lambda g: np.broadcast_to(g / n, x.data.shape).copy(),))


def reshape(x, shape) -> Tensor:
    x = _lift(x)
    shape = tuple(shape)
    return Tensor(x.data.reshape(shape), x.tape, parents=(x,),
                  vjps=(lambda g: g.reshape(x.data.shape),))


def transpose(x) -> Tensor:
    """Swap the last two axes."""
    x = _lift(x)
    return Tensor(np.swapaxes(x.data, -1, -2), x.tape, parents=(x,),
                  vjps=(lambda g: np.swapaxes(g, -1, -2),))


def take_rows(x, indices) -> Tensor:
    """Gather rows along axis -2 (node axis for graph feature matrices)."""
    x = _lift(x)
    idx = np.asarray(indices, dtype=np.intp)
    out = x.data[..., idx, :]

    def g_x(g):
        full = np.zeros_like(x.data)
        np.add.at(full, (..., idx, slice(None)), g)
        return full

    return Tensor(out, x.tape, parents=(x,), vjps=(g_x,))


def backward(tape: GradientTape, output: Tensor) -> dict:
    """Gradient of a scalar output w.r.t. every leaf on the tape.

    Leaves that do not influence the output get a zero gradient of their
    own shape. Raises NumericsError if the output is not scalar.
    """
    if output.data.size != 1:
        raise NumericsError("backward requires a scalar output node")
    if output.tape is not tape:
        raise NumericsError("output was not recorded on this tape")
    grads = {id(output): np.ones_like(output.data)}
    for node in reversed(tape._nodes):
        g = grads.pop(id(node), None)
        if g is None or node.is_leaf:
            if g is not None:
                grads[id(node)] = g  # keep leaf grads for the result
            continue
        for parent, vjp in zip(node.parents, node.vjps):
            if parent.tape is None:
                continue  # constant, no gradient needed
            contrib = vjp(g)
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + contrib
            else:
                grads[key] = contrib
    return {leaf: grads.get(id(leaf), np.zeros_like(leaf.data)) for leaf in tape._leaves}


def finite_diff_check(f, x, step: float) -> float:
    """Max relative error between tape gradients and central differences.

    `f` maps a Tensor to a scalar Tensor using only primitives from this
    module. Relative error per coordinate is
    ``|analytic - central| / (|analytic| + 1e-12)``.
    """
    if step <= 0:
        raise NumericsError("step must be positive")
    x = np.asarray(x, dtype=np.float64)
    tape = GradientTape()
    xt = tape.leaf(x)
    out = f(xt)
    if out.data.size != 1:
        raise NumericsError("f must return a scalar")
    if not np.isfinite(out.data).all():
        raise NumericsError("non-finite function value at x")
    analytic = backward(tape, out)[xt]

    central = np.empty_like(x)
    flat = x.reshape(-1)
    for i in range(flat.size):
        bump = np.zeros_like(flat)
        bump[i] = step
        hi = f(constant((flat + bump).reshape(x.shape))).data.item()
        lo = f(constant((flat - bump).reshape(x.shape))).data.item()
        if not (np.isfinite(hi) and np.isfinite(lo)):
            raise NumericsError("non-finite function value during differencing")
        central.reshape(-1)[i] = (hi - lo) / (2.0 * step)

    rel = np.abs(analytic - central) / (np.abs(analytic) + 1e-12)
    return float(rel.max())
