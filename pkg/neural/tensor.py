"""
自动微分张量
Reverse-mode Autodiff Tensor

基于 numpy 的最小反向模式自动微分：每个运算结果记录父节点（_prev）与
反向传播闭包（_backward），backward() 按拓扑逆序累积梯度。
广播运算的梯度会按输入形状求和还原。
"""

import contextlib
from typing import Callable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from utils.exceptions import ShapeError

_GRAD_ENABLED = True


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """在上下文内不构建计算图（推理、验证用）"""
    global _GRAD_ENABLED
    previous = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = previous


def is_grad_enabled() -> bool:
    return _GRAD_ENABLED


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


ArrayLike = Union['Tensor', np.ndarray, float, int]


class Tensor:
    """带梯度的 n 维数组"""

    def __init__(self, data, requires_grad: bool = False):
        array = np.asarray(data)
        if not np.issubdtype(array.dtype, np.floating):
            array = array.astype(np.float32)
        self.data = array
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._backward: Callable[[], None] = lambda: None
        self._prev: Tuple['Tensor', ...] = ()

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> 'Tensor':
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    # 计算图

    def _accumulate(self, grad: np.ndarray) -> None:
        if not self.requires_grad:
            return
        grad = _unbroadcast(np.asarray(grad), self.shape).astype(self.dtype, copy=False)
        self.grad = grad if self.grad is None else self.grad + grad

    @staticmethod
    def _result(data: np.ndarray, parents: Sequence['Tensor'],
                backward: Callable[['Tensor'], None]) -> 'Tensor':
        needs_grad = _GRAD_ENABLED and any(p.requires_grad for p in parents)
        out = Tensor(data, requires_grad=needs_grad)
        if needs_grad:
            out._prev = tuple(parents)
            out._backward = lambda: backward(out)
        return out

    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        """从当前节点反向传播；未给出 grad 时以全 1 作为种子"""
        topo = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._prev:
                if id(parent) not in visited:
                    stack.append((parent, False))

        seed = np.ones_like(self.data) if grad is None else np.asarray(grad, dtype=self.dtype)
        if seed.shape != self.shape:
            raise ShapeError("种子梯度形状不一致", {'grad': seed.shape, 'tensor': self.shape})
        self.grad = seed if self.grad is None else self.grad + seed
        for node in reversed(topo):
            if node.grad is not None:
                node._backward()

    # 算术运算

    @staticmethod
    def lift(value: ArrayLike, like: Optional['Tensor'] = None) -> 'Tensor':
        if isinstance(value, Tensor):
            return value
        dtype = like.dtype if like is not None else None
        return Tensor(np.asarray(value, dtype=dtype))

    def __add__(self, other: ArrayLike) -> 'Tensor':
        other = Tensor.lift(other, self)

        def backward(out):
            self._accumulate(out.grad)
            other._accumulate(out.grad)
        return Tensor._result(self.data + other.data, (self, other), backward)

    __radd__ = __add__

    def __neg__(self) -> 'Tensor':
        def backward(out):
            self._accumulate(-out.grad)
        return Tensor._result(-self.data, (self,), backward)

    def __sub__(self, other: ArrayLike) -> 'Tensor':
        other = Tensor.lift(other, self)

        def backward(out):
            self._accumulate(out.grad)
            other._accumulate(-out.grad)
        return Tensor._result(self.data - other.data, (self, other), backward)

    def __rsub__(self, other: ArrayLike) -> 'Tensor':
        return Tensor.lift(other, self) - self

    def __mul__(self, other: ArrayLike) -> 'Tensor':
        other = Tensor.lift(other, self)

        def backward(out):
            self._accumulate(out.grad * other.data)
            other._accumulate(out.grad * self.data)
        return Tensor._result(self.data * other.data, (self, other), backward)

    __rmul__ = __mul__

    def __truediv__(self, other: ArrayLike) -> 'Tensor':
        other = Tensor.lift(other, self)

        def backward(out):
            self._accumulate(out.grad / other.data)
            other._accumulate(-out.grad * self.data / (other.data ** 2))
        return Tensor._result(self.data / other.data, (self, other), backward)

    def __rtruediv__(self, other: ArrayLike) -> 'Tensor':
        return Tensor.lift(other, self) / self

    def __matmul__(self, other: ArrayLike) -> 'Tensor':
        other = Tensor.lift(other, self)
        if self.ndim != 2 or other.ndim != 2 or self.shape[1] != other.shape[0]:
            raise ShapeError("矩阵乘法形状不匹配", {'a': self.shape, 'b': other.shape})

        def backward(out):
            self._accumulate(out.grad @ other.data.T)
            other._accumulate(self.data.T @ out.grad)
        return Tensor._result(self.data @ other.data, (self, other), backward)

    def sqrt(self) -> 'Tensor':
        value = np.sqrt(self.data)

        def backward(out):
            self._accumulate(out.grad * 0.5 / value)
        return Tensor._result(value, (self,), backward)

    # 归约与形状

    def sum(self, axis=None, keepdims: bool = False) -> 'Tensor':
        def backward(out):
            grad = out.grad
            if axis is not None and not keepdims:
                grad = np.expand_dims(grad, axis)
            self._accumulate(np.broadcast_to(grad, self.shape))
        return Tensor._result(self.data.sum(axis=axis, keepdims=keepdims), (self,), backward)

    def mean(self, axis=None, keepdims: bool = False) -> 'Tensor':
        axes = range(self.ndim) if axis is None else np.atleast_1d(axis)
        count = int(np.prod([self.shape[a] for a in axes]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    def reshape(self, *shape) -> 'Tensor':
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])

        def backward(out):
            self._accumulate(out.grad.reshape(self.shape))
        return Tensor._result(self.data.reshape(shape), (self,), backward)

    def transpose(self, *axes) -> 'Tensor':
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        axes = axes or tuple(reversed(range(self.ndim)))
        inverse = np.argsort(axes)

        def backward(out):
            self._accumulate(out.grad.transpose(inverse))
        return Tensor._result(self.data.transpose(axes), (self,), backward)

    @property
    def T(self) -> 'Tensor':
        return self.transpose()

    def __getitem__(self, index) -> 'Tensor':
        def backward(out):
            grad = np.zeros_like(self.data)
            np.add.at(grad, index, out.grad)
            self._accumulate(grad)
        return Tensor._result(self.data[index], (self,), backward)

    # 激活函数

    def relu(self) -> 'Tensor':
        mask = self.data > 0

        def backward(out):
            self._accumulate(out.grad * mask)
        return Tensor._result(np.where(mask, self.data, 0).astype(self.dtype), (self,), backward)

    def sigmoid(self) -> 'Tensor':
        value = 1.0 / (1.0 + np.exp(-self.data))

        def backward(out):
            self._accumulate(out.grad * value * (1.0 - value))
        return Tensor._result(value, (self,), backward)
