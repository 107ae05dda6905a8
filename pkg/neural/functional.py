"""
函数式算子
Functional Operators

卷积（1D/2D，步长与零填充）、转置卷积、批归一化、亚像素重排、L1 损失等。
卷积按核偏移逐项累加：每个偏移对应一次通道维矩阵乘，前向与反向都写成
同样的形式，梯度由对应的 einsum 给出。
"""

from typing import Optional, Sequence

import numpy as np

from utils.exceptions import ShapeError
from .tensor import Tensor


def _check_conv(x: Tensor, w: Tensor, ndim: int, in_axis: int = 1) -> None:
    if x.ndim != ndim + 2 or w.ndim != ndim + 2:
        raise ShapeError("卷积输入或权重维度错误", {'x': x.shape, 'w': w.shape})
    if x.shape[1] != w.shape[in_axis]:
        raise ShapeError("卷积输入通道数与权重不一致", {'x': x.shape, 'w': w.shape})


def conv1d(x: Tensor, w: Tensor, b: Optional[Tensor] = None, stride: int = 1, padding: int = 0) -> Tensor:
    """
    一维互相关

    Args:
        x: (N, C, L) 输入
        w: (O, C, K) 权重
        b: (O,) 偏置
        stride: 步长
        padding: 两端零填充长度

    Returns:
        Tensor: (N, O, (L + 2p − K) // stride + 1)

    Raises:
        ShapeError: 形状不匹配或输出长度为 0
    """
    _check_conv(x, w, 1)
    n, _, length = x.shape
    k = w.shape[2]
    out_len = (length + 2 * padding - k) // stride + 1
    if out_len < 1:
        raise ShapeError("卷积输出长度为 0", {'length': length, 'kernel': k, 'padding': padding})
    xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding)))
    span = stride * (out_len - 1) + 1

    out = np.zeros((n, w.shape[0], out_len), dtype=np.result_type(x.dtype, w.dtype))
    for offset in range(k):
        out += np.einsum('ncl,oc->nol', xp[:, :, offset:offset + span:stride], w.data[:, :, offset])
    if b is not None:
        out += b.data[None, :, None]

    def backward(result):
        g = result.grad
        if x.requires_grad:
            gxp = np.zeros_like(xp)
            for offset in range(k):
                gxp[:, :, offset:offset + span:stride] += np.einsum('nol,oc->ncl', g, w.data[:, :, offset])
            x._accumulate(gxp[:, :, padding:padding + length])
        if w.requires_grad:
            gw = np.stack(
                [np.einsum('nol,ncl->oc', g, xp[:, :, offset:offset + span:stride]) for offset in range(k)],
                axis=2
            )
            w._accumulate(gw)
        if b is not None and b.requires_grad:
            b._accumulate(g.sum(axis=(0, 2)))

    parents = (x, w) if b is None else (x, w, b)
    return Tensor._result(out, parents, backward)


def conv2d(x: Tensor, w: Tensor, b: Optional[Tensor] = None, stride: int = 1, padding: int = 0) -> Tensor:
    """
    二维互相关

    Args:
        x: (N, C, H, W) 输入
        w: (O, C, KH, KW) 权重
        b: (O,) 偏置

    Returns:
        Tensor: (N, O, H', W')
    """
    _check_conv(x, w, 2)
    n, _, height, width = x.shape
    kh, kw = w.shape[2:]
    out_h = (height + 2 * padding - kh) // stride + 1
    out_w = (width + 2 * padding - kw) // stride + 1
    if out_h < 1 or out_w < 1:
        raise ShapeError("卷积输出尺寸为 0", {'x': x.shape, 'w': w.shape, 'padding': padding})
    xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    span_h = stride * (out_h - 1) + 1
    span_w = stride * (out_w - 1) + 1

    def window(array, i, j):
        return array[:, :, i:i + span_h:stride, j:j + span_w:stride]

    out = np.zeros((n, w.shape[0], out_h, out_w), dtype=np.result_type(x.dtype, w.dtype))
    for i in range(kh):
        for j in range(kw):
            out += np.einsum('nchw,oc->nohw', window(xp, i, j), w.data[:, :, i, j])
    if b is not None:
        out += b.data[None, :, None, None]

    def backward(result):
        g = result.grad
        if x.requires_grad:
            gxp = np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    window(gxp, i, j)[...] += np.einsum('nohw,oc->nchw', g, w.data[:, :, i, j])
            x._accumulate(gxp[:, :, padding:padding + height, padding:padding + width])
        if w.requires_grad:
            gw = np.zeros_like(w.data)
            for i in range(kh):
                for j in range(kw):
                    gw[:, :, i, j] = np.einsum('nohw,nchw->oc', g, window(xp, i, j))
            w._accumulate(gw)
        if b is not None and b.requires_grad:
            b._accumulate(g.sum(axis=(0, 2, 3)))

    parents = (x, w) if b is None else (x, w, b)
    return Tensor._result(out, parents, backward)


def conv_transpose1d(x: Tensor, w: Tensor, b: Optional[Tensor] = None, stride: int = 1) -> Tensor:
    """
    一维转置卷积（无填充）

    Args:
        x: (N, C, L) 输入
        w: (C, O, K) 权重

    Returns:
        Tensor: (N, O, (L − 1)·stride + K)
    """
    _check_conv(x, w, 1, in_axis=0)
    n, _, length = x.shape
    k = w.shape[2]
    out_len = (length - 1) * stride + k
    span = stride * (length - 1) + 1

    out = np.zeros((n, w.shape[1], out_len), dtype=np.result_type(x.dtype, w.dtype))
    for offset in range(k):
        out[:, :, offset:offset + span:stride] += np.einsum('ncl,co->nol', x.data, w.data[:, :, offset])
    if b is not None:
        out += b.data[None, :, None]

    def backward(result):
        g = result.grad
        if x.requires_grad:
            gx = np.zeros_like(x.data)
            for offset in range(k):
                gx += np.einsum('nol,co->ncl', g[:, :, offset:offset + span:stride], w.data[:, :, offset])
            x._accumulate(gx)
        if w.requires_grad:
            gw = np.stack(
                [np.einsum('ncl,nol->co', x.data, g[:, :, offset:offset + span:stride]) for offset in range(k)],
                axis=2
            )
            w._accumulate(gw)
        if b is not None and b.requires_grad:
            b._accumulate(g.sum(axis=(0, 2)))

    parents = (x, w) if b is None else (x, w, b)
    return Tensor._result(out, parents, backward)


def linear(x: Tensor, w: Tensor, b: Optional[Tensor] = None) -> Tensor:
    """全连接：x (N, I) · wᵀ (I, O) + b"""
    out = x @ w.T
    return out if b is None else out + b


def batch_norm(x: Tensor, gamma: Tensor, beta: Tensor, running_mean: np.ndarray,
               running_var: np.ndarray, training: bool, momentum: float = 0.1,
               eps: float = 1e-5) -> Tensor:
    """
    批归一化：按除通道轴（axis 1）外的所有轴统计

    训练模式使用批统计量（有偏方差）并原地更新滑动均值与无偏方差；
    评估模式使用滑动统计量。
    """
    axes = (0,) + tuple(range(2, x.ndim))
    view = (1, -1) + (1,) * (x.ndim - 2)
    if training:
        mean = x.mean(axis=axes, keepdims=True)
        centered = x - mean
        var = (centered * centered).mean(axis=axes, keepdims=True)
        count = x.data.size // x.shape[1]
        batch_var = var.data.reshape(-1) * (count / max(count - 1, 1))
        running_mean *= (1.0 - momentum)
        running_mean += momentum * mean.data.reshape(-1)
        running_var *= (1.0 - momentum)
        running_var += momentum * batch_var
        normalized = centered / (var + eps).sqrt()
    else:
        mean = running_mean.reshape(view).astype(x.dtype)
        std = np.sqrt(running_var.reshape(view) + eps).astype(x.dtype)
        normalized = (x - mean) / std
    return normalized * gamma.reshape(view) + beta.reshape(view)


def concat(tensors: Sequence[Tensor], axis: int = 1) -> Tensor:
    """沿 axis 拼接"""
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def backward(out):
        for t, start, stop in zip(tensors, bounds[:-1], bounds[1:]):
            index = [slice(None)] * out.grad.ndim
            index[axis] = slice(int(start), int(stop))
            t._accumulate(out.grad[tuple(index)])
    return Tensor._result(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward)


def pad_last(x: Tensor, left: int, right: int) -> Tensor:
    """最后一维两端零填充"""
    width = [(0, 0)] * (x.ndim - 1) + [(left, right)]
    length = x.shape[-1]

    def backward(out):
        x._accumulate(out.grad[..., left:left + length])
    return Tensor._result(np.pad(x.data, width), (x,), backward)


def pixel_shuffle(x: Tensor, r: int) -> Tensor:
    """
    亚像素重排：(N, C·r², H, W) → (N, C, H·r, W·r)

    Raises:
        ShapeError: 通道数不能被 r² 整除
    """
    n, channels, height, width = x.shape
    if channels % (r * r):
        raise ShapeError("通道数不能被 r² 整除", {'channels': channels, 'r': r})
    c = channels // (r * r)
    return (x.reshape(n, c, r, r, height, width)
             .transpose(0, 1, 4, 2, 5, 3)
             .reshape(n, c, height * r, width * r))


def pixel_unshuffle(x: Tensor, r: int) -> Tensor:
    """pixel_shuffle 的逆：(N, C, H·r, W·r) → (N, C·r², H, W)"""
    n, c, height, width = x.shape
    if height % r or width % r:
        raise ShapeError("空间尺寸不能被 r 整除", {'shape': x.shape, 'r': r})
    return (x.reshape(n, c, height // r, r, width // r, r)
             .transpose(0, 1, 3, 5, 2, 4)
             .reshape(n, c * r * r, height // r, width // r))


def upsample_nearest2d(x: Tensor, s: int) -> Tensor:
    """(N, C, H, W) 最近邻放大 s 倍"""
    n, c, height, width = x.shape
    value = np.repeat(np.repeat(x.data, s, axis=2), s, axis=3)

    def backward(out):
        x._accumulate(out.grad.reshape(n, c, height, s, width, s).sum(axis=(3, 5)))
    return Tensor._result(value, (x,), backward)


def l1_loss(pred: Tensor, target: Tensor) -> Tensor:
    """
    平均绝对误差；零点处次梯度取 0

    Raises:
        ShapeError: 形状不一致
    """
    if pred.shape != target.shape:
        raise ShapeError("预测与目标形状不一致", {'pred': pred.shape, 'target': target.shape})
    diff = pred.data - target.data
    count = diff.size

    def backward(out):
        g = out.grad * np.sign(diff) / count
        pred._accumulate(g)
        target._accumulate(-g)
    return Tensor._result(np.asarray(np.abs(diff).mean(), dtype=pred.dtype), (pred, target), backward)
