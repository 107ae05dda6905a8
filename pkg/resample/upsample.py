"""
上采样基线方法
Upsampling Baselines

最近邻与双三次（Keys 核，a = −0.5）上采样。坐标映射左上对齐：
x_src = x_out / s，因此保留网格位置 (s·i, s·j) 精确映射到输入像素 (i, j)。
双三次结果不截断负的过冲。
"""

import logging
from typing import Optional

import numpy as np

from hypercube import HyperCube
from utils.exceptions import ShapeError
from .decimate import validate_scale

logger = logging.getLogger(__name__)

KEYS_A = -0.5


def keys_kernel(t: np.ndarray, a: float = KEYS_A) -> np.ndarray:
    """Keys 三次卷积核"""
    t = np.abs(np.asarray(t, dtype=np.float64))
    out = np.zeros_like(t)
    near = t <= 1
    far = (t > 1) & (t < 2)
    out[near] = (a + 2) * t[near] ** 3 - (a + 3) * t[near] ** 2 + 1
    out[far] = a * t[far] ** 3 - 5 * a * t[far] ** 2 + 8 * a * t[far] - 4 * a
    return out


def bicubic_weights(out_n: int, in_n: int, s: int) -> np.ndarray:
    """
    一维插值矩阵 M（out_n × in_n），输出 = M @ 输入；边缘像素钳位

    Returns:
        np.ndarray: 每行权重和为 1
    """
    matrix = np.zeros((out_n, in_n))
    for i in range(out_n):
        x = i / s
        base = int(np.floor(x))
        frac = x - base
        for tap in range(-1, 3):
            weight = float(keys_kernel(np.array([frac - tap]))[0])
            source = min(max(base + tap, 0), in_n - 1)
            matrix[i, source] += weight
    return matrix


def nearest_weights(out_n: int, in_n: int, s: int) -> np.ndarray:
    """最近邻插值矩阵：输出 i 取输入 floor(i/s)"""
    matrix = np.zeros((out_n, in_n))
    matrix[np.arange(out_n), np.arange(out_n) // s] = 1.0
    return matrix


def check_out_dims(cube: HyperCube, s: int, out_h: int, out_w: int) -> None:
    """输出尺寸须满足 (n − 1)·s < n_out ≤ n·s"""
    for name, n_in, n_out in (('height', cube.height, out_h), ('width', cube.width, out_w)):
        if not (n_in - 1) * s < n_out <= n_in * s:
            raise ShapeError(
                f"输出{name}与放大倍数不一致",
                {'input': n_in, 'output': n_out, 'scale': s}
            )


def _resolve_dims(cube: HyperCube, s: int, out_h: Optional[int], out_w: Optional[int]):
    out_h = cube.height * s if out_h is None else out_h
    out_w = cube.width * s if out_w is None else out_w
    check_out_dims(cube, s, out_h, out_w)
    return out_h, out_w


def _apply(cube: HyperCube, rows: np.ndarray, cols: np.ndarray, s: int) -> HyperCube:
    data = np.einsum('ip,jq,pqb->ijb', rows, cols, cube.data, optimize=True)
    return cube.with_data(data, meta=cube.meta.with_pitch(cube.meta.pixel_pitch / s))


def upsample_nearest(cube: HyperCube, s: int, out_h: Optional[int] = None,
                     out_w: Optional[int] = None) -> HyperCube:
    """
    最近邻上采样：输出像素 (i, j) = 输入像素 (floor(i/s), floor(j/s))

    Raises:
        ShapeError: 输出尺寸与 s·输入尺寸不一致
    """
    validate_scale(s)
    out_h, out_w = _resolve_dims(cube, s, out_h, out_w)
    rows = nearest_weights(out_h, cube.height, s)
    cols = nearest_weights(out_w, cube.width, s)
    return _apply(cube, rows, cols, s)


def upsample_bicubic(cube: HyperCube, s: int, out_h: Optional[int] = None,
                     out_w: Optional[int] = None) -> HyperCube:
    """
    双三次上采样（逐波段二维三次卷积，可分离实现）

    Raises:
        ShapeError: 输入小于 2×2 或输出尺寸不一致
    """
    validate_scale(s)
    if cube.height < 2 or cube.width < 2:
        raise ShapeError("双三次上采样要求输入至少 2×2", {'shape': cube.shape})
    out_h, out_w = _resolve_dims(cube, s, out_h, out_w)
    rows = bicubic_weights(out_h, cube.height, s)
    cols = bicubic_weights(out_w, cube.width, s)
    logger.debug(f"双三次上采样 {cube.shape[:2]} -> ({out_h}, {out_w})")
    return _apply(cube, rows, cols, s)
