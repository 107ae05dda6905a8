"""
顶点成分分析
Vertex Component Analysis

按 Nascimento & Bioucas-Dias 的 VCA 算法提取端元：先估计信噪比选择投影方式
（低信噪比投影到 K−1 维仿射子空间，否则做 K 维射影投影），再迭代地沿与已选端元
正交的随机方向寻找投影极值像素。随机性只来自方向向量，由种子生成器提供。
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from hypercube import HyperCube
from utils.exceptions import ParamError, RankError
from .types import EndmemberSet

logger = logging.getLogger(__name__)


def _estimate_snr(Y: np.ndarray, mean: np.ndarray, x_p: np.ndarray) -> float:
    bands, n_pixels = Y.shape
    k = x_p.shape[0]
    p_y = np.sum(Y ** 2) / n_pixels
    p_x = np.sum(x_p ** 2) / n_pixels + np.sum(mean ** 2)
    noise = p_y - p_x
    signal = p_x - k / bands * p_y
    if noise <= np.finfo(float).eps * p_y:
        return math.inf
    if signal <= 0:
        return -math.inf
    return 10 * math.log10(signal / noise)


def vca_indices(Y: np.ndarray, k: int, rng: np.random.Generator,
                snr_input: Optional[float] = None) -> Tuple[List[int], np.ndarray]:
    """
    VCA 核心：在 B×N 数据矩阵上选出 k 个纯像素

    Args:
        Y: B×N 数据矩阵（列为像素光谱）
        k: 端元数
        rng: 随机方向生成器
        snr_input: 已知信噪比 (dB)，None 时自动估计

    Returns:
        Tuple[List[int], np.ndarray]: (像素索引, 投影回 B 维的数据 Yp)
    """
    bands, n_pixels = Y.shape
    mean = Y.mean(axis=1, keepdims=True)
    centered = Y - mean
    u_k = np.linalg.svd(centered @ centered.T / n_pixels)[0][:, :k]
    x_p = u_k.T @ centered

    snr = _estimate_snr(Y, mean, x_p) if snr_input is None else snr_input
    snr_threshold = 15 + 10 * math.log10(k)
    logger.debug(f"VCA 信噪比估计 {snr:.2f} dB（阈值 {snr_threshold:.2f} dB）")

    if snr < snr_threshold:
        # 投影到 k−1 维仿射子空间
        d = k - 1
        u_d = u_k[:, :d]
        x = x_p[:d, :]
        Yp = u_d @ x + mean
        c = math.sqrt(float(np.max(np.sum(x ** 2, axis=0)))) if d > 0 else 1.0
        y = np.vstack([x, c * np.ones((1, n_pixels))])
    else:
        # 射影投影
        u_d = np.linalg.svd(Y @ Y.T / n_pixels)[0][:, :k]
        x = u_d.T @ Y
        Yp = u_d @ x
        u = x.mean(axis=1)
        denom = u @ x
        denom = np.where(np.abs(denom) > 0, denom, np.finfo(float).tiny)
        y = x / denom

    indices: List[int] = []
    A = np.zeros((k, k))
    A[-1, 0] = 1.0
    for i in range(k):
        w = rng.random((k, 1))
        f = w - A @ np.linalg.pinv(A) @ w
        norm = np.linalg.norm(f)
        if norm <= np.finfo(float).eps:
            f = w
            norm = np.linalg.norm(f)
        f = f / norm
        v = (f.T @ y).ravel()
        index = int(np.argmax(np.abs(v)))
        indices.append(index)
        A[:, i] = y[:, index]
    return indices, Yp


def vca(cube: HyperCube, k: int, seed: int = 0) -> EndmemberSet:
    """
    顶点成分分析端元提取

    Args:
        cube: 输入立方体
        k: 端元数（需要用户给定）
        seed: 随机方向种子

    Returns:
        EndmemberSet: k 个端元（投影数据中选出的极值像素）

    Raises:
        ParamError: k 超出 [1, min(B, H·W)]
        RankError: 数据秩小于 k
    """
    Y = cube.pixels().T
    bands, n_pixels = Y.shape
    if not 1 <= k <= min(bands, n_pixels):
        raise ParamError("端元数超出范围", {'k': k, 'bands': bands, 'pixels': n_pixels})
    rank = int(np.linalg.matrix_rank(Y))
    if rank < k:
        raise RankError("数据秩小于端元数", {'rank': rank, 'k': k})

    rng = np.random.default_rng(seed)
    indices, Yp = vca_indices(Y, k, rng)
    logger.info(f"VCA 完成：k={k}，纯像素索引 {indices}")
    names = [f"vca_{i}" for i in range(k)]
    return EndmemberSet(Yp[:, indices], names)
