"""
非负最小二乘
Non-Negative Least Squares

Lawson-Hanson 有效集法：min ‖Ax − b‖₂  s.t. x ≥ 0，有限步终止
"""

import logging

import numpy as np

from utils.exceptions import ShapeError, ValidationError

logger = logging.getLogger(__name__)

GRAD_TOL = 1e-10


def _solve_passive(A: np.ndarray, b: np.ndarray, passive: np.ndarray) -> np.ndarray:
    z = np.zeros(A.shape[1])
    if passive.any():
        z[passive] = np.linalg.lstsq(A[:, passive], b, rcond=None)[0]
    return z


def nnls(A: np.ndarray, b: np.ndarray, tol: float = GRAD_TOL, max_iter: int = None) -> np.ndarray:
    """
    非负最小二乘求解

    Args:
        A: B×K 矩阵
        b: 长度 B 的向量
        tol: 梯度分量容差（按 ‖Aᵀb‖∞ 相对缩放）
        max_iter: 外层迭代上限（默认 5K + 10）

    Returns:
        np.ndarray: 长度 K 的非负解，满足 KKT 条件

    Raises:
        ValidationError: 输入包含非有限值
        ShapeError: 维度不匹配
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0] or A.shape[1] < 1:
        raise ShapeError("NNLS 维度不匹配", {'A_shape': A.shape, 'b_shape': b.shape})
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValidationError("NNLS 输入包含非有限值")

    n_vars = A.shape[1]
    max_iter = max_iter or 5 * n_vars + 10
    threshold = tol * float(np.abs(A.T @ b).max())

    x = np.zeros(n_vars)
    passive = np.zeros(n_vars, dtype=bool)
    # 因数值原因无法进入有效集的变量
    blocked = np.zeros(n_vars, dtype=bool)
    w = A.T @ (b - A @ x)

    for _ in range(max_iter):
        candidates = ~passive & ~blocked
        if not candidates.any() or w[candidates].max() <= threshold:
            break
        j = int(np.flatnonzero(candidates)[np.argmax(w[candidates])])
        passive[j] = True
        z = _solve_passive(A, b, passive)
        if z[j] <= 0:
            passive[j] = False
            blocked[j] = True
            continue

        # 内层循环：把变为非正的变量移回零集
        while passive.any() and z[passive].min() <= 0:
            mask = passive & (z <= 0)
            denom = x[mask] - z[mask]
            ratios = np.where(denom > 0, x[mask] / np.where(denom > 0, denom, 1.0), 0.0)
            step = int(np.argmin(ratios))
            x = x + ratios[step] * (z - x)
            x[np.flatnonzero(mask)[step]] = 0.0
            passive &= x > 0
            x[~passive] = 0.0
            z = _solve_passive(A, b, passive)

        x = z
        w = A.T @ (b - A @ x)
        blocked[:] = False
    else:
        logger.warning("NNLS 达到迭代上限，返回当前解")

    x[x < 0] = 0.0
    return x
