"""
丰度回归与像素分类
Abundance Regression and Pixel Classification

逐像素非负最小二乘回归端元丰度、按最大丰度分类并计算分类准确率
"""

import itertools
import logging
from typing import List, Tuple

import numpy as np
from joblib import Parallel, delayed

from hypercube import HyperCube
from utils.error_handlers import safe_execute
from utils.exceptions import ShapeError
from .nnls import nnls
from .types import AbundanceCube, EndmemberSet, LabelMap

logger = logging.getLogger(__name__)


def _nnls_rows(A: np.ndarray, rows: np.ndarray) -> np.ndarray:
    return np.array([nnls(A, row) for row in rows]).reshape(len(rows), A.shape[1])


def abundance_map(cube: HyperCube, ems: EndmemberSet, n_jobs: int = 1) -> AbundanceCube:
    """
    逐像素非负约束最小二乘丰度回归（不做和为一约束）

    Args:
        cube: 输入立方体
        ems: 端元集合（行数须等于波段数）
        n_jobs: 并行作业数；并行结果与顺序执行完全一致

    Returns:
        AbundanceCube: H×W×K 非负丰度

    Raises:
        ShapeError: 端元波段数与立方体不一致
    """
    if ems.bands != cube.bands:
        raise ShapeError("端元波段数与立方体不一致", {'endmember_bands': ems.bands, 'cube_bands': cube.bands})

    pixels = cube.pixels()
    A = ems.spectra
    if n_jobs == 1:
        values = _nnls_rows(A, pixels)
    else:
        chunks = np.array_split(pixels, max(1, min(len(pixels), 64)))
        parts = safe_execute(Parallel(n_jobs=n_jobs), (delayed(_nnls_rows)(A, chunk) for chunk in chunks),
                             error_message="并行丰度回归失败")
        values = np.concatenate(parts, axis=0)
    logger.info(f"丰度回归完成：{pixels.shape[0]} 个像素 × {ems.k} 个端元")
    return AbundanceCube(values.reshape(cube.height, cube.width, ems.k), ems.names)


def classify_pixels(ab: AbundanceCube) -> LabelMap:
    """按最大丰度分类，平局取最小索引"""
    return LabelMap(np.argmax(ab.values, axis=2), ab.k)


def classification_accuracy(pred: LabelMap, ref: LabelMap) -> float:
    """
    像素分类准确率

    Raises:
        ShapeError: 标签图尺寸不同
    """
    if pred.shape != ref.shape:
        raise ShapeError("标签图尺寸不同", {'pred': pred.shape, 'ref': ref.shape})
    return float(np.mean(pred.labels == ref.labels))


def spectral_angle(a: np.ndarray, b: np.ndarray) -> float:
    """两条光谱之间的夹角（弧度）"""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    cos = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
    return float(np.arccos(np.clip(cos, -1.0, 1.0)))


def match_endmembers(est: EndmemberSet, ref: EndmemberSet) -> Tuple[List[int], List[float]]:
    """
    穷举排列匹配端元（K ≤ 8），使光谱夹角之和最小

    Returns:
        Tuple[List[int], List[float]]: perm[i] 为与参考端元 i 匹配的估计端元索引，及对应夹角
    """
    if est.k != ref.k or est.bands != ref.bands:
        raise ShapeError("端元集合尺寸不一致", {'est': est.spectra.shape, 'ref': ref.spectra.shape})
    angles = np.array([
        [spectral_angle(est.spectra[:, j], ref.spectra[:, i]) for j in range(est.k)]
        for i in range(ref.k)
    ])
    best = min(
        itertools.permutations(range(est.k)),
        key=lambda perm: sum(angles[i, perm[i]] for i in range(ref.k))
    )
    return list(best), [float(angles[i, best[i]]) for i in range(ref.k)]
