"""
立方体基本操作
Cube Accessors

光谱裁剪与峰强度热图
"""

import numpy as np

from utils.exceptions import RangeError
from .cube import HyperCube


def crop_spectral(cube: HyperCube, lo: float, hi: float) -> HyperCube:
    """
    保留 lo ≤ axis[k] ≤ hi 的波段（闭区间）

    Args:
        cube: 输入立方体
        lo: 下限 (cm⁻¹)
        hi: 上限 (cm⁻¹)

    Returns:
        HyperCube: 裁剪后的立方体

    Raises:
        RangeError: lo ≥ hi、区间与波数轴不相交或保留波段少于 2 个
    """
    if not lo < hi:
        raise RangeError("裁剪区间无效：要求 lo < hi", {'lo': lo, 'hi': hi})
    keep = (cube.axis >= lo) & (cube.axis <= hi)
    count = int(keep.sum())
    if count < 2:
        raise RangeError(
            "裁剪后波段数不足 2",
            {'lo': lo, 'hi': hi, 'axis_min': float(cube.axis[0]),
             'axis_max': float(cube.axis[-1]), 'kept': count}
        )
    return cube.with_data(cube.data[:, :, keep], axis=cube.axis[keep])


def peak_intensity_map(cube: HyperCube, center: float, half_width: float) -> np.ndarray:
    """
    峰强度热图：窗口 [center − half_width, center + half_width] 内波段的平均强度

    Returns:
        np.ndarray: H×W 图像

    Raises:
        RangeError: 窗口内没有波段
    """
    window = (cube.axis >= center - half_width) & (cube.axis <= center + half_width)
    if not window.any():
        raise RangeError(
            "峰窗口内没有波段",
            {'center': center, 'half_width': half_width}
        )
    return cube.data[:, :, window].mean(axis=2)
