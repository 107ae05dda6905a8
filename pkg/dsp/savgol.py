"""
Savitzky-Golay 滤波
Savitzky-Golay Filtering

经典光谱平滑基线方法：局部多项式最小二乘拟合的卷积形式
"""

from dataclasses import dataclass
from typing import Iterable, List

import numpy as np
from scipy import ndimage

from hypercube import HyperCube, Spectrum
from utils.exceptions import ParamError

# 基准对比网格：阶数 1–5 × 窗宽 5–13
SG_ORDERS = (1, 2, 3, 4, 5)
SG_FRAMES = (5, 7, 9, 11, 13)


@dataclass(frozen=True)
class SgParams:
    """SG 参数：多项式阶数与窗宽（奇数，≥ 3，且 order < frame）"""

    order: int
    frame: int

    def validate(self) -> 'SgParams':
        if int(self.order) != self.order or self.order < 0:
            raise ParamError("多项式阶数必须为非负整数", {'order': self.order})
        if int(self.frame) != self.frame or self.frame < 3 or self.frame % 2 == 0:
            raise ParamError("窗宽必须为 ≥ 3 的奇数", {'frame': self.frame})
        if self.order >= self.frame:
            raise ParamError("多项式阶数必须小于窗宽", {'order': self.order, 'frame': self.frame})
        return self

    @property
    def label(self) -> str:
        return f"SG(order {self.order}, frame {self.frame})"


def sg_coefficients(params: SgParams) -> np.ndarray:
    """
    计算中心点卷积系数

    在窗口 [-m, m] 上做 order 阶多项式最小二乘拟合，取拟合多项式在 0 处的值
    对观测值的线性权重，即帽子矩阵的中心行 Q·Q[m]。Q 由归一化到 [-1, 1] 的
    Legendre 基 Vandermonde 矩阵做 QR 得到，高阶时仍保持数值稳定。

    Args:
        params: SG 参数

    Returns:
        np.ndarray: 长度为 frame 的权重，和为 1，左右对称

    Raises:
        ParamError: 参数无效
    """
    params.validate()
    half = params.frame // 2
    x = np.arange(-half, half + 1, dtype=np.float64) / half
    q, _ = np.linalg.qr(np.polynomial.legendre.legvander(x, params.order))
    weights = q @ q[half]
    # 数值对称化
    return 0.5 * (weights + weights[::-1])


def _filter_along_last(values: np.ndarray, params: SgParams) -> np.ndarray:
    if values.shape[-1] < params.frame:
        raise ParamError(
            "光谱长度小于 SG 窗宽",
            {'length': values.shape[-1], 'frame': params.frame}
        )
    weights = sg_coefficients(params)
    # mirror: 以端点为对称中心镜像（d c b | a b c d）
    return ndimage.correlate1d(values, weights, axis=-1, mode='mirror')


def sg_filter(spectrum: Spectrum, params: SgParams) -> Spectrum:
    """
    对单条光谱做 SG 平滑，边缘采用镜像填充

    Raises:
        ParamError: 参数无效或光谱短于窗宽
    """
    return spectrum.with_values(_filter_along_last(spectrum.values, params))


def sg_filter_cube(cube: HyperCube, params: SgParams) -> HyperCube:
    """逐像素沿波段方向做 SG 平滑"""
    return cube.with_data(_filter_along_last(cube.data, params))


def sg_grid(orders: Iterable[int] = SG_ORDERS, frames: Iterable[int] = SG_FRAMES) -> List[SgParams]:
    """生成有效的 (order, frame) 参数网格，按阶数再按窗宽排序"""
    return [
        SgParams(order, frame)
        for order in orders
        for frame in frames
        if order < frame
    ]
