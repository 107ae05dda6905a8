"""
图像质量指标
Image Quality Metrics

相对未受损的真值立方体 x 计算 MSE、PSNR 与 SSIM。
SSIM 按通道使用全局统计量（单窗口，无滑动窗口与高斯加权），再对通道取平均。
"""

import math
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from hypercube import HyperCube
from utils.exceptions import ShapeError, ValidationError

SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class MetricsPair:
    """真值 x 与测试 y（m×n×p，维度相同、取值有限）"""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim == 2:
            x = x[:, :, None]
        if y.ndim == 2:
            y = y[:, :, None]
        if x.ndim != 3 or x.shape != y.shape:
            raise ShapeError("真值与测试图像维度不一致", {'x': x.shape, 'y': y.shape})
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValidationError("指标输入包含非有限值")
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'y', y)

    @classmethod
    def of(cls, x: HyperCube, y: HyperCube) -> 'MetricsPair':
        return cls(x.data, y.data)

    @property
    def x_max(self) -> float:
        return float(np.max(self.x))


@dataclass(frozen=True)
class SsimConstants:
    """SSIM 稳定常数 c1 = (k1·L)², c2 = (k2·L)²"""

    c1: float
    c2: float

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValidationError("SSIM 常数必须为正", {'c1': self.c1, 'c2': self.c2})

    @classmethod
    def from_range(cls, dynamic_range: float, k1: float = SSIM_K1, k2: float = SSIM_K2) -> 'SsimConstants':
        return cls((k1 * dynamic_range) ** 2, (k2 * dynamic_range) ** 2)

    @classmethod
    def from_reference(cls, pair: MetricsPair) -> 'SsimConstants':
        """以真值最大值作为动态范围 L"""
        x_max = pair.x_max
        if x_max <= 0:
            raise ValidationError("真值最大值必须为正", {'x_max': x_max})
        return cls.from_range(x_max)


def mse(pair: MetricsPair) -> float:
    """所有通道上的均方误差"""
    return float(np.mean((pair.x - pair.y) ** 2))


def psnr(pair: MetricsPair) -> float:
    """
    峰值信噪比 10·log₁₀(x_max² / MSE)

    Returns:
        float: 分贝值；MSE 为 0 时返回 +inf

    Raises:
        ValidationError: x_max ≤ 0
    """
    x_max = pair.x_max
    if x_max <= 0:
        raise ValidationError("真值最大值必须为正", {'x_max': x_max})
    error = mse(pair)
    if error == 0:
        return math.inf
    return float(10 * np.log10(x_max ** 2 / error))


def ssim(pair: MetricsPair, consts: SsimConstants) -> float:
    """逐通道全局统计 SSIM 的通道平均"""
    n_channels = pair.x.shape[2]
    x = pair.x.reshape(-1, n_channels)
    y = pair.y.reshape(-1, n_channels)
    mu_x = x.mean(axis=0)
    mu_y = y.mean(axis=0)
    dx = x - mu_x
    dy = y - mu_y
    var_x = (dx * dx).mean(axis=0)
    var_y = (dy * dy).mean(axis=0)
    cov = (dx * dy).mean(axis=0)
    numerator = (2 * mu_x * mu_y + consts.c1) * (2 * cov + consts.c2)
    denominator = (mu_x ** 2 + mu_y ** 2 + consts.c1) * (var_x + var_y + consts.c2)
    per_channel = numerator / denominator
    return float(per_channel.mean())


def score(x: HyperCube, y: HyperCube) -> Dict[str, Any]:
    """
    计算完整指标记录

    Returns:
        Dict[str, Any]: mse、psnr、ssim 以及所用的 c1、c2、x_max
    """
    pair = MetricsPair.of(x, y)
    consts = SsimConstants.from_reference(pair)
    return {
        'mse': mse(pair),
        'psnr': psnr(pair),
        'ssim': ssim(pair, consts),
        'c1': consts.c1,
        'c2': consts.c2,
        'x_max': pair.x_max
    }
