"""
基线估计
Baseline Estimation

非对称最小二乘（ALS）平滑基线，用于扣除自发荧光背景
"""

from dataclasses import dataclass
import logging

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import spsolve

from hypercube import HyperCube, Spectrum
from utils.exceptions import ParamError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BaselineParams:
    """ALS 参数：平滑权重 λ、非对称权重 p、迭代次数"""

    smoothness: float = 1e5
    asymmetry: float = 0.01
    iterations: int = 10

    def validate(self) -> 'BaselineParams':
        if not self.smoothness > 0:
            raise ParamError("平滑权重必须为正", {'smoothness': self.smoothness})
        if not 0 < self.asymmetry < 1:
            raise ParamError("非对称权重必须在 (0, 1) 内", {'asymmetry': self.asymmetry})
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ParamError("迭代次数必须为正整数", {'iterations': self.iterations})
        return self


def _als(values: np.ndarray, params: BaselineParams) -> np.ndarray:
    length = values.size
    if length < 3:
        return values.copy()
    second_diff = diags([1, -2, 1], [0, -1, -2], shape=(length, length - 2))
    penalty = params.smoothness * second_diff.dot(second_diff.T)
    weights = np.ones(length)
    baseline = values
    for _ in range(params.iterations):
        system = (diags(weights, 0) + penalty).tocsc()
        baseline = spsolve(system, weights * values)
        weights = params.asymmetry * (values > baseline) + (1 - params.asymmetry) * (values <= baseline)
    return np.minimum(baseline, values.max())


def estimate_baseline(spectrum: Spectrum, params: BaselineParams = BaselineParams()) -> Spectrum:
    """
    估计平滑基线

    Args:
        spectrum: 输入光谱
        params: ALS 参数

    Returns:
        Spectrum: 基线（处处不超过输入最大值）

    Raises:
        ParamError: 参数无效
    """
    params.validate()
    return spectrum.with_values(_als(spectrum.values, params))


def subtract_baseline(spectrum: Spectrum, params: BaselineParams = BaselineParams()) -> Spectrum:
    """扣除基线后的信号"""
    baseline = estimate_baseline(spectrum, params)
    return spectrum.with_values(spectrum.values - baseline.values)


def baseline_correct_cube(cube: HyperCube, params: BaselineParams = BaselineParams()) -> HyperCube:
    """逐像素扣除基线"""
    params.validate()
    pixels = cube.pixels()
    corrected = np.empty_like(pixels)
    for i, values in enumerate(pixels):
        corrected[i] = values - _als(values, params)
    logger.info(f"已完成 {pixels.shape[0]} 个像素的基线扣除")
    return cube.with_data(corrected.reshape(cube.shape))
