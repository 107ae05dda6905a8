"""
强度归一化
Intensity Normalization
"""

from typing import Tuple

from hypercube import HyperCube, Spectrum
from utils.exceptions import ValidationError


def normalize_peak(spectrum: Spectrum) -> Spectrum:
    """
    归一化到最大峰强度（输出最大值为 1）

    Raises:
        ValidationError: 最大值不为正
    """
    peak = float(spectrum.values.max())
    if peak <= 0:
        raise ValidationError("光谱最大值必须为正才能归一化", {'max': peak})
    return spectrum.with_values(spectrum.values / peak)


def normalize_cube_max(cube: HyperCube) -> Tuple[HyperCube, float]:
    """按整个立方体的最大值归一化，返回 (归一化立方体, 缩放系数)"""
    scale = float(cube.data.max())
    if scale <= 0:
        raise ValidationError("立方体最大值必须为正才能归一化", {'max': scale})
    return cube.with_data(cube.data / scale), scale
