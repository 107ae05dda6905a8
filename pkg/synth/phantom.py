"""
合成拉曼图像
Synthetic Raman Phantoms

每个像素的光谱为各组分光谱按丰度的线性混合。丰度来自布局权重乘以平滑随机纹理，
逐像素归一化为和为一；每个组分至少保留一个纯像素，保证端元可由 VCA 恢复。
"""

import logging
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter

from hypercube import AcquisitionMeta, HyperCube
from unmix import AbundanceCube, EndmemberSet, LabelMap
from utils.exceptions import ParamError, ValidationError
from .library import ComponentSpec, Layout, component_spectrum, get_library

logger = logging.getLogger(__name__)

WEIGHT_FLOOR = 0.02
TEXTURE_SIGMA = 2.0


class Phantom(NamedTuple):
    """合成图像及其真值"""

    cube: HyperCube
    endmembers: EndmemberSet
    abundances: AbundanceCube
    labels: LabelMap


def random_components(library: str, height: int, width: int,
                      rng: np.random.Generator) -> List[ComponentSpec]:
    """
    按组分库随机生成布局（背景组分铺满视场）

    Args:
        library: 组分库名称（cell / tissue）
        height, width: 网格尺寸
        rng: 随机数生成器

    Returns:
        List[ComponentSpec]: 组分列表
    """
    components = []
    size = min(height, width)
    for name, peaks in get_library(library):
        if name == 'background':
            layout = Layout('field')
        else:
            kind = ('disk', 'annulus', 'blob')[int(rng.integers(3))]
            radius = float(rng.uniform(0.15, 0.35) * size) + 1.0
            layout = Layout(
                kind=kind,
                row=float(rng.uniform(0, height - 1)),
                col=float(rng.uniform(0, width - 1)),
                radius=radius,
                inner=radius * 0.5 if kind == 'annulus' else 0.0
            )
        components.append(ComponentSpec(name, tuple(peaks), layout))
    return components


def _texture(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    noise = gaussian_filter(rng.standard_normal((height, width)), TEXTURE_SIGMA, mode='reflect')
    span = noise.max() - noise.min()
    if span <= 0:
        return np.ones((height, width))
    return 0.5 + 0.5 * (noise - noise.min()) / span


def _enforce_pure_pixels(abundances: np.ndarray) -> List[int]:
    height, width, k = abundances.shape
    flat = abundances.reshape(-1, k)
    reserved: List[int] = []
    for index in range(k):
        score = flat[:, index].copy()
        score[reserved] = -np.inf
        pixel = int(np.argmax(score))
        flat[pixel] = 0.0
        flat[pixel, index] = 1.0
        reserved.append(pixel)
    return reserved


def gen_phantom(components: Sequence[ComponentSpec], height: int, width: int,
                axis: np.ndarray, seed: int = 0,
                meta: Optional[AcquisitionMeta] = None) -> Phantom:
    """
    生成无噪声合成图像

    Args:
        components: 组分列表
        height, width: 图像尺寸
        axis: 波数轴
        seed: 纹理随机种子
        meta: 采集元数据

    Returns:
        Phantom: (立方体, 真实端元, 真实丰度, 真实标签)

    Raises:
        ParamError: 组分为空、像素数不足或布局超出网格
    """
    k = len(components)
    if k < 1:
        raise ParamError("至少需要一个组分")
    if height * width < k:
        raise ParamError("像素数少于组分数，无法保留纯像素", {'pixels': height * width, 'k': k})
    rng = np.random.default_rng(seed)
    axis = np.asarray(axis, dtype=np.float64)

    weights = np.stack([
        component.layout.mask(height, width) * _texture(rng, height, width) + WEIGHT_FLOOR
        for component in components
    ], axis=2)
    abundances = weights / weights.sum(axis=2, keepdims=True)
    pure = _enforce_pure_pixels(abundances)

    spectra = np.stack([component_spectrum(c, axis).values for c in components], axis=1)
    data = abundances @ spectra.T
    names = [c.name for c in components]
    cube = HyperCube(data, axis, meta or AcquisitionMeta())
    endmembers = EndmemberSet(spectra, names)
    abundance_cube = AbundanceCube(abundances, names)
    labels = LabelMap(np.argmax(abundances, axis=2), k)

    for index, pixel in enumerate(pure):
        if labels.labels.reshape(-1)[pixel] != index:
            raise ValidationError("纯像素校验失败", {'component': names[index], 'pixel': pixel})
    logger.debug(f"生成合成图像 {height}×{width}×{axis.size}，{k} 个组分，纯像素 {pure}")
    return Phantom(cube, endmembers, abundance_cube, labels)


def add_polynomial_background(cube: HyperCube, coeffs: Sequence[float]) -> HyperCube:
    """
    叠加低阶多项式自发荧光背景（自变量为归一化到 [−1, 1] 的波数）

    Raises:
        ParamError: 系数为空
    """
    if len(coeffs) == 0:
        raise ParamError("多项式系数不能为空")
    axis = cube.axis
    x = 2.0 * (axis - axis[0]) / (axis[-1] - axis[0]) - 1.0
    background = np.polynomial.polynomial.polyval(x, np.asarray(coeffs, dtype=np.float64))
    return cube.with_data(cube.data + background[None, None, :])
