"""
组分光谱库
Component Spectrum Library

洛伦兹线型的拉曼组分光谱、空间布局参数以及两套默认组分库：
"cell"（795/1004/1300/1440/1660 cm⁻¹ 谱峰族）与 "tissue"
（855/940/1065/1245/1270/1450 cm⁻¹，用作迁移学习的第二个数据域）。
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from hypercube import Spectrum
from utils.exceptions import ParamError

LAYOUT_KINDS = ('disk', 'annulus', 'blob', 'field')


@dataclass(frozen=True)
class Peak:
    """洛伦兹谱峰：中心 (cm⁻¹)、半高全宽 (cm⁻¹)、峰高"""

    center: float
    width: float
    amplitude: float

    def __post_init__(self):
        if not self.width > 0:
            raise ParamError("谱峰宽度必须为正", {'center': self.center, 'width': self.width})
        if self.amplitude < 0:
            raise ParamError("谱峰强度必须非负", {'center': self.center, 'amplitude': self.amplitude})


@dataclass(frozen=True)
class Layout:
    """
    组分在 H×W 网格上的空间布局

    disk：半径 radius 内为 1；annulus：inner ≤ 距离 ≤ radius 为 1；
    blob：以 radius 为标准差的高斯斑；field：全视场均匀分布。
    """

    kind: str = 'field'
    row: float = 0.0
    col: float = 0.0
    radius: float = 0.0
    inner: float = 0.0

    def __post_init__(self):
        if self.kind not in LAYOUT_KINDS:
            raise ParamError("未知的布局类型", {'kind': self.kind, 'available': LAYOUT_KINDS})
        if self.kind != 'field' and not self.radius > 0:
            raise ParamError("布局半径必须为正", {'kind': self.kind, 'radius': self.radius})
        if self.kind == 'annulus' and not 0 <= self.inner < self.radius:
            raise ParamError("环形内半径必须在 [0, radius)", {'inner': self.inner, 'radius': self.radius})

    def mask(self, height: int, width: int) -> np.ndarray:
        """
        布局权重图（取值 [0, 1]）

        Raises:
            ParamError: 布局中心超出网格
        """
        if self.kind == 'field':
            return np.ones((height, width))
        if not (0 <= self.row <= height - 1 and 0 <= self.col <= width - 1):
            raise ParamError("布局中心超出网格", {'row': self.row, 'col': self.col, 'shape': (height, width)})
        rows, cols = np.mgrid[0:height, 0:width]
        dist = np.hypot(rows - self.row, cols - self.col)
        if self.kind == 'disk':
            return (dist <= self.radius).astype(float)
        if self.kind == 'annulus':
            return ((dist >= self.inner) & (dist <= self.radius)).astype(float)
        return np.exp(-dist ** 2 / (2 * self.radius ** 2))


@dataclass(frozen=True)
class ComponentSpec:
    """组分：名称、谱峰列表与空间布局"""

    name: str
    peaks: Tuple[Peak, ...]
    layout: Layout = field(default_factory=Layout)

    def __post_init__(self):
        peaks = tuple(p if isinstance(p, Peak) else Peak(*p) for p in self.peaks)
        if not peaks:
            raise ParamError("组分至少需要一个谱峰", {'name': self.name})
        object.__setattr__(self, 'peaks', peaks)


def lorentzian(axis: np.ndarray, center: float, width: float, amplitude: float) -> np.ndarray:
    """amplitude·(w/2)² / ((ν − c)² + (w/2)²)"""
    half = (width / 2.0) ** 2
    return amplitude * half / ((np.asarray(axis, dtype=np.float64) - center) ** 2 + half)


def component_spectrum(spec: ComponentSpec, axis: np.ndarray) -> Spectrum:
    """组分光谱：各洛伦兹谱峰之和"""
    axis = np.asarray(axis, dtype=np.float64)
    values = np.zeros_like(axis)
    for peak in spec.peaks:
        values = values + lorentzian(axis, peak.center, peak.width, peak.amplitude)
    return Spectrum(axis, values)


# 名称 → 谱峰 (中心, 宽度, 峰高)；峰位取自生物样品的典型拉曼谱带，峰高为自由参数
LIBRARIES: Dict[str, List[Tuple[str, Sequence[Tuple[float, float, float]]]]] = {
    'cell': [
        ('nucleic_acid', [(795.0, 14.0, 1.0), (1095.0, 20.0, 0.35), (1340.0, 24.0, 0.3)]),
        ('protein', [(1004.0, 10.0, 1.0), (1250.0, 30.0, 0.3), (1660.0, 28.0, 0.7)]),
        ('lipid', [(1300.0, 22.0, 0.8), (1440.0, 24.0, 1.0), (1655.0, 18.0, 0.35)]),
        ('background', [(1150.0, 30.0, 0.08), (1550.0, 30.0, 0.06)]),
    ],
    'tissue': [
        ('collagen', [(855.0, 16.0, 0.8), (940.0, 20.0, 0.6), (1245.0, 26.0, 0.7), (1450.0, 24.0, 1.0)]),
        ('proteoglycan', [(1065.0, 14.0, 1.0), (1380.0, 26.0, 0.3)]),
        ('matrix', [(1270.0, 26.0, 0.6), (1450.0, 22.0, 0.5), (1665.0, 28.0, 0.8)]),
        ('background', [(1000.0, 30.0, 0.06), (1600.0, 30.0, 0.06)]),
    ],
}


def library_names() -> List[str]:
    return list(LIBRARIES.keys())


def get_library(name: str) -> List[Tuple[str, Sequence[Tuple[float, float, float]]]]:
    if name not in LIBRARIES:
        raise ParamError(f"未知的组分库: {name}", {'available': library_names()})
    return LIBRARIES[name]
