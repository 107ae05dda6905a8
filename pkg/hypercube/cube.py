"""
高光谱数据模型
Hyperspectral Data Model

HyperCube（H×W×B 拉曼强度立方体）、采集元数据与单条光谱
"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from utils.exceptions import ValidationError


@dataclass(frozen=True)
class AcquisitionMeta:
    """采集元数据：单条光谱积分时间（秒）、像素间距（µm）与标签"""

    integration_time: float = 1.0
    pixel_pitch: float = 0.5
    label: str = ''

    def __post_init__(self):
        if not np.isfinite(self.integration_time) or self.integration_time <= 0:
            raise ValidationError("积分时间必须为正", {'integration_time': self.integration_time})
        if not np.isfinite(self.pixel_pitch) or self.pixel_pitch <= 0:
            raise ValidationError("像素间距必须为正", {'pixel_pitch': self.pixel_pitch})

    def with_pitch(self, pixel_pitch: float) -> 'AcquisitionMeta':
        return replace(self, pixel_pitch=float(pixel_pitch))


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=np.float64, order='C', copy=True)
    out.setflags(write=False)
    return out


def _check_axis(axis: np.ndarray) -> None:
    if axis.ndim != 1:
        raise ValidationError("波数轴必须是一维数组", {'shape': axis.shape})
    if not np.all(np.isfinite(axis)):
        raise ValidationError("波数轴包含非有限值")
    if axis.size >= 2 and not np.all(np.diff(axis) > 0):
        raise ValidationError("波数轴必须严格递增")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """与波数轴对齐的一维强度向量"""

    axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        axis = _frozen(self.axis)
        values = _frozen(self.values)
        _check_axis(axis)
        if values.shape != axis.shape:
            raise ValidationError(
                "光谱强度与波数轴长度不一致",
                {'axis_len': axis.size, 'values_len': values.size}
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("光谱包含非有限值")
        object.__setattr__(self, 'axis', axis)
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return self.values.size

    def with_values(self, values: np.ndarray) -> 'Spectrum':
        return Spectrum(self.axis, values)


@dataclass(frozen=True, eq=False)
class HyperCube:
    """
    高光谱立方体

    data 按 (row, col, band) 行优先存放，构造后不可变，可在线程间共享读取。
    """

    data: np.ndarray
    axis: np.ndarray
    meta: AcquisitionMeta = field(default_factory=AcquisitionMeta)

    def __post_init__(self):
        data = _frozen(self.data)
        axis = _frozen(self.axis)
        if data.ndim != 3:
            raise ValidationError("立方体数据必须是三维 (H, W, B)", {'shape': data.shape})
        height, width, bands = data.shape
        if height < 1 or width < 1 or bands < 2:
            raise ValidationError(
                "立方体尺寸无效：要求 H ≥ 1, W ≥ 1, B ≥ 2",
                {'shape': data.shape}
            )
        _check_axis(axis)
        if axis.size != bands:
            raise ValidationError("波数轴长度必须等于波段数", {'axis_len': axis.size, 'bands': bands})
        if not np.all(np.isfinite(data)):
            raise ValidationError("立方体包含非有限值")
        object.__setattr__(self, 'data', data)
        object.__setattr__(self, 'axis', axis)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def bands(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self):
        return self.data.shape

    def spectrum(self, row: int, col: int) -> Spectrum:
        return Spectrum(self.axis, self.data[row, col])

    def pixels(self) -> np.ndarray:
        """(H·W)×B 的像素光谱矩阵（只读视图）"""
        return self.data.reshape(-1, self.bands)

    def with_data(self, data: np.ndarray, axis: Optional[np.ndarray] = None,
                  meta: Optional[AcquisitionMeta] = None) -> 'HyperCube':
        """用新的数据（及可选的波数轴/元数据）构造经过验证的新立方体"""
        return HyperCube(
            data,
            self.axis if axis is None else axis,
            self.meta if meta is None else meta,
        )

    def equals(self, other: 'HyperCube') -> bool:
        """数据、波数轴与元数据完全相同"""
        return (
            self.shape == other.shape
            and np.array_equal(self.data, other.data)
            and np.array_equal(self.axis, other.axis)
            and self.meta == other.meta
        )


def fingerprint_axis(bands: int = 500, lo: float = 600.0, hi: float = 1800.0) -> np.ndarray:
    """指纹区（默认 600–1800 cm⁻¹）等间距波数轴"""
    if bands < 2 or not lo < hi:
        raise ValidationError("波数轴参数无效", {'bands': bands, 'lo': lo, 'hi': hi})
    return np.linspace(lo, hi, bands)


def raw_axis(spacing: float = 3.65, hi: float = 3700.0) -> np.ndarray:
    """0–3700 cm⁻¹ 的原始采集波数轴"""
    if spacing <= 0:
        raise ValidationError("波数间隔必须为正", {'spacing': spacing})
    count = int(np.floor(hi / spacing + 1e-9))
    return spacing * np.arange(count + 1, dtype=np.float64)
