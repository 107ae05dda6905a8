"""
解混数据类型
Unmixing Types

端元集合、丰度立方体与像素标签图
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from utils.exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class EndmemberSet:
    """B×K 端元矩阵（每列一个端元光谱）及名称"""

    spectra: np.ndarray
    names: List[str] = field(default_factory=list)

    def __post_init__(self):
        spectra = np.array(self.spectra, dtype=np.float64, copy=True)
        if spectra.ndim != 2 or spectra.shape[1] < 1:
            raise ValidationError("端元矩阵必须是 B×K 且 K ≥ 1", {'shape': spectra.shape})
        if not np.all(np.isfinite(spectra)):
            raise ValidationError("端元包含非有限值")
        if np.any(np.all(spectra == 0, axis=0)):
            raise ValidationError("端元不能全为零")
        names = list(self.names) or [f"endmember_{k}" for k in range(spectra.shape[1])]
        if len(names) != spectra.shape[1]:
            raise ValidationError("端元名称数量与端元数不一致",
                                  {'names': len(names), 'k': spectra.shape[1]})
        spectra.setflags(write=False)
        object.__setattr__(self, 'spectra', spectra)
        object.__setattr__(self, 'names', names)

    @property
    def bands(self) -> int:
        return self.spectra.shape[0]

    @property
    def k(self) -> int:
        return self.spectra.shape[1]


@dataclass(frozen=True, eq=False)
class AbundanceCube:
    """H×W×K 非负丰度"""

    values: np.ndarray
    names: Optional[List[str]] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 3:
            raise ValidationError("丰度必须是 H×W×K 数组", {'shape': values.shape})
        if not np.all(np.isfinite(values)):
            raise ValidationError("丰度包含非有限值")
        if np.any(values < 0):
            raise ValidationError("丰度必须非负")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def k(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True, eq=False)
class LabelMap:
    """H×W 整数标签，取值于 [0, K)"""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64, copy=True)
        if labels.ndim != 2:
            raise ValidationError("标签图必须是二维", {'shape': labels.shape})
        if labels.size and (labels.min() < 0 or labels.max() >= self.k):
            raise ValidationError("标签超出端元索引范围", {'k': self.k})
        labels.setflags(write=False)
        object.__setattr__(self, 'labels', labels)

    @property
    def shape(self):
        return self.labels.shape
