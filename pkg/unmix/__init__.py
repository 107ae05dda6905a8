"""
光谱解混模块
Unmixing Module

VCA 端元提取、非负最小二乘丰度回归与像素分类
"""

from .types import EndmemberSet, AbundanceCube, LabelMap
from .nnls import nnls
from .vca import vca
from .abundance import (
    abundance_map, classify_pixels, classification_accuracy,
    spectral_angle, match_endmembers
)

__all__ = [
    'EndmemberSet',
    'AbundanceCube',
    'LabelMap',
    'nnls',
    'vca',
    'abundance_map',
    'classify_pixels',
    'classification_accuracy',
    'spectral_angle',
    'match_endmembers'
]
