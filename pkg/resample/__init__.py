"""
重采样模块
Resampling Module

栅格抽取生成低分辨率图像，以及最近邻与双三次上采样基线
"""

from .decimate import SCALE_FACTORS, validate_scale, decimate, decimate_array
from .upsample import (
    KEYS_A, keys_kernel, bicubic_weights, nearest_weights, check_out_dims,
    upsample_nearest, upsample_bicubic
)

__all__ = [
    'SCALE_FACTORS',
    'validate_scale',
    'decimate',
    'decimate_array',
    'KEYS_A',
    'keys_kernel',
    'bicubic_weights',
    'nearest_weights',
    'check_out_dims',
    'upsample_nearest',
    'upsample_bicubic'
]
