"""
经典光谱处理模块
DSP Module

Savitzky-Golay 滤波、基线估计与归一化
"""

from .savgol import SgParams, sg_coefficients, sg_filter, sg_filter_cube, sg_grid, SG_ORDERS, SG_FRAMES
from .baseline import BaselineParams, estimate_baseline, subtract_baseline, baseline_correct_cube
from .normalize import normalize_peak, normalize_cube_max

__all__ = [
    'SgParams',
    'sg_coefficients',
    'sg_filter',
    'sg_filter_cube',
    'sg_grid',
    'SG_ORDERS',
    'SG_FRAMES',
    'BaselineParams',
    'estimate_baseline',
    'subtract_baseline',
    'baseline_correct_cube',
    'normalize_peak',
    'normalize_cube_max'
]
