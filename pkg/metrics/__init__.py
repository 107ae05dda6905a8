"""
评价指标模块
Metrics Module

MSE / PSNR / SSIM 图像质量指标与成像加速比计算
"""

from .quality import SSIM_K1, SSIM_K2, MetricsPair, SsimConstants, mse, psnr, ssim, score
from .timing import speedup, acquisition_time, format_min_sec

__all__ = [
    'SSIM_K1',
    'SSIM_K2',
    'MetricsPair',
    'SsimConstants',
    'mse',
    'psnr',
    'ssim',
    'score',
    'speedup',
    'acquisition_time',
    'format_min_sec'
]
