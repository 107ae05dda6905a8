"""
高光谱数据模块
Hypercube Module

数据模型、HRC1 文件格式与基础访问操作
"""

from .cube import AcquisitionMeta, HyperCube, Spectrum, fingerprint_axis, raw_axis
from .io import load_cube, save_cube, load_spectrum_csv, save_spectrum_csv
from .ops import crop_spectral, peak_intensity_map

__all__ = [
    'AcquisitionMeta',
    'HyperCube',
    'Spectrum',
    'fingerprint_axis',
    'raw_axis',
    'load_cube',
    'save_cube',
    'load_spectrum_csv',
    'save_spectrum_csv',
    'crop_spectral',
    'peak_intensity_map'
]
