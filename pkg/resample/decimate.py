"""
栅格抽取
Raster Decimation

模拟稀疏栅格扫描：在 x、y 方向都只保留每第 s 个像素，不做抗混叠滤波
"""

import numpy as np

from hypercube import HyperCube
from utils.exceptions import ParamError, ShapeError

SCALE_FACTORS = (2, 3, 4)


def validate_scale(s: int) -> int:
    """校验放大倍数 s ∈ {2, 3, 4}"""
    if s not in SCALE_FACTORS:
        raise ParamError(f"放大倍数必须为 {SCALE_FACTORS} 之一", {'scale': s})
    return int(s)


def decimate_array(data: np.ndarray, s: int) -> np.ndarray:
    """对 (H, W, ...) 数组按 s 抽取，输出 ceil(H/s) × ceil(W/s)"""
    return data[::s, ::s]


def decimate(cube: HyperCube, s: int) -> HyperCube:
    """
    栅格抽取：输出像素 (i, j) = 输入像素 (s·i, s·j)，像素间距乘以 s

    Raises:
        ParamError: s 不在 {2, 3, 4}
        ShapeError: 立方体小于 s
    """
    validate_scale(s)
    if cube.height < s or cube.width < s:
        raise ShapeError("立方体尺寸小于抽取倍数", {'shape': cube.shape, 'scale': s})
    return cube.with_data(
        decimate_array(cube.data, s),
        meta=cube.meta.with_pitch(cube.meta.pixel_pitch * s)
    )
