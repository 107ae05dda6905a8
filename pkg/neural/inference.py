"""
推理
Inference

逐像素光谱去噪与整幅超分辨率。输入按立方体最大值归一化，输出再乘回同一系数。
超分辨率可选分块推理：低分辨率块按 tile − overlap 的步长滑动，重叠的高分辨率
输出取平均。
"""

import logging
import time
from typing import Optional

import numpy as np

from dsp import normalize_cube_max
from hypercube import HyperCube
from resample import check_out_dims
from utils.exceptions import ConfigError, ParamError
from .checkpoint import Checkpoint
from .models import BaseModel, Hyrisr, ResUNet1d

logger = logging.getLogger(__name__)


def _model_of(ckpt_or_model, expected: type) -> BaseModel:
    model = ckpt_or_model.build_model() if isinstance(ckpt_or_model, Checkpoint) else ckpt_or_model
    if not isinstance(model, expected):
        raise ConfigError(
            "检查点网络结构与任务不符",
            {'expected': expected.arch, 'got': getattr(model, 'arch', type(model).__name__)}
        )
    return model


def _normalized(cube: HyperCube):
    if float(np.max(cube.data)) > 0:
        return normalize_cube_max(cube)
    return cube, 1.0


def infer_denoise(ckpt, cube: HyperCube, batch_size: int = 1024) -> HyperCube:
    """
    逐像素光谱去噪

    Args:
        ckpt: ResUNet 检查点（或已构建的模型）
        cube: 输入立方体
        batch_size: 每批光谱数

    Returns:
        HyperCube: 尺寸不变的去噪立方体

    Raises:
        ConfigError: 网络结构或波段数不匹配
    """
    model = _model_of(ckpt, ResUNet1d)
    if model.bands() != cube.bands:
        raise ConfigError("去噪网络波段数与立方体不一致", {'model': model.bands(), 'cube': cube.bands})
    start = time.time()
    normalized, scale = _normalized(cube)
    pixels = normalized.pixels()
    outputs = [model.predict(pixels[i:i + batch_size]) for i in range(0, len(pixels), batch_size)]
    data = np.concatenate(outputs).astype(np.float64).reshape(cube.shape) * scale
    logger.info(f"去噪完成：{len(pixels)} 条光谱，耗时 {time.time() - start:.2f} 秒")
    return cube.with_data(data)


def _forward_sr(model: Hyrisr, data: np.ndarray) -> np.ndarray:
    out = model.predict(data.transpose(2, 0, 1)[None])
    return out[0].transpose(1, 2, 0).astype(np.float64)


def _tile_starts(n: int, tile: int, step: int):
    starts = list(range(0, max(n - tile, 0) + 1, step))
    if starts[-1] + tile < n:
        starts.append(n - tile)
    return starts


def infer_superres(ckpt, cube: HyperCube, out_h: Optional[int] = None, out_w: Optional[int] = None,
                   tile: Optional[int] = None, overlap: int = 0) -> HyperCube:
    """
    超分辨率推理

    Args:
        ckpt: HyRISR 检查点（或已构建的模型）
        cube: 低分辨率立方体
        out_h, out_w: 输出尺寸，默认 s·H、s·W
        tile: 低分辨率分块边长，None 表示整幅推理
        overlap: 相邻分块的重叠像素数

    Returns:
        HyperCube: 高分辨率立方体，像素间距除以 s

    Raises:
        ConfigError: 网络结构或波段数不匹配
        ShapeError: 输出尺寸与放大倍数不一致
        ParamError: 分块参数无效
    """
    model = _model_of(ckpt, Hyrisr)
    if model.bands() != cube.bands:
        raise ConfigError("超分辨率网络波段数与立方体不一致", {'model': model.bands(), 'cube': cube.bands})
    s = model.scale
    out_h = cube.height * s if out_h is None else out_h
    out_w = cube.width * s if out_w is None else out_w
    check_out_dims(cube, s, out_h, out_w)

    start = time.time()
    normalized, scale = _normalized(cube)
    data = normalized.data
    if tile is None:
        hr = _forward_sr(model, data)
    else:
        if tile < 1 or not 0 <= overlap < tile:
            raise ParamError("分块参数无效", {'tile': tile, 'overlap': overlap})
        hr = np.zeros((cube.height * s, cube.width * s, cube.bands))
        counts = np.zeros((cube.height * s, cube.width * s, 1))
        tile_h = min(tile, cube.height)
        tile_w = min(tile, cube.width)
        for top in _tile_starts(cube.height, tile_h, tile - overlap):
            for left in _tile_starts(cube.width, tile_w, tile - overlap):
                patch = _forward_sr(model, data[top:top + tile_h, left:left + tile_w])
                hr[s * top:s * (top + tile_h), s * left:s * (left + tile_w)] += patch
                counts[s * top:s * (top + tile_h), s * left:s * (left + tile_w)] += 1
        hr = hr / counts
    logger.info(f"超分辨率完成：{cube.shape[:2]} -> ({out_h}, {out_w})，耗时 {time.time() - start:.2f} 秒")
    return cube.with_data(hr[:out_h, :out_w] * scale, meta=cube.meta.with_pitch(cube.meta.pixel_pitch / s))
