"""
HRC1 文件读写
HRC1 File I/O

自描述的开放立方体格式（小端序）：
    'HRC1' | u32 version | u32 H | u32 W | u32 B | f64 integration_time |
    f64 pixel_pitch | u32 label_len | label(UTF-8) | B×f64 axis | H·W·B×f32 data
另提供两列 CSV 单光谱导入导出。
"""

import logging
import os
import struct
from typing import Union

import numpy as np
import pandas as pd

from utils.exceptions import FormatError, IoError, ValidationError
from .cube import AcquisitionMeta, HyperCube, Spectrum

logger = logging.getLogger(__name__)

MAGIC = b'HRC1'
VERSION = 1
_HEADER = struct.Struct('<4sIIIIdd')
_U32 = struct.Struct('<I')

PathLike = Union[str, os.PathLike]


def encode_cube(cube: HyperCube) -> bytes:
    """
    把立方体编码为 HRC1 字节串

    Raises:
        ValidationError: 数据无法以有限的 32 位浮点数表示
    """
    payload = np.ascontiguousarray(cube.data, dtype='<f4')
    if not np.all(np.isfinite(payload)):
        raise ValidationError("立方体数据超出 32 位浮点数范围")
    label = cube.meta.label.encode('utf-8')
    parts = [
        _HEADER.pack(MAGIC, VERSION, cube.height, cube.width, cube.bands,
                     float(cube.meta.integration_time), float(cube.meta.pixel_pitch)),
        _U32.pack(len(label)),
        label,
        np.ascontiguousarray(cube.axis, dtype='<f8').tobytes(),
        payload.tobytes(),
    ]
    return b''.join(parts)


def decode_cube(raw: bytes) -> HyperCube:
    """
    从 HRC1 字节串解码立方体

    Raises:
        FormatError: 魔数错误、版本不支持或数据截断
        ValidationError: 解码后的立方体不满足不变量（如波数轴非递增）
    """
    if len(raw) < _HEADER.size + _U32.size:
        raise FormatError("HRC1 文件头不完整", {'size': len(raw)})
    magic, version, height, width, bands, t_int, pitch = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise FormatError("不是 HRC1 文件（魔数错误）", {'magic': magic.hex()})
    if version != VERSION:
        raise FormatError(f"不支持的 HRC1 版本: {version}")

    offset = _HEADER.size
    (label_len,) = _U32.unpack_from(raw, offset)
    offset += _U32.size
    axis_bytes = 8 * bands
    data_bytes = 4 * height * width * bands
    expected = offset + label_len + axis_bytes + data_bytes
    if len(raw) < expected:
        raise FormatError(
            "HRC1 数据被截断",
            {'expected_bytes': expected, 'actual_bytes': len(raw)}
        )
    if len(raw) > expected:
        raise FormatError("HRC1 文件末尾存在多余数据", {'extra_bytes': len(raw) - expected})

    try:
        label = raw[offset:offset + label_len].decode('utf-8')
    except UnicodeDecodeError as e:
        raise FormatError("标签不是有效的 UTF-8", {'original_error': str(e)})
    offset += label_len
    axis = np.frombuffer(raw, dtype='<f8', count=bands, offset=offset)
    offset += axis_bytes
    data = np.frombuffer(raw, dtype='<f4', count=height * width * bands, offset=offset)

    meta = AcquisitionMeta(integration_time=t_int, pixel_pitch=pitch, label=label)
    return HyperCube(data.reshape(height, width, bands), axis, meta)


def save_cube(cube: HyperCube, path: PathLike) -> None:
    """
    保存立方体为 HRC1 文件；相同立方体总是写出相同字节

    Args:
        cube: 待保存立方体
        path: 文件路径

    Raises:
        ValidationError: 数据无效（写入任何字节之前）
        IoError: 路径不可写
    """
    raw = encode_cube(cube)
    try:
        with open(path, 'wb') as f:
            f.write(raw)
    except OSError as e:
        raise IoError(f"无法写入 HRC1 文件: {path}", {'original_error': str(e)})
    logger.debug(f"已保存立方体 {cube.shape} 到 {path}")


def load_cube(path: PathLike) -> HyperCube:
    """
    加载 HRC1 文件

    Args:
        path: 文件路径

    Returns:
        HyperCube: 满足全部不变量的立方体

    Raises:
        IoError: 文件不存在或不可读
        FormatError: 魔数错误或数据截断
        ValidationError: 波数轴非递增等
    """
    try:
        with open(path, 'rb') as f:
            raw = f.read()
    except OSError as e:
        raise IoError(f"无法读取 HRC1 文件: {path}", {'original_error': str(e)})
    cube = decode_cube(raw)
    logger.debug(f"已加载立方体 {cube.shape}: {path}")
    return cube


def load_spectrum_csv(path: PathLike) -> Spectrum:
    """
    导入两列（波数, 强度）CSV 单光谱，表头可选

    Raises:
        FormatError: 列数不足或存在非数值内容
    """
    try:
        frame = pd.read_csv(path, header=None, sep=None, engine='python')
    except OSError as e:
        raise IoError(f"无法读取 CSV 文件: {path}", {'original_error': str(e)})
    if frame.shape[1] < 2:
        raise FormatError("CSV 至少需要两列（波数, 强度）", {'columns': frame.shape[1]})

    frame = frame.iloc[:, :2]
    numeric = frame.apply(pd.to_numeric, errors='coerce')
    # 第一行无法转为数值时视为表头
    if numeric.iloc[0].isna().any():
        numeric = numeric.iloc[1:]
    if numeric.isna().any().any():
        raise FormatError("CSV 包含非数值内容", {'path': str(path)})
    return Spectrum(numeric.iloc[:, 0].to_numpy(float), numeric.iloc[:, 1].to_numpy(float))


def save_spectrum_csv(spectrum: Spectrum, path: PathLike) -> None:
    """导出单光谱为带表头的两列 CSV"""
    frame = pd.DataFrame({'wavenumber': spectrum.axis, 'intensity': spectrum.values})
    try:
        frame.to_csv(path, index=False)
    except OSError as e:
        raise IoError(f"无法写入 CSV 文件: {path}", {'original_error': str(e)})
