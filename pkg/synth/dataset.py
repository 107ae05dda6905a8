"""
合成数据集
Synthetic Dataset

每个样本包含无噪声高分辨率图像、高/低信噪比噪声版本以及它们按 s 抽取的低分辨率
版本。每个立方体的种子由 SeedSequence 派生，train/val/test 角色按索引划分、互不重叠。
"""

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from augment import TrainingPair
from hypercube import AcquisitionMeta, HyperCube, save_cube
from resample import decimate, validate_scale
from unmix import AbundanceCube, EndmemberSet, LabelMap
from utils.exceptions import IoError, ParamError
from .noise import NoiseModel, apply_noise
from .phantom import gen_phantom, random_components

logger = logging.getLogger(__name__)

CUBE_KEYS = ('clean_hr', 'noisy_hr', 'noisy_lr', 'clean_lr', 'high_hr', 'high_lr')
ROLES = ('train', 'val', 'test')
MANIFEST_NAME = 'manifest.json'
AXIS_NAME = 'axis.csv'


@dataclass
class Sample:
    """一组配对立方体及其真值"""

    clean_hr: HyperCube
    high_hr: HyperCube
    noisy_hr: HyperCube
    clean_lr: HyperCube
    high_lr: HyperCube
    noisy_lr: HyperCube
    scale: int
    role: str
    seed: int
    endmembers: Optional[EndmemberSet] = None
    abundances: Optional[AbundanceCube] = None
    labels: Optional[LabelMap] = None

    def cube(self, key: str) -> HyperCube:
        if key not in CUBE_KEYS:
            raise ParamError(f"未知的立方体键: {key}", {'available': CUBE_KEYS})
        return getattr(self, key)

    def pair(self, task: str) -> TrainingPair:
        """去噪：低信噪比高分辨率 → 高信噪比高分辨率；超分辨率：高信噪比低分辨率 → 高信噪比高分辨率"""
        if task == 'denoise':
            return TrainingPair(self.noisy_hr, self.high_hr, 1)
        if task == 'sr':
            return TrainingPair(self.high_lr, self.high_hr, self.scale)
        raise ParamError(f"未知的任务: {task}", {'available': ['denoise', 'sr']})


def _child_seed(sequence: np.random.SeedSequence) -> int:
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def assign_roles(n: int) -> List[str]:
    """约 80/10/10 划分；n ≥ 3 时验证与测试各至少一个"""
    if n < 3:
        return ['train'] * n
    n_test = max(1, int(round(0.1 * n)))
    n_val = max(1, int(round(0.1 * n)))
    return ['train'] * (n - n_val - n_test) + ['val'] * n_val + ['test'] * n_test


def gen_dataset(n_cubes: int, height: int, width: int, axis: np.ndarray, s: int,
                t_low: float = 0.1, t_high: float = 1.0, seed: int = 0, library: str = 'cell',
                photon_rate_scale: float = 200.0, read_noise_sigma: float = 2.0,
                pixel_pitch: float = 0.5) -> List[Sample]:
    """
    生成配对合成数据集

    Args:
        n_cubes: 立方体数量
        height, width: 高分辨率尺寸
        axis: 波数轴
        s: 空间抽取倍数
        t_low, t_high: 低/高信噪比积分时间（秒）
        seed: 数据集种子
        library: 组分库名称

    Returns:
        List[Sample]: 配对样本

    Raises:
        ParamError: 参数无效
    """
    validate_scale(s)
    if n_cubes < 1:
        raise ParamError("立方体数量必须 ≥ 1", {'n_cubes': n_cubes})
    if height < s or width < s:
        raise ParamError("图像尺寸小于抽取倍数", {'size': (height, width), 'scale': s})
    if not 0 < t_low <= t_high:
        raise ParamError("积分时间必须满足 0 < t_low ≤ t_high", {'t_low': t_low, 't_high': t_high})

    start = time.time()
    low_model = NoiseModel(t_low, photon_rate_scale, read_noise_sigma)
    high_model = NoiseModel(t_high, photon_rate_scale, read_noise_sigma)
    roles = assign_roles(n_cubes)
    samples = []
    for index, child in enumerate(np.random.SeedSequence(seed).spawn(n_cubes)):
        cube_seed = _child_seed(child)
        layout_seq, texture_seq, high_seq, low_seq = child.spawn(4)
        components = random_components(library, height, width, np.random.default_rng(layout_seq))
        label = f"{library}_{index:03d}"
        phantom = gen_phantom(
            components, height, width, axis, _child_seed(texture_seq),
            AcquisitionMeta(t_high, pixel_pitch, label)
        )
        clean = phantom.cube
        high = apply_noise(clean, high_model, _child_seed(high_seq))
        noisy = apply_noise(clean, low_model, _child_seed(low_seq))
        samples.append(Sample(
            clean_hr=clean, high_hr=high, noisy_hr=noisy,
            clean_lr=decimate(clean, s), high_lr=decimate(high, s), noisy_lr=decimate(noisy, s),
            scale=s, role=roles[index], seed=cube_seed,
            endmembers=phantom.endmembers, abundances=phantom.abundances, labels=phantom.labels
        ))
    logger.info(f"生成 {n_cubes} 组合成数据（{height}×{width}×{len(axis)}，s={s}），"
                f"耗时 {time.time() - start:.2f} 秒")
    return samples


def write_dataset(samples: Sequence[Sample], out_dir: Union[str, Path], axis: np.ndarray,
                  info: Optional[Dict[str, Any]] = None) -> Path:
    """
    写出 HRC1 立方体、axis.csv 与 manifest.json

    Args:
        samples: 样本列表
        out_dir: 输出目录
        axis: 波数轴
        info: 额外写入清单的字段（t_low、t_high、seed、library 等）

    Returns:
        Path: 清单文件路径
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        pd.DataFrame({'wavenumber': np.asarray(axis, dtype=np.float64)}).to_csv(
            out_dir / AXIS_NAME, index=False, float_format='%.10g'
        )
    except OSError as e:
        raise IoError(f"无法写入数据集目录: {out_dir}", {'error': str(e)})

    entries = []
    for index, sample in enumerate(samples):
        entry: Dict[str, Any] = {'role': sample.role, 'seed': sample.seed}
        for key in CUBE_KEYS:
            name = f"cube_{index:03d}_{key}.hrc"
            save_cube(sample.cube(key), out_dir / name)
            entry[key] = name
        entries.append(entry)

    manifest = {
        'pairs': entries,
        'axis_file': AXIS_NAME,
        'scale': samples[0].scale if samples else None,
        'size': list(samples[0].clean_hr.shape[:2]) if samples else None,
        'bands': int(len(axis)),
    }
    manifest.update(info or {})
    path = out_dir / MANIFEST_NAME
    try:
        path.write_text(json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False), encoding='utf-8')
    except OSError as e:
        raise IoError(f"无法写入清单: {path}", {'error': str(e)})
    logger.info(f"数据集已写出: {path}（{len(entries)} 组）")
    return path
