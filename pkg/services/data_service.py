"""
数据服务
Data Service

读取数据集清单、带缓存地加载 HRC1 立方体，并按任务组装训练样本对
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from augment import TrainingPair
from hypercube import HyperCube, load_cube
from utils.exceptions import DataError, IoError, ParamError

logger = logging.getLogger(__name__)

TASKS = ('denoise', 'sr')
REQUIRED_PAIR_KEYS = ('clean_hr', 'noisy_hr', 'noisy_lr', 'clean_lr', 'role', 'seed')


@dataclass
class Manifest:
    """数据集清单：样本条目、波数轴与数据集参数"""

    root: Path
    pairs: List[Dict[str, Any]]
    axis: np.ndarray
    scale: int
    info: Dict[str, Any] = field(default_factory=dict)

    def entries(self, roles: Optional[Sequence[str]] = None) -> List[Dict[str, Any]]:
        if roles is None:
            return list(self.pairs)
        return [p for p in self.pairs if p['role'] in roles]

    def path_of(self, entry: Dict[str, Any], key: str) -> Path:
        return self.root / entry[key]


class DataService:
    """数据服务类"""

    def __init__(self, data_dir: str = '.'):
        """
        初始化数据服务

        Args:
            data_dir: 相对路径的基准目录
        """
        self.data_dir = data_dir
        self._cache: Dict[str, HyperCube] = {}

    def _resolve(self, path) -> Path:
        path = Path(path)
        return path if path.is_absolute() else Path(self.data_dir) / path

    def load_manifest(self, path) -> Manifest:
        """
        加载数据集清单

        Raises:
            IoError: 文件不存在或无法读取
            DataError: 清单内容无效
        """
        full_path = self._resolve(path)
        if not full_path.exists():
            raise IoError(f"清单文件不存在: {path}")
        try:
            raw = json.loads(full_path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise DataError(f"清单不是合法的 JSON: {path}", {'error': str(e)})
        except OSError as e:
            raise IoError(f"读取清单失败: {path}", {'error': str(e)})

        for key in ('pairs', 'axis_file', 'scale'):
            if key not in raw:
                raise DataError(f"清单缺少字段: {key}", {'manifest': str(path)})
        if not raw['pairs']:
            raise DataError("清单中没有样本", {'manifest': str(path)})
        for index, entry in enumerate(raw['pairs']):
            missing = [k for k in REQUIRED_PAIR_KEYS if k not in entry]
            if missing:
                raise DataError(f"第 {index} 个样本缺少字段", {'missing': missing})

        root = full_path.parent
        axis = self.load_axis(root / raw['axis_file'])
        info = {k: v for k, v in raw.items() if k not in ('pairs', 'axis_file', 'scale')}
        logger.info(f"成功加载清单: {path}，包含 {len(raw['pairs'])} 组样本")
        return Manifest(root, raw['pairs'], axis, int(raw['scale']), info)

    def load_axis(self, path) -> np.ndarray:
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError) as e:
            raise IoError(f"读取波数轴失败: {path}", {'error': str(e)})
        return frame.iloc[:, 0].to_numpy(dtype=np.float64)

    def load_cube(self, path, use_cache: bool = True) -> HyperCube:
        """
        加载 HRC1 立方体（缓存键 = 路径与修改时间的 md5）

        Raises:
            IoError: 文件不存在
        """
        full_path = self._resolve(path)
        cache_key = self._generate_cache_key(full_path)
        if use_cache and cache_key in self._cache:
            logger.debug(f"从缓存加载立方体: {path}")
            return self._cache[cache_key]
        if not full_path.exists():
            raise IoError(f"立方体文件不存在: {path}")
        cube = load_cube(full_path)
        if use_cache:
            self._cache[cache_key] = cube
        return cube

    def sample_cube(self, manifest: Manifest, entry: Dict[str, Any], key: str) -> HyperCube:
        if key not in entry:
            raise DataError(f"样本缺少立方体: {key}", {'seed': entry.get('seed')})
        return self.load_cube(manifest.path_of(entry, key))

    def training_pairs(self, manifest: Manifest, task: str,
                       roles: Sequence[str] = ('train',)) -> List[TrainingPair]:
        """
        按任务组装训练样本对

        去噪：低信噪比高分辨率 → 高信噪比高分辨率；
        超分辨率：高信噪比低分辨率 → 高信噪比高分辨率
        （清单中没有高信噪比版本时退回无噪声版本）

        Raises:
            ParamError: 任务未知
            DataError: 没有所需角色的样本
        """
        if task not in TASKS:
            raise ParamError(f"未知的任务: {task}", {'available': TASKS})
        entries = manifest.entries(roles)
        if not entries:
            raise DataError("没有符合角色的样本", {'roles': list(roles)})
        pairs = []
        for entry in entries:
            target_key = 'high_hr' if 'high_hr' in entry else 'clean_hr'
            target = self.sample_cube(manifest, entry, target_key)
            if task == 'denoise':
                pairs.append(TrainingPair(self.sample_cube(manifest, entry, 'noisy_hr'), target, 1))
            else:
                inp_key = 'high_lr' if 'high_lr' in entry else 'clean_lr'
                pairs.append(TrainingPair(self.sample_cube(manifest, entry, inp_key), target, manifest.scale))
        logger.info(f"组装 {task} 样本对 {len(pairs)} 组（角色 {list(roles)}）")
        return pairs

    def get_file_info(self, manifest: Manifest) -> Dict[str, Any]:
        """数据集概要"""
        roles = pd.Series([p['role'] for p in manifest.pairs]).value_counts().to_dict()
        return {
            'root': str(manifest.root),
            'pairs': len(manifest.pairs),
            'roles': roles,
            'bands': int(manifest.axis.size),
            'scale': manifest.scale,
            **manifest.info
        }

    def clear_cache(self) -> None:
        self._cache.clear()
        logger.info("清除所有缓存")

    def _generate_cache_key(self, full_path: Path) -> str:
        key_string = str(full_path)
        if full_path.exists():
            key_string = f"{full_path}_{os.path.getmtime(full_path)}"
        return hashlib.md5(key_string.encode()).hexdigest()
