"""
检查点文件
Checkpoint Files

布局（小端序）：
    magic  b'DPRC'
    u32    版本号
    u32    头部字节数
    头部   UTF-8 JSON（键排序）：结构标签与配置、轮次、来源信息、数组名称与形状、
           负载 SHA-256、优化器步数、归一化方式
    负载   按头部声明顺序排列的 f32 数组（先权重与缓冲区，再 adam.m/ 与 adam.v/ 矩）
"""

import hashlib
import json
import logging
import struct
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from utils.exceptions import FormatError, IoError
from .models import BaseModel, ModelFactory

logger = logging.getLogger(__name__)

MAGIC = b'DPRC'
VERSION = 1
NORMALIZATION = 'cube_max'
_PREFIX = struct.Struct('<4sII')


def _f32(array: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(array, dtype='<f4')


@dataclass
class Checkpoint:
    """网络结构、权重、优化器状态与训练来源"""

    arch: str
    config: Dict[str, Any]
    weights: Dict[str, np.ndarray]
    optimizer: Dict[str, np.ndarray] = field(default_factory=OrderedDict)
    optimizer_step: int = 0
    epoch: int = 0
    provenance: Dict[str, Any] = field(default_factory=dict)
    normalization: str = NORMALIZATION

    def __post_init__(self):
        self.weights = OrderedDict((k, _f32(v)) for k, v in self.weights.items())
        self.optimizer = OrderedDict((k, _f32(v)) for k, v in self.optimizer.items())

    @classmethod
    def from_model(cls, model: BaseModel, optimizer: Optional[Dict[str, np.ndarray]] = None,
                   optimizer_step: int = 0, epoch: int = 0,
                   provenance: Optional[Dict[str, Any]] = None) -> 'Checkpoint':
        return cls(
            arch=model.arch,
            config=model.config_dict(),
            weights=model.state_dict(),
            optimizer=optimizer or OrderedDict(),
            optimizer_step=optimizer_step,
            epoch=epoch,
            provenance=dict(provenance or {})
        )

    def build_model(self) -> BaseModel:
        """按检查点配置重建网络并载入权重（评估模式）"""
        model = ModelFactory.create_model(self.arch, self.config)
        model.load_state_dict(self.weights)
        return model.eval()

    def _arrays(self):
        yield from self.weights.items()
        yield from self.optimizer.items()

    def payload(self) -> bytes:
        return b''.join(array.tobytes() for _, array in self._arrays())

    def sha256(self) -> str:
        """权重负载的 SHA-256"""
        return hashlib.sha256(self.payload()).hexdigest()

    def header(self) -> Dict[str, Any]:
        return {
            'arch': self.arch,
            'config': self.config,
            'epoch': int(self.epoch),
            'provenance': self.provenance,
            'normalization': self.normalization,
            'optimizer_step': int(self.optimizer_step),
            'weights': [{'name': k, 'shape': list(v.shape)} for k, v in self.weights.items()],
            'optimizer': [{'name': k, 'shape': list(v.shape)} for k, v in self.optimizer.items()],
            'sha256': self.sha256()
        }

    def encode(self) -> bytes:
        header = json.dumps(self.header(), sort_keys=True, separators=(',', ':'), ensure_ascii=False).encode('utf-8')
        return _PREFIX.pack(MAGIC, VERSION, len(header)) + header + self.payload()

    @classmethod
    def decode(cls, blob: bytes) -> 'Checkpoint':
        """
        解析检查点字节串

        Raises:
            FormatError: 魔数、版本、头部或负载无效
        """
        if len(blob) < _PREFIX.size:
            raise FormatError("检查点文件头不完整", {'size': len(blob)})
        magic, version, header_len = _PREFIX.unpack_from(blob)
        if magic != MAGIC:
            raise FormatError("检查点魔数错误", {'magic': magic.hex()})
        if version != VERSION:
            raise FormatError("不支持的检查点版本", {'version': version})
        start = _PREFIX.size
        if len(blob) < start + header_len:
            raise FormatError("检查点头部被截断")
        try:
            header = json.loads(blob[start:start + header_len].decode('utf-8'))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise FormatError("检查点头部不是合法的 JSON", {'error': str(e)})

        offset = start + header_len

        def read(entries):
            nonlocal offset
            arrays = OrderedDict()
            for entry in entries:
                shape = tuple(int(d) for d in entry['shape'])
                nbytes = 4 * int(np.prod(shape, dtype=np.int64))
                if offset + nbytes > len(blob):
                    raise FormatError("检查点负载被截断", {'array': entry['name']})
                arrays[entry['name']] = np.frombuffer(blob, dtype='<f4', count=nbytes // 4,
                                                      offset=offset).reshape(shape).copy()
                offset += nbytes
            return arrays

        try:
            weights = read(header['weights'])
            optimizer = read(header['optimizer'])
            ckpt = cls(
                arch=header['arch'],
                config=header['config'],
                weights=weights,
                optimizer=optimizer,
                optimizer_step=header['optimizer_step'],
                epoch=header['epoch'],
                provenance=header['provenance'],
                normalization=header['normalization']
            )
        except KeyError as e:
            raise FormatError("检查点头部缺少字段", {'field': str(e)})
        if offset != len(blob):
            raise FormatError("检查点末尾存在多余字节", {'extra': len(blob) - offset})
        if ckpt.sha256() != header.get('sha256'):
            raise FormatError("检查点负载校验失败")
        return ckpt

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(self.encode())
        except OSError as e:
            raise IoError(f"写入检查点失败: {path}", {'error': str(e)})
        logger.info(f"检查点已保存: {path}（{self.arch}，epoch {self.epoch}）")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'Checkpoint':
        path = Path(path)
        try:
            blob = path.read_bytes()
        except OSError as e:
            raise IoError(f"读取检查点失败: {path}", {'error': str(e)})
        return cls.decode(blob)


def save_checkpoint(ckpt: Checkpoint, path: Union[str, Path]) -> Path:
    return ckpt.save(path)


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    return Checkpoint.load(path)
