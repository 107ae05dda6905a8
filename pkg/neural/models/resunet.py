"""
一维 ResUNet 去噪网络
1D ResUNet Spectral Denoiser

编码器-解码器结构：每层一个残差块（卷积 → 批归一化 → ReLU → 卷积 → 批归一化，
加性跳连），步长 2 卷积下采样，转置卷积上采样，对应层之间拼接跳连，最后 1×1
卷积输出单通道。输入长度在前向时零填充到 2^depth 的整数倍并在输出端裁剪。
输出叠加输入光谱（全局残差），网络学习的是噪声修正量。
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict

import numpy as np

from utils.exceptions import ConfigError
from .. import functional as F
from ..layers import BatchNorm, Conv1d, ConvTranspose1d, Identity, Module
from ..tensor import Tensor
from .base import BaseModel


@dataclass(frozen=True)
class ResUNet1dConfig:
    """ResUNet 结构配置"""

    in_len: int
    depth: int = 4
    base_channels: int = 64
    kernel: int = 5
    use_batch_norm: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.in_len < 2:
            raise ConfigError("输入长度必须 ≥ 2", {'in_len': self.in_len})
        if self.depth < 1:
            raise ConfigError("网络层数必须 ≥ 1", {'depth': self.depth})
        if self.base_channels < 1:
            raise ConfigError("基础通道数必须 ≥ 1", {'base_channels': self.base_channels})
        if self.kernel < 1 or self.kernel % 2 == 0:
            raise ConfigError("卷积核宽度必须为正奇数", {'kernel': self.kernel})

    @property
    def padded_len(self) -> int:
        """填充到 2^depth 整数倍后的长度"""
        unit = 2 ** self.depth
        return math.ceil(self.in_len / unit) * unit

    def channels(self, level: int) -> int:
        return self.base_channels * 2 ** level

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ResUNet1dConfig':
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError("ResUNet 配置字段无效", {'error': str(e)})


class ResBlock1d(Module):
    """残差块：conv → norm → ReLU → conv → norm，加性跳连"""

    def __init__(self, channels: int, kernel: int, batch_norm: bool, rng: np.random.Generator):
        super().__init__()
        pad = kernel // 2
        self.conv1 = Conv1d(channels, channels, kernel, rng, padding=pad)
        self.norm1 = BatchNorm(channels) if batch_norm else Identity()
        self.conv2 = Conv1d(channels, channels, kernel, rng, padding=pad)
        self.norm2 = BatchNorm(channels) if batch_norm else Identity()

    def forward(self, x: Tensor) -> Tensor:
        branch = self.norm1(self.conv1(x)).relu()
        branch = self.norm2(self.conv2(branch))
        return x + branch


class ResUNet1d(BaseModel):
    """一维 ResUNet：输入 (N, L)，输出 (N, L)"""

    arch = 'resunet1d'
    task = 'denoise'

    def __init__(self, config: ResUNet1dConfig):
        super().__init__(config)
        rng = np.random.default_rng(config.seed)
        k = config.kernel
        bn = config.use_batch_norm
        depth = config.depth

        self.stem = Conv1d(1, config.channels(0), k, rng, padding=k // 2)
        self.encoders = []
        self.downs = []
        for level in range(depth):
            encoder = ResBlock1d(config.channels(level), k, bn, rng)
            down = Conv1d(config.channels(level), config.channels(level + 1), 2, rng, stride=2)
            setattr(self, f"enc{level}", encoder)
            setattr(self, f"down{level}", down)
            self.encoders.append(encoder)
            self.downs.append(down)

        self.bottleneck = ResBlock1d(config.channels(depth), k, bn, rng)

        self.ups = []
        self.merges = []
        self.decoders = []
        for level in reversed(range(depth)):
            up = ConvTranspose1d(config.channels(level + 1), config.channels(level), 2, rng, stride=2)
            merge = Conv1d(2 * config.channels(level), config.channels(level), k, rng, padding=k // 2)
            decoder = ResBlock1d(config.channels(level), k, bn, rng)
            setattr(self, f"up{level}", up)
            setattr(self, f"merge{level}", merge)
            setattr(self, f"dec{level}", decoder)
            self.ups.append(up)
            self.merges.append(merge)
            self.decoders.append(decoder)

        self.head = Conv1d(config.channels(0), 1, 1, rng)

    def bands(self) -> int:
        return self.config.in_len

    def forward(self, x: Tensor) -> Tensor:
        n, length = x.shape
        if length != self.config.in_len:
            raise ConfigError("输入光谱长度与网络配置不一致", {'expected': self.config.in_len, 'got': length})
        pad = self.config.padded_len - length
        h = F.pad_last(x.reshape(n, 1, length), 0, pad)

        h = self.stem(h)
        skips = []
        for encoder, down in zip(self.encoders, self.downs):
            h = encoder(h)
            skips.append(h)
            h = down(h).relu()
        h = self.bottleneck(h)
        for up, merge, decoder, skip in zip(self.ups, self.merges, self.decoders, reversed(skips)):
            h = up(h)
            h = merge(F.concat([h, skip], axis=1)).relu()
            h = decoder(h)

        out = self.head(h)[:, 0, :length]
        return out + x


def build_resunet1d(config: ResUNet1dConfig) -> ResUNet1d:
    """按配置构建一维 ResUNet"""
    return ResUNet1d(config)
