"""
HyRISR 高光谱超分辨率网络
Hyperspectral Residual Channel-Attention Super-Resolution Network

1×1 卷积先把 B 个波段压缩到 C 个特征通道，经过若干残差组（每组若干残差
通道注意力块加组内跳连）与长跳连，再用亚像素卷积做空间放大，最后 1×1 卷积
恢复 B 个波段。块内使用 ReLU，不使用批归一化。
输出另外叠加输入的最近邻放大结果（全局残差）。
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, List

import numpy as np

from utils.exceptions import ConfigError
from .. import functional as F
from ..layers import Conv2d, Linear, Module
from ..tensor import Tensor
from .base import BaseModel


@dataclass(frozen=True)
class HyrisrConfig:
    """HyRISR 结构配置（完整规模为 18 组 × 16 块）"""

    bands: int
    feature_channels: int = 64
    n_residual_groups: int = 3
    n_rcab_per_group: int = 4
    attention_reduction: int = 16
    scale: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.bands < 1:
            raise ConfigError("波段数必须 ≥ 1", {'bands': self.bands})
        if self.n_residual_groups < 1 or self.n_rcab_per_group < 1:
            raise ConfigError(
                "残差组与块数必须 ≥ 1",
                {'groups': self.n_residual_groups, 'blocks': self.n_rcab_per_group}
            )
        if self.attention_reduction < 1 or self.feature_channels < self.attention_reduction:
            raise ConfigError(
                "特征通道数必须不小于注意力压缩比",
                {'feature_channels': self.feature_channels, 'reduction': self.attention_reduction}
            )
        if self.scale not in (2, 3, 4):
            raise ConfigError("放大倍数必须为 2、3 或 4", {'scale': self.scale})

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'HyrisrConfig':
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError("HyRISR 配置字段无效", {'error': str(e)})


class ChannelAttention(Module):
    """通道注意力：全局平均池化 → C/r → ReLU → C → sigmoid 门控 → 逐通道缩放"""

    def __init__(self, channels: int, reduction: int, rng: np.random.Generator):
        super().__init__()
        if channels < reduction:
            raise ConfigError("通道数小于注意力压缩比", {'channels': channels, 'reduction': reduction})
        self.squeeze = Linear(channels, channels // reduction, rng)
        self.excite = Linear(channels // reduction, channels, rng)

    def gates(self, x: Tensor) -> Tensor:
        """(N, C) 门控值，取值在 (0, 1)"""
        pooled = x.mean(axis=(2, 3))
        return self.excite(self.squeeze(pooled).relu()).sigmoid()

    def forward(self, x: Tensor) -> Tensor:
        n, c = x.shape[:2]
        return x * self.gates(x).reshape(n, c, 1, 1)


class RCAB(Module):
    """残差通道注意力块：conv → ReLU → conv → 通道注意力 → 加性跳连"""

    def __init__(self, channels: int, reduction: int, rng: np.random.Generator):
        super().__init__()
        self.conv1 = Conv2d(channels, channels, 3, rng, padding=1)
        self.conv2 = Conv2d(channels, channels, 3, rng, padding=1)
        self.attention = ChannelAttention(channels, reduction, rng)

    def branch(self, x: Tensor) -> Tensor:
        return self.attention(self.conv2(self.conv1(x).relu()))

    def forward(self, x: Tensor) -> Tensor:
        return x + self.branch(x)


class ResidualGroup(Module):
    def __init__(self, channels: int, reduction: int, n_blocks: int, rng: np.random.Generator):
        super().__init__()
        self.blocks: List[RCAB] = []
        for index in range(n_blocks):
            block = RCAB(channels, reduction, rng)
            setattr(self, f"rcab{index}", block)
            self.blocks.append(block)
        self.conv = Conv2d(channels, channels, 3, rng, padding=1)

    def forward(self, x: Tensor) -> Tensor:
        h = x
        for block in self.blocks:
            h = block(h)
        return x + self.conv(h)


class Upsampler(Module):
    """亚像素卷积放大：×2、×3 为单级，×4 为两级 ×2"""

    def __init__(self, channels: int, scale: int, rng: np.random.Generator):
        super().__init__()
        self.factors = [2, 2] if scale == 4 else [scale]
        self.convs: List[Conv2d] = []
        for index, r in enumerate(self.factors):
            conv = Conv2d(channels, channels * r * r, 3, rng, padding=1)
            setattr(self, f"conv{index}", conv)
            self.convs.append(conv)

    def forward(self, x: Tensor) -> Tensor:
        for conv, r in zip(self.convs, self.factors):
            x = F.pixel_shuffle(conv(x), r)
        return x


class Hyrisr(BaseModel):
    """HyRISR：输入 (N, B, H, W)，输出 (N, B, s·H, s·W)"""

    arch = 'hyrisr'
    task = 'sr'

    def __init__(self, config: HyrisrConfig):
        super().__init__(config)
        rng = np.random.default_rng(config.seed)
        c = config.feature_channels
        self.spectral_down = Conv2d(config.bands, c, 1, rng)
        self.groups: List[ResidualGroup] = []
        for index in range(config.n_residual_groups):
            group = ResidualGroup(c, config.attention_reduction, config.n_rcab_per_group, rng)
            setattr(self, f"group{index}", group)
            self.groups.append(group)
        self.trunk_conv = Conv2d(c, c, 3, rng, padding=1)
        self.upsampler = Upsampler(c, config.scale, rng)
        self.spectral_up = Conv2d(c, config.bands, 1, rng)

    def bands(self) -> int:
        return self.config.bands

    @property
    def scale(self) -> int:
        return self.config.scale

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 4 or x.shape[1] != self.config.bands:
            raise ConfigError("输入波段数与网络配置不一致", {'expected': self.config.bands, 'shape': x.shape})
        head = self.spectral_down(x)
        h = head
        for group in self.groups:
            h = group(h)
        h = self.trunk_conv(h) + head
        out = self.spectral_up(self.upsampler(h))
        return out + F.upsample_nearest2d(x, self.config.scale)


def build_hyrisr(config: HyrisrConfig) -> Hyrisr:
    """按配置构建 HyRISR"""
    return Hyrisr(config)
