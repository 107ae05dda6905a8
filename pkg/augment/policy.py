"""
增强策略与训练样本对
Augmentation Policy and Training Pair
"""

import math
from dataclasses import dataclass
from typing import Optional

from hypercube import HyperCube
from utils.exceptions import ParamError, ShapeError


@dataclass(frozen=True)
class AugmentPolicy:
    """
    训练期数据增强策略

    crop_size 以输入（低分辨率/低信噪比）像素计，None 表示不裁剪。
    """

    crop_size: Optional[int] = None
    p_flip_h: float = 0.5
    p_flip_v: float = 0.5
    p_rot90: float = 0.5
    mixup_alpha: float = 0.2
    p_mixup: float = 0.0
    max_spectral_shift: int = 0
    p_spectral_flip: float = 0.0

    def __post_init__(self):
        for name in ('p_flip_h', 'p_flip_v', 'p_rot90', 'p_mixup', 'p_spectral_flip'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParamError("概率必须在 [0, 1] 内", {name: value})
        if self.crop_size is not None and self.crop_size < 1:
            raise ParamError("裁剪尺寸必须 ≥ 1", {'crop_size': self.crop_size})
        if not self.mixup_alpha > 0:
            raise ParamError("mixup α 必须为正", {'mixup_alpha': self.mixup_alpha})
        if self.max_spectral_shift < 0:
            raise ParamError("光谱平移上限必须 ≥ 0", {'max_spectral_shift': self.max_spectral_shift})

    @property
    def spatial(self) -> bool:
        """是否可能施加翻转或旋转"""
        return self.p_flip_h > 0 or self.p_flip_v > 0 or self.p_rot90 > 0

    @classmethod
    def identity(cls) -> 'AugmentPolicy':
        """不做任何变换的策略"""
        return cls(p_flip_h=0.0, p_flip_v=0.0, p_rot90=0.0)


@dataclass(frozen=True)
class TrainingPair:
    """
    训练样本对：输入（低分辨率或低信噪比）与目标（高分辨率或高信噪比）

    scale 为 1 时两者尺寸相同（去噪）；否则输入等于目标按 scale 抽取后的尺寸。
    """

    inp: HyperCube
    target: HyperCube
    scale: int = 1

    def __post_init__(self):
        if self.inp.bands != self.target.bands:
            raise ShapeError("输入与目标波段数不一致", {'inp': self.inp.shape, 'target': self.target.shape})
        expected = (math.ceil(self.target.height / self.scale), math.ceil(self.target.width / self.scale))
        if (self.inp.height, self.inp.width) != expected:
            raise ShapeError(
                "输入与目标空间尺寸不满足放大倍数关系",
                {'inp': self.inp.shape, 'target': self.target.shape, 'scale': self.scale}
            )

    @property
    def shape(self):
        return self.inp.shape, self.target.shape
