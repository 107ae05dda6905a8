"""
网络结构
Model Architectures
"""

from .base import BaseModel
from .resunet import ResUNet1d, ResUNet1dConfig, ResBlock1d, build_resunet1d
from .hyrisr import Hyrisr, HyrisrConfig, ChannelAttention, RCAB, ResidualGroup, Upsampler, build_hyrisr
from .factory import ModelFactory

__all__ = [
    'BaseModel',
    'ResUNet1d',
    'ResUNet1dConfig',
    'ResBlock1d',
    'build_resunet1d',
    'Hyrisr',
    'HyrisrConfig',
    'ChannelAttention',
    'RCAB',
    'ResidualGroup',
    'Upsampler',
    'build_hyrisr',
    'ModelFactory'
]
