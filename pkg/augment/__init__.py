"""
数据增强模块
Augmentation Module

训练期空间与光谱增强、mixup
"""

from .policy import AugmentPolicy, TrainingPair
from .transforms import (
    augment_pair, mixup, spectral_shift, spectral_flip,
    sample_mixup_lambda, worker_rng
)

__all__ = [
    'AugmentPolicy',
    'TrainingPair',
    'augment_pair',
    'mixup',
    'spectral_shift',
    'spectral_flip',
    'sample_mixup_lambda',
    'worker_rng'
]
