"""
神经网络模块
Neural Network Module

numpy 自动微分张量、一维 ResUNet 去噪网络、HyRISR 超分辨率网络、
Adam 与单周期学习率、检查点读写、训练与推理
"""

from .tensor import Tensor, no_grad
from .layers import Module, Parameter, Conv1d, Conv2d, ConvTranspose1d, Linear, BatchNorm
from .functional import (
    conv1d, conv2d, conv_transpose1d, batch_norm, concat, pad_last,
    pixel_shuffle, pixel_unshuffle, upsample_nearest2d, l1_loss, linear
)
from .models import (
    BaseModel, ModelFactory, ResUNet1d, ResUNet1dConfig, Hyrisr, HyrisrConfig,
    ChannelAttention, build_resunet1d, build_hyrisr
)
from .optim import Adam, AdamMoments, adam_step, one_cycle_lr
from .checkpoint import Checkpoint, save_checkpoint, load_checkpoint
from .trainer import (
    TrainConfig, TrainResult, train, fine_tune, leave_one_out_folds, cross_validate,
    evaluate_l1, build_model, DEFAULT_MAX_LR, DEFAULT_SCHEDULER
)
from .inference import infer_denoise, infer_superres

__all__ = [
    'Tensor', 'no_grad',
    'Module', 'Parameter', 'Conv1d', 'Conv2d', 'ConvTranspose1d', 'Linear', 'BatchNorm',
    'conv1d', 'conv2d', 'conv_transpose1d', 'batch_norm', 'concat', 'pad_last',
    'pixel_shuffle', 'pixel_unshuffle', 'upsample_nearest2d', 'l1_loss', 'linear',
    'BaseModel', 'ModelFactory', 'ResUNet1d', 'ResUNet1dConfig', 'Hyrisr', 'HyrisrConfig',
    'ChannelAttention', 'build_resunet1d', 'build_hyrisr',
    'Adam', 'AdamMoments', 'adam_step', 'one_cycle_lr',
    'Checkpoint', 'save_checkpoint', 'load_checkpoint',
    'TrainConfig', 'TrainResult', 'train', 'fine_tune', 'leave_one_out_folds', 'cross_validate',
    'evaluate_l1', 'build_model', 'DEFAULT_MAX_LR', 'DEFAULT_SCHEDULER',
    'infer_denoise', 'infer_superres'
]
