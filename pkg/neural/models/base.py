"""
模型基类
Base Model Class

所有网络结构的通用接口：结构标签、任务类型、可序列化配置与前向推理
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from ..layers import Module
from ..tensor import Tensor, no_grad

logger = logging.getLogger(__name__)


class BaseModel(Module, ABC):
    """网络模型基类"""

    arch: str = ''
    task: str = ''

    def __init__(self, config):
        super().__init__()
        self.config = config

    @abstractmethod
    def forward(self, x: Tensor) -> Tensor:
        """
        前向计算（子类必须实现）

        Returns:
            Tensor: 网络输出
        """
        pass

    @abstractmethod
    def bands(self) -> int:
        """模型期望的波段数"""
        pass

    def config_dict(self) -> Dict[str, Any]:
        """结构配置（写入检查点头部）"""
        return self.config.to_dict()

    def predict(self, x: np.ndarray) -> np.ndarray:
        """评估模式、无梯度的前向推理"""
        was_training = self.training
        self.eval()
        try:
            with no_grad():
                return self.forward(Tensor(np.asarray(x, dtype=self.dtype))).data
        finally:
            self.train(was_training)
