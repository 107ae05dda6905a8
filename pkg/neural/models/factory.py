"""
模型工厂
Model Factory

按结构标签创建网络、解析检查点中的结构配置
"""

import logging
from typing import Any, Dict, List, Tuple, Type

from utils.exceptions import ConfigError
from .base import BaseModel
from .hyrisr import Hyrisr, HyrisrConfig
from .resunet import ResUNet1d, ResUNet1dConfig

logger = logging.getLogger(__name__)


class ModelFactory:
    """模型工厂类"""

    # 注册的结构：标签 → (配置类, 模型类)
    _models: Dict[str, Tuple[Type, Type[BaseModel]]] = {
        ResUNet1d.arch: (ResUNet1dConfig, ResUNet1d),
        Hyrisr.arch: (HyrisrConfig, Hyrisr),
    }

    @classmethod
    def create_model(cls, arch: str, config: Dict[str, Any]) -> BaseModel:
        """
        创建模型实例

        Args:
            arch: 结构标签
            config: 结构配置字典

        Returns:
            BaseModel: 模型实例

        Raises:
            ConfigError: 结构标签不支持或配置无效
        """
        if arch not in cls._models:
            raise ConfigError(f"不支持的网络结构: {arch}", {'available': cls.get_available_models()})
        config_class, model_class = cls._models[arch]
        model = model_class(config_class.from_dict(dict(config)))
        logger.info(f"创建{arch}模型，参数量 {model.num_parameters()}")
        return model

    @classmethod
    def get_available_models(cls) -> List[str]:
        return list(cls._models.keys())

    @classmethod
    def register_model(cls, arch: str, config_class: Type, model_class: Type[BaseModel]) -> None:
        """
        注册新的网络结构

        Raises:
            ConfigError: 模型类未继承 BaseModel
        """
        if not issubclass(model_class, BaseModel):
            raise ConfigError(f"{model_class}必须继承自BaseModel")
        cls._models[arch] = (config_class, model_class)
        logger.info(f"注册新网络结构: {arch}")

    @classmethod
    def arch_for_task(cls, task: str) -> str:
        for arch, (_, model_class) in cls._models.items():
            if model_class.task == task:
                return arch
        raise ConfigError(f"没有适用于任务 {task} 的网络结构")
