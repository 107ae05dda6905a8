"""
自定义异常类
Custom Exception Classes

定义拉曼高光谱处理工具包中使用的各种异常类
"""


class RamanError(Exception):
    """工具包异常基类"""
    def __init__(self, message: str, details: dict = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class FormatError(RamanError):
    """文件格式异常（魔数错误、数据截断）"""
    pass


class ValidationError(RamanError, ValueError):
    """数据验证异常（非有限值、波数轴非递增等）"""
    pass


class RangeError(RamanError, ValueError):
    """范围异常（空的波数区间、越界步数）"""
    pass


class ParamError(RamanError, ValueError):
    """参数异常"""
    pass


class RankError(RamanError, ValueError):
    """矩阵秩不足异常"""
    pass


class ShapeError(RamanError, ValueError):
    """维度不匹配异常"""
    pass


class ConfigError(RamanError):
    """配置异常（网络结构配置、检查点不匹配）"""
    pass


class DataError(RamanError):
    """数据集异常"""
    pass


class IoError(RamanError, OSError):
    """文件读写异常"""
    pass
