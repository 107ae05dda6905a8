"""
工具模块
Utilities Module

异常、错误处理与配置
"""

from .exceptions import (
    RamanError, FormatError, ValidationError, RangeError, ParamError,
    RankError, ShapeError, ConfigError, DataError, IoError
)

__all__ = [
    'RamanError', 'FormatError', 'ValidationError', 'RangeError', 'ParamError',
    'RankError', 'ShapeError', 'ConfigError', 'DataError', 'IoError'
]
