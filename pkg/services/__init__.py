"""
服务层模块
Services Module

数据集访问、基线对比与去噪→超分辨率流水线
"""

from .data_service import DataService, Manifest
from .baseline_service import BaselineService
from .pipeline_service import PipelineService

__all__ = ['DataService', 'Manifest', 'BaselineService', 'PipelineService']
