"""
配置管理
Configuration

命令默认值、TOML 配置文件加载与解析后配置的回显
"""

import json
import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from typing import Any, Dict, Optional

from .exceptions import ConfigError, IoError

logger = logging.getLogger(__name__)

# 各命令的内置默认值；配置文件覆盖默认值，命令行参数覆盖配置文件
DEFAULTS: Dict[str, Dict[str, Any]] = {
    'synth': {
        'cubes': 8,
        'size': 32,
        'bands': 200,
        'scale': 2,
        't_low': 0.1,
        't_high': 1.0,
        'library': 'cell',
        'seed': 0,
    },
    'train': {
        'epochs': 20,
        'batch_size': 64,
        'max_lr': None,
        'scheduler': None,
        'seed': 0,
        'depth': 2,
        'base_channels': 8,
        'kernel': 5,
        'features': 16,
        'groups': 3,
        'blocks': 4,
        'reduction': 4,
        'crop_size': 8,
        'mixup_alpha': 0.2,
        'p_mixup': 0.0,
        'max_spectral_shift': 0,
        'val_fraction': 0.1,
        'cv': 'none',
    },
    'pipeline': {
        'k': 4,
        'peak': 1450.0,
        'half_width': 10.0,
        'sg_order': 1,
        'sg_frame': 9,
        'seed': 0,
        't_high': 1.0,
    },
    'baseline': {
        'mode': 'all',
        'roles': 'test',
    },
}


def output_dir_default() -> str:
    """默认输出目录（环境变量 RAMAN_OUTPUT_DIR）"""
    return os.environ.get('RAMAN_OUTPUT_DIR', 'outputs')


def log_level_default() -> str:
    """默认日志级别（环境变量 RAMAN_LOG_LEVEL）"""
    return os.environ.get('RAMAN_LOG_LEVEL', 'INFO')


def load_config_file(path: Optional[str]) -> Dict[str, Dict[str, Any]]:
    """
    加载 TOML 配置文件

    Args:
        path: 配置文件路径，None 时返回空配置

    Returns:
        Dict[str, Dict[str, Any]]: 命令名到参数表的映射

    Raises:
        IoError: 文件无法读取
        ConfigError: TOML 语法错误或结构不是按命令分表
    """
    if not path:
        return {}
    try:
        with open(path, 'rb') as f:
            data = tomllib.load(f)
    except OSError as e:
        raise IoError(f"无法读取配置文件: {path}", {'original_error': str(e)})
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"配置文件格式错误: {path}", {'original_error': str(e)})

    for section, values in data.items():
        if not isinstance(values, dict):
            raise ConfigError(
                f"配置项 '{section}' 必须是表（按命令分组）",
                {'available_commands': sorted(DEFAULTS)}
            )
    logger.info(f"已加载配置文件: {path}")
    return data


def to_default_map(file_config: Dict[str, Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
    """把配置文件转换为 click 的 default_map（键名中的连字符转为下划线）"""
    return {
        command: {key.replace('-', '_'): value for key, value in values.items()}
        for command, values in file_config.items()
    }


def resolve_config(command: str, params: Dict[str, Any]) -> Dict[str, Any]:
    """
    合并命令默认值与实际参数

    Args:
        command: 命令名
        params: click 解析后的参数（已包含配置文件值）

    Returns:
        Dict[str, Any]: 解析后的完整配置
    """
    resolved = dict(DEFAULTS.get(command, {}))
    for key, value in params.items():
        if value is not None or key not in resolved:
            resolved[key] = value
    resolved['command'] = command
    return resolved


def echo_config(resolved: Dict[str, Any], out_dir: Optional[str] = None) -> str:
    """
    回显解析后的配置，便于从日志复现任一产物

    Args:
        resolved: 解析后的配置
        out_dir: 输出目录，提供时写入 resolved_config.json

    Returns:
        str: 配置的 JSON 文本
    """
    text = json.dumps(resolved, sort_keys=True, default=str)
    logger.info(f"resolved config: {text}")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, 'resolved_config.json'), 'w', encoding='utf-8') as f:
            f.write(text + '\n')
    return text
