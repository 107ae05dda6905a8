#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
简单启动脚本
Simple Start Script

检查依赖、创建输出目录后运行命令行工具（参数原样传给 app.cli）
"""

import os
import sys

# 添加当前目录到Python路径
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

REQUIRED_PACKAGES = ['numpy', 'pandas', 'scipy', 'openpyxl', 'click', 'PIL', 'joblib']


def check_dependencies() -> bool:
    """检查基本依赖"""
    missing = []
    for name in REQUIRED_PACKAGES:
        try:
            __import__(name)
        except ImportError:
            missing.append(name)
    if missing:
        print(f"✗ 缺少依赖包: {', '.join(missing)}", file=sys.stderr)
        print("请运行: pip install -r requirements.txt", file=sys.stderr)
        return False
    return True


def main() -> int:
    if not check_dependencies():
        return 1

    from utils.config import output_dir_default
    os.makedirs(output_dir_default(), exist_ok=True)

    from app import cli
    return cli.main(args=sys.argv[1:], prog_name='raman', standalone_mode=True)


if __name__ == '__main__':
    sys.exit(main())
