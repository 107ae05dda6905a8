"""
错误处理器
Error Handlers

为命令行提供统一的错误处理机制（退出码约定：0 成功，1 运行/数据错误，2 用法错误）
"""

import functools
import logging
import sys
import traceback

import click

from .exceptions import RamanError, ConfigError, DataError, FormatError, IoError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _error_type(error: Exception) -> str:
    """获取错误类型标识"""
    if isinstance(error, FormatError):
        return 'format_error'
    if isinstance(error, ConfigError):
        return 'configuration_error'
    if isinstance(error, DataError):
        return 'data_error'
    if isinstance(error, (IoError, OSError)):
        return 'io_error'
    return 'analysis_error'


def handle_cli_errors(func):
    """
    命令错误处理装饰器

    click 自身的用法错误保持退出码 2；工具包异常与文件错误以退出码 1 结束，
    诊断信息写到 stderr。

    Args:
        func: click 命令回调

    Returns:
        包装后的回调
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.exceptions.ClickException:
            raise
        except RamanError as error:
            logger.error(f"{_error_type(error)}: {error.message}")
            click.echo(f"Error: {error.message}", err=True)
            if error.details:
                click.echo(f"Details: {error.details}", err=True)
            sys.exit(EXIT_RUNTIME)
        except OSError as error:
            logger.error(f"io_error: {error}")
            click.echo(f"Error: {error}", err=True)
            sys.exit(EXIT_RUNTIME)
        except Exception as error:
            # 未预期错误
            logger.error(f"未预期错误: {error}")
            logger.error(traceback.format_exc())
            click.echo(f"Error: {error}", err=True)
            sys.exit(EXIT_RUNTIME)
    return wrapper



def safe_execute(func, *args, error_message="操作失败", **kwargs):
    """
    执行函数，把第三方异常转换为工具包异常

    Args:
        func: 要执行的函数
        *args: 函数参数
        error_message: 转换后的错误消息
        **kwargs: 函数关键字参数

    Returns:
        函数执行结果

    Raises:
        RamanError: 原始异常不是工具包异常时，原始错误记录在 details 中
    """
    try:
        return func(*args, **kwargs)
    except RamanError:
        raise
    except Exception as e:
        logger.error(f"{error_message}: {e}")
        raise RamanError(error_message, {'original_error': str(e), 'error_type': type(e).__name__})
