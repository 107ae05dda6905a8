"""
成像时间与加速比
Imaging Time and Speed-up Accounting

采集时间按 光谱数 × 单条积分时间 计算，忽略平台移动等开销
"""

import math

from utils.exceptions import ParamError, ValidationError


def speedup(t_low: float, t_high: float, s: int) -> float:
    """
    有效成像加速比 (t_high / t_low) · s²

    Args:
        t_low: 低信噪比单条积分时间（秒）
        t_high: 高信噪比单条积分时间（秒）
        s: 空间放大倍数（1 表示不做超分辨率）

    Raises:
        ValidationError: 时间非正
        ParamError: s 不是 ≥ 1 的整数，或 t_low > t_high
    """
    if not (t_low > 0 and t_high > 0):
        raise ValidationError("积分时间必须为正", {'t_low': t_low, 't_high': t_high})
    if t_low > t_high:
        raise ParamError("低信噪比积分时间不能大于高信噪比积分时间", {'t_low': t_low, 't_high': t_high})
    if s != int(s) or s < 1:
        raise ParamError("放大倍数必须是 ≥ 1 的整数", {'scale': s})
    return float(t_high / t_low * int(s) ** 2)


def acquisition_time(height: int, width: int, t: float) -> float:
    """H×W 栅格扫描的采集时间（秒）"""
    if height < 0 or width < 0 or not t > 0:
        raise ValidationError("采集参数无效", {'height': height, 'width': width, 't': t})
    return float(height * width * t)


def format_min_sec(seconds: float) -> str:
    """秒数格式化为 MM:SS（向下取整秒）"""
    if not seconds >= 0 or not math.isfinite(seconds):
        raise ValidationError("时间必须为非负有限值", {'seconds': seconds})
    total = int(math.floor(seconds))
    return f"{total // 60:02d}:{total % 60:02d}"
