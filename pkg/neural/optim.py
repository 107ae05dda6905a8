"""
优化器与学习率调度
Optimizer and Learning-rate Schedule

Adam（β1 = 0.9, β2 = 0.999, ε = 1e-8，带偏差校正）与余弦单周期学习率
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from utils.exceptions import RangeError, ShapeError
from .layers import Module

BETA1 = 0.9
BETA2 = 0.999
EPS = 1e-8


@dataclass
class AdamMoments:
    """一阶矩 m 与二阶矩 v（与参数一一对应）"""

    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def zeros_like(cls, params: Sequence[np.ndarray]) -> 'AdamMoments':
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])


def adam_step(params: Sequence[np.ndarray], grads: Sequence[np.ndarray], moments: AdamMoments,
              lr: float, t: int, beta1: float = BETA1, beta2: float = BETA2,
              eps: float = EPS) -> Tuple[List[np.ndarray], AdamMoments]:
    """
    单步 Adam 更新（不修改输入）

    Args:
        params: 参数数组
        grads: 梯度数组
        moments: 当前矩估计
        lr: 学习率
        t: 步序号（从 1 开始）

    Returns:
        Tuple[List[np.ndarray], AdamMoments]: 更新后的参数与矩估计

    Raises:
        ShapeError: 参数、梯度与矩的形状不一致
        RangeError: t < 1
    """
    if t < 1:
        raise RangeError("Adam 步序号必须 ≥ 1", {'t': t})
    if not (len(params) == len(grads) == len(moments.m) == len(moments.v)):
        raise ShapeError("参数、梯度与矩的数量不一致")
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, moments.m, moments.v):
        if not (p.shape == g.shape == m.shape == v.shape):
            raise ShapeError("参数与梯度形状不一致", {'param': p.shape, 'grad': g.shape})
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        m_hat = m / (1 - beta1 ** t)
        v_hat = v / (1 - beta2 ** t)
        new_params.append((p - lr * m_hat / (np.sqrt(v_hat) + eps)).astype(p.dtype))
        new_m.append(m.astype(p.dtype))
        new_v.append(v.astype(p.dtype))
    return new_params, AdamMoments(new_m, new_v)


class Adam:
    """绑定到模型参数的 Adam 优化器"""

    def __init__(self, model: Module):
        self.names = [name for name, _ in model.named_parameters()]
        self.params = model.parameters()
        self.moments = AdamMoments.zeros_like([p.data for p in self.params])
        self.t = 0

    def step(self, lr: float) -> None:
        self.t += 1
        grads = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in self.params]
        values, self.moments = adam_step([p.data for p in self.params], grads, self.moments, lr, self.t)
        for param, value in zip(self.params, values):
            param.data = value

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def state_dict(self) -> Dict[str, np.ndarray]:
        """adam.m/<参数名>、adam.v/<参数名>"""
        state = {}
        for name, m in zip(self.names, self.moments.m):
            state[f"adam.m/{name}"] = m.copy()
        for name, v in zip(self.names, self.moments.v):
            state[f"adam.v/{name}"] = v.copy()
        return state

    def load_state_dict(self, state: Dict[str, np.ndarray], t: int) -> None:
        self.moments = AdamMoments(
            [np.array(state[f"adam.m/{name}"], dtype=p.dtype) for name, p in zip(self.names, self.params)],
            [np.array(state[f"adam.v/{name}"], dtype=p.dtype) for name, p in zip(self.names, self.params)]
        )
        self.t = int(t)


def one_cycle_lr(step: int, total_steps: int, max_lr: float, pct_start: float = 0.3,
                 div_start: float = 25.0, div_final: float = 1e4) -> float:
    """
    余弦单周期学习率

    前 30% 的步数从 max_lr/div_start 余弦升至 max_lr，其余步数余弦降至
    max_lr/div_final；峰值步 round(pct_start·total_steps) 处恰好为 max_lr。

    Raises:
        RangeError: step 不在 [0, total_steps)
    """
    if not 0 <= step < total_steps:
        raise RangeError("学习率调度步数越界", {'step': step, 'total_steps': total_steps})
    peak = min(int(round(pct_start * total_steps)), total_steps - 1)
    start_lr = max_lr / div_start
    final_lr = max_lr / div_final
    if step <= peak:
        progress = step / peak if peak > 0 else 1.0
        return _cosine(start_lr, max_lr, progress)
    progress = (step - peak) / (total_steps - 1 - peak)
    return _cosine(max_lr, final_lr, progress)


def _cosine(start: float, end: float, progress: float) -> float:
    return end + (start - end) * (1.0 + math.cos(math.pi * progress)) / 2.0
