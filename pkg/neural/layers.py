"""
网络层
Network Layers

Module/Parameter 容器（参数、缓冲区、子模块按注册顺序命名）以及卷积、
转置卷积、批归一化、全连接层。权重按 fan-in 做 Kaiming 初始化，随机数由
调用方传入的生成器提供。
"""

from collections import OrderedDict
from typing import Dict, Iterator, List, Tuple

import numpy as np

from utils.exceptions import ConfigError, ShapeError
from . import functional as F
from .tensor import Tensor

DEFAULT_DTYPE = np.float32


class Parameter(Tensor):
    """可训练参数"""

    def __init__(self, data):
        super().__init__(data, requires_grad=True)


class Module:
    """网络模块基类"""

    def __init__(self):
        object.__setattr__(self, '_parameters', OrderedDict())
        object.__setattr__(self, '_buffers', OrderedDict())
        object.__setattr__(self, '_modules', OrderedDict())
        object.__setattr__(self, 'training', True)

    def __setattr__(self, name, value):
        if isinstance(value, Parameter):
            self._parameters[name] = value
        elif isinstance(value, Module):
            self._modules[name] = value
        object.__setattr__(self, name, value)

    def register_buffer(self, name: str, value: np.ndarray) -> None:
        """注册非训练状态（如批归一化滑动统计量）"""
        self._buffers[name] = value
        object.__setattr__(self, name, value)

    def forward(self, *args, **kwargs):
        raise NotImplementedError

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def named_modules(self, prefix: str = '') -> Iterator[Tuple[str, 'Module']]:
        yield prefix, self
        for name, module in self._modules.items():
            yield from module.named_modules(f"{prefix}{name}.")

    def named_parameters(self) -> Iterator[Tuple[str, Parameter]]:
        for prefix, module in self.named_modules():
            for name, param in module._parameters.items():
                yield f"{prefix}{name}", param

    def parameters(self) -> List[Parameter]:
        return [p for _, p in self.named_parameters()]

    def named_buffers(self) -> Iterator[Tuple[str, np.ndarray]]:
        for prefix, module in self.named_modules():
            for name, buffer in module._buffers.items():
                yield f"{prefix}{name}", buffer

    def state_dict(self) -> Dict[str, np.ndarray]:
        """参数与缓冲区的有序快照（拷贝）"""
        state = OrderedDict((name, p.data.copy()) for name, p in self.named_parameters())
        state.update((name, b.copy()) for name, b in self.named_buffers())
        return state

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        """
        载入权重（名称与形状必须完全匹配）

        Raises:
            ConfigError: 名称集合不一致
            ShapeError: 形状不一致
        """
        expected = [name for name, _ in self.named_parameters()] + [name for name, _ in self.named_buffers()]
        if set(expected) != set(state):
            missing = sorted(set(expected) - set(state))
            unexpected = sorted(set(state) - set(expected))
            raise ConfigError("权重名称与网络结构不一致", {'missing': missing, 'unexpected': unexpected})
        for name, param in self.named_parameters():
            value = np.asarray(state[name])
            if value.shape != param.shape:
                raise ShapeError("权重形状不一致", {'name': name, 'expected': param.shape, 'got': value.shape})
            param.data = value.astype(param.dtype, copy=True)
        for name, buffer in self.named_buffers():
            value = np.asarray(state[name])
            if value.shape != buffer.shape:
                raise ShapeError("缓冲区形状不一致", {'name': name, 'expected': buffer.shape, 'got': value.shape})
            buffer[...] = value

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()

    def train(self, mode: bool = True) -> 'Module':
        for _, module in self.named_modules():
            object.__setattr__(module, 'training', mode)
        return self

    def eval(self) -> 'Module':
        return self.train(False)

    def astype(self, dtype) -> 'Module':
        """参数与缓冲区转换精度（梯度检验使用 float64）"""
        for _, module in self.named_modules():
            for param in module._parameters.values():
                param.data = param.data.astype(dtype)
                param.grad = None
            for name, buffer in list(module._buffers.items()):
                module.register_buffer(name, buffer.astype(dtype))
        return self

    @property
    def dtype(self):
        params = self.parameters()
        return params[0].dtype if params else DEFAULT_DTYPE

    def num_parameters(self) -> int:
        return int(sum(p.data.size for p in self.parameters()))


def kaiming(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int) -> np.ndarray:
    """fan-in Kaiming 正态初始化"""
    return (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(DEFAULT_DTYPE)


class Conv1d(Module):
    def __init__(self, in_channels: int, out_channels: int, kernel: int, rng: np.random.Generator,
                 stride: int = 1, padding: int = 0, bias: bool = True):
        super().__init__()
        self.stride = stride
        self.padding = padding
        self.weight = Parameter(kaiming(rng, (out_channels, in_channels, kernel), in_channels * kernel))
        self.bias = Parameter(np.zeros(out_channels, dtype=DEFAULT_DTYPE)) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        return F.conv1d(x, self.weight, self.bias, self.stride, self.padding)


class Conv2d(Module):
    def __init__(self, in_channels: int, out_channels: int, kernel: int, rng: np.random.Generator,
                 stride: int = 1, padding: int = 0, bias: bool = True):
        super().__init__()
        self.stride = stride
        self.padding = padding
        self.weight = Parameter(kaiming(rng, (out_channels, in_channels, kernel, kernel),
                                        in_channels * kernel * kernel))
        self.bias = Parameter(np.zeros(out_channels, dtype=DEFAULT_DTYPE)) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        return F.conv2d(x, self.weight, self.bias, self.stride, self.padding)


class ConvTranspose1d(Module):
    def __init__(self, in_channels: int, out_channels: int, kernel: int, rng: np.random.Generator,
                 stride: int = 1):
        super().__init__()
        self.stride = stride
        self.weight = Parameter(kaiming(rng, (in_channels, out_channels, kernel), in_channels * kernel))
        self.bias = Parameter(np.zeros(out_channels, dtype=DEFAULT_DTYPE))

    def forward(self, x: Tensor) -> Tensor:
        return F.conv_transpose1d(x, self.weight, self.bias, self.stride)


class Linear(Module):
    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        super().__init__()
        self.weight = Parameter(kaiming(rng, (out_features, in_features), in_features))
        self.bias = Parameter(np.zeros(out_features, dtype=DEFAULT_DTYPE))

    def forward(self, x: Tensor) -> Tensor:
        return F.linear(x, self.weight, self.bias)


class BatchNorm(Module):
    """通道批归一化（适用于 (N, C, L) 与 (N, C, H, W)）"""

    def __init__(self, channels: int, momentum: float = 0.1, eps: float = 1e-5):
        super().__init__()
        self.momentum = momentum
        self.eps = eps
        self.weight = Parameter(np.ones(channels, dtype=DEFAULT_DTYPE))
        self.bias = Parameter(np.zeros(channels, dtype=DEFAULT_DTYPE))
        self.register_buffer('running_mean', np.zeros(channels, dtype=DEFAULT_DTYPE))
        self.register_buffer('running_var', np.ones(channels, dtype=DEFAULT_DTYPE))

    def forward(self, x: Tensor) -> Tensor:
        if x.shape[1] != self.weight.shape[0]:
            raise ShapeError("批归一化通道数不一致", {'x': x.shape, 'channels': self.weight.shape[0]})
        return F.batch_norm(x, self.weight, self.bias, self.running_mean, self.running_var,
                            self.training, self.momentum, self.eps)


class Identity(Module):
    def forward(self, x: Tensor) -> Tensor:
        return x
