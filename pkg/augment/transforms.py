"""
增强变换
Augmentation Transforms

空间变换对输入与目标按各自尺度同步施加。超分辨率样本对在启用空间变换时先把目标裁到
s·(n−1)+1（输入首末像素对应的格点之间），翻转与旋转在此范围内是严格的置换，
decimate(目标, s) == 输入 的关系在变换后仍然精确成立。
"""

import logging
from typing import Tuple

import numpy as np

from hypercube import HyperCube
from utils.exceptions import ParamError, ShapeError
from .policy import AugmentPolicy, TrainingPair

logger = logging.getLogger(__name__)


def worker_rng(seed: int, worker: int) -> np.random.Generator:
    """第 worker 个并行工作进程的独立随机流（SeedSequence 派生）"""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(worker,)))


def sample_mixup_lambda(rng: np.random.Generator, alpha: float) -> float:
    """λ ~ Beta(α, α)"""
    if not alpha > 0:
        raise ParamError("mixup α 必须为正", {'alpha': alpha})
    return float(rng.beta(alpha, alpha))


def spectral_shift(cube: HyperCube, k: int) -> HyperCube:
    """
    光谱平移：输出波段 b = 输入波段 b − k，空出的波段复制边缘值；波数轴不变

    Raises:
        ParamError: |k| ≥ B
    """
    if abs(k) >= cube.bands:
        raise ParamError("光谱平移量必须小于波段数", {'k': k, 'bands': cube.bands})
    if k == 0:
        return cube
    source = np.clip(np.arange(cube.bands) - k, 0, cube.bands - 1)
    return cube.with_data(cube.data[:, :, source])


def spectral_flip(cube: HyperCube) -> HyperCube:
    """波段顺序反转（波数轴不变）"""
    return cube.with_data(cube.data[:, :, ::-1])


def _crop(data: np.ndarray, top: int, left: int, height: int, width: int) -> np.ndarray:
    return data[top:top + height, left:left + width]


def _grid_extent(n_in: int, s: int) -> int:
    return s * (n_in - 1) + 1


def _flip(inp: np.ndarray, target: np.ndarray, axis: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.flip(inp, axis=axis), np.flip(target, axis=axis)


def _rot90(inp: np.ndarray, target: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    inp_t = np.swapaxes(inp, 0, 1)
    target_t = np.swapaxes(target, 0, 1)
    return _flip(inp_t, target_t, 0)


def augment_pair(pair: TrainingPair, policy: AugmentPolicy, rng: np.random.Generator) -> TrainingPair:
    """
    对训练样本对施加随机增强

    随机数按固定顺序抽取（裁剪、水平翻转、垂直翻转、旋转、光谱平移、光谱翻转），
    无论变换是否生效都会消耗相同数量的随机数，因此同一种子得到逐字节相同的结果。

    Args:
        pair: 训练样本对
        policy: 增强策略
        rng: 随机数生成器

    Returns:
        TrainingPair: 增强后的样本对

    Raises:
        ParamError: 裁剪尺寸大于图像或光谱平移上限不小于波段数
    """
    s = pair.scale
    inp = pair.inp.data
    target = pair.target.data
    in_h, in_w = inp.shape[:2]

    crop = policy.crop_size
    if crop is not None and (crop > in_h or crop > in_w):
        raise ParamError("裁剪尺寸大于图像", {'crop_size': crop, 'shape': pair.inp.shape})
    if policy.max_spectral_shift >= pair.inp.bands:
        raise ParamError("光谱平移上限必须小于波段数", {'max_spectral_shift': policy.max_spectral_shift})

    crop_h = in_h if crop is None else crop
    crop_w = in_w if crop is None else crop
    top = int(rng.integers(0, in_h - crop_h + 1))
    left = int(rng.integers(0, in_w - crop_w + 1))
    inp = _crop(inp, top, left, crop_h, crop_w)
    target = _crop(
        target, s * top, s * left,
        min(s * crop_h, target.shape[0] - s * top),
        min(s * crop_w, target.shape[1] - s * left)
    )
    if s > 1 and policy.spatial:
        target = target[:_grid_extent(crop_h, s), :_grid_extent(crop_w, s)]

    if rng.random() < policy.p_flip_h:
        inp, target = _flip(inp, target, 1)
    if rng.random() < policy.p_flip_v:
        inp, target = _flip(inp, target, 0)
    if rng.random() < policy.p_rot90:
        inp, target = _rot90(inp, target)

    shift = int(rng.integers(-policy.max_spectral_shift, policy.max_spectral_shift + 1))
    flip_spectra = rng.random() < policy.p_spectral_flip

    out_inp = pair.inp.with_data(inp)
    out_target = pair.target.with_data(target)
    if shift:
        out_inp = spectral_shift(out_inp, shift)
        out_target = spectral_shift(out_target, shift)
    if flip_spectra:
        out_inp = spectral_flip(out_inp)
        out_target = spectral_flip(out_target)
    return TrainingPair(out_inp, out_target, s)


def mixup(pair_a: TrainingPair, pair_b: TrainingPair, lam: float) -> TrainingPair:
    """
    mixup：两个成员都取 λ·a + (1−λ)·b

    Raises:
        ShapeError: 样本对尺寸不一致
        ParamError: λ 不在 [0, 1]
    """
    if pair_a.shape != pair_b.shape or pair_a.scale != pair_b.scale:
        raise ShapeError("mixup 样本对尺寸不一致", {'a': pair_a.shape, 'b': pair_b.shape})
    if not 0.0 <= lam <= 1.0:
        raise ParamError("mixup λ 必须在 [0, 1] 内", {'lambda': lam})
    inp = lam * pair_a.inp.data + (1.0 - lam) * pair_b.inp.data
    target = lam * pair_a.target.data + (1.0 - lam) * pair_b.target.data
    return TrainingPair(pair_a.inp.with_data(inp), pair_a.target.with_data(target), pair_a.scale)
