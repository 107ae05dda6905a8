"""
采集噪声模型
Acquisition Noise Model

计数 ~ Poisson(增益·强度) + Gaussian(0, 读出噪声)，增益 = photon_rate_scale·t，
再除以增益使期望等于无噪声强度。泊松采样在均值 ≤ 50 时用逆变换法，
更大均值用取整的正态近似；两种情况都按固定顺序消耗随机数，同一种子结果逐位相同。
"""

from dataclasses import dataclass, replace

import numpy as np

from hypercube import HyperCube
from utils.exceptions import ParamError

POISSON_NORMAL_THRESHOLD = 50.0


@dataclass(frozen=True)
class NoiseModel:
    """积分时间 t（秒）、每单位强度每秒光子数、读出噪声标准差（计数）"""

    integration_time: float
    photon_rate_scale: float = 200.0
    read_noise_sigma: float = 2.0

    def __post_init__(self):
        for name in ('integration_time', 'photon_rate_scale', 'read_noise_sigma'):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParamError("噪声模型参数必须为正", {name: value})

    @property
    def gain(self) -> float:
        return self.photon_rate_scale * self.integration_time


def sample_poisson(lam: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """逐元素泊松采样（小均值逆变换，大均值正态近似）"""
    lam = np.maximum(np.asarray(lam, dtype=np.float64), 0.0)
    uniform = rng.random(lam.shape)
    normal = rng.standard_normal(lam.shape)

    small = lam <= POISSON_NORMAL_THRESHOLD
    counts = np.zeros_like(lam)
    if np.any(small):
        lam_s = lam[small]
        u = uniform[small]
        k = np.zeros_like(lam_s)
        pmf = np.exp(-lam_s)
        cdf = pmf.copy()
        limit = int(POISSON_NORMAL_THRESHOLD + 12 * np.sqrt(POISSON_NORMAL_THRESHOLD) + 20)
        active = u > cdf
        step = 0
        while np.any(active) and step < limit:
            step += 1
            k = np.where(active, k + 1, k)
            pmf = np.where(active, pmf * lam_s / np.maximum(k, 1), pmf)
            cdf = np.where(active, cdf + pmf, cdf)
            active = u > cdf
        counts[small] = k
    large = ~small
    counts[large] = np.maximum(np.rint(lam[large] + np.sqrt(lam[large]) * normal[large]), 0.0)
    return counts


def apply_noise(clean: HyperCube, model: NoiseModel, seed: int = 0) -> HyperCube:
    """
    对无噪声立方体施加散粒噪声与读出噪声

    Returns:
        HyperCube: 期望等于输入强度的带噪立方体，元数据积分时间设为模型的 t
    """
    rng = np.random.default_rng(seed)
    gain = model.gain
    counts = sample_poisson(gain * clean.data, rng)
    counts = counts + rng.normal(0.0, model.read_noise_sigma, size=counts.shape)
    return clean.with_data(counts / gain, meta=replace(clean.meta, integration_time=model.integration_time))
