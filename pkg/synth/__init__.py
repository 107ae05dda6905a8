"""
合成数据模块
Synthetic Data Module

洛伦兹组分光谱、合成拉曼图像、散粒噪声模型与配对数据集
"""

from .library import (
    Peak, Layout, ComponentSpec, LIBRARIES, lorentzian, component_spectrum,
    get_library, library_names
)
from .phantom import Phantom, gen_phantom, random_components, add_polynomial_background
from .noise import NoiseModel, apply_noise, sample_poisson
from .dataset import (
    Sample, CUBE_KEYS, ROLES, MANIFEST_NAME, AXIS_NAME,
    gen_dataset, write_dataset, assign_roles
)

__all__ = [
    'Peak', 'Layout', 'ComponentSpec', 'LIBRARIES', 'lorentzian', 'component_spectrum',
    'get_library', 'library_names',
    'Phantom', 'gen_phantom', 'random_components', 'add_polynomial_background',
    'NoiseModel', 'apply_noise', 'sample_poisson',
    'Sample', 'CUBE_KEYS', 'ROLES', 'MANIFEST_NAME', 'AXIS_NAME',
    'gen_dataset', 'write_dataset', 'assign_roles'
]
