"""
测试公共夹具
Shared Test Fixtures
"""

import os

import numpy as np
import pytest

from hypercube import AcquisitionMeta, HyperCube, fingerprint_axis
from synth import gen_dataset, write_dataset

RUN_SLOW = os.environ.get('RAMAN_RUN_SLOW') == '1'


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip_slow = pytest.mark.skip(reason="设置 RAMAN_RUN_SLOW=1 运行桌面规模验收")
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def axis():
    return fingerprint_axis(40)


def make_cube(rng, height=6, width=5, bands=40, meta=None, positive=True):
    data = rng.random((height, width, bands)) if positive else rng.standard_normal((height, width, bands))
    return HyperCube(data, fingerprint_axis(bands), meta or AcquisitionMeta(0.1, 0.5, 'test'))


@pytest.fixture
def cube(rng):
    return make_cube(rng)


@pytest.fixture(scope='session')
def tiny_dataset(tmp_path_factory):
    """6 组 8×8×32 的配对数据（s = 2），写出到临时目录"""
    out_dir = tmp_path_factory.mktemp('dataset')
    axis = fingerprint_axis(32)
    samples = gen_dataset(6, 8, 8, axis, 2, t_low=0.1, t_high=1.0, seed=3)
    manifest = write_dataset(samples, out_dir, axis, {'t_low': 0.1, 't_high': 1.0, 'seed': 3, 'library': 'cell'})
    return samples, manifest
