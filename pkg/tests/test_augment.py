import numpy as np
import pytest

from augment import (
    AugmentPolicy, TrainingPair, augment_pair, mixup, sample_mixup_lambda, spectral_flip,
    spectral_shift, worker_rng
)
from resample import decimate
from utils.exceptions import ParamError, ShapeError
from conftest import make_cube

ALL_ON = AugmentPolicy(p_flip_h=1.0, p_flip_v=1.0, p_rot90=1.0)


def _sr_pair(rng, height, width, s, bands=6):
    target = make_cube(rng, height=height, width=width, bands=bands)
    return TrainingPair(decimate(target, s), target, s)


def _denoise_pair(rng, height=6, width=5, bands=8):
    target = make_cube(rng, height=height, width=width, bands=bands)
    noisy = target.with_data(target.data + 0.1 * rng.standard_normal(target.shape))
    return TrainingPair(noisy, target, 1)


def test_identity_policy_leaves_pair_unchanged(rng):
    pair = _sr_pair(rng, 8, 6, 2)
    out = augment_pair(pair, AugmentPolicy.identity(), np.random.default_rng(0))
    assert out.inp.equals(pair.inp)
    assert out.target.equals(pair.target)


def test_augment_is_deterministic_per_seed(rng):
    pair = _sr_pair(rng, 12, 10, 2)
    policy = AugmentPolicy(crop_size=3, max_spectral_shift=2, p_spectral_flip=0.5)
    a = augment_pair(pair, policy, np.random.default_rng(42))
    b = augment_pair(pair, policy, np.random.default_rng(42))
    assert a.inp.equals(b.inp) and a.target.equals(b.target)


@pytest.mark.parametrize('s, height, width', [(2, 8, 6), (2, 7, 9), (3, 10, 8), (4, 9, 12)])
def test_spatial_transforms_keep_decimation_relation(rng, s, height, width):
    pair = _sr_pair(rng, height, width, s)
    for seed in range(10):
        policy = ALL_ON if seed % 2 == 0 else AugmentPolicy(crop_size=2)
        out = augment_pair(pair, policy, np.random.default_rng(seed))
        np.testing.assert_array_equal(decimate(out.target, s).data, out.inp.data)


def test_flips_are_involutions(rng):
    pair = _denoise_pair(rng)
    for policy in (AugmentPolicy(p_flip_h=1.0, p_flip_v=0.0, p_rot90=0.0),
                   AugmentPolicy(p_flip_h=0.0, p_flip_v=1.0, p_rot90=0.0)):
        once = augment_pair(pair, policy, np.random.default_rng(0))
        assert not once.inp.equals(pair.inp)
        twice = augment_pair(once, policy, np.random.default_rng(0))
        assert twice.inp.equals(pair.inp) and twice.target.equals(pair.target)


def test_transforms_preserve_pixel_multiset(rng):
    pair = _denoise_pair(rng)
    out = augment_pair(pair, ALL_ON, np.random.default_rng(3))
    assert out.inp.shape == (pair.inp.width, pair.inp.height, pair.inp.bands)
    np.testing.assert_allclose(np.sort(out.inp.data.ravel()), np.sort(pair.inp.data.ravel()))
    np.testing.assert_allclose(np.sort(out.target.data.ravel()), np.sort(pair.target.data.ravel()))
    assert out.inp.data.sum() == pytest.approx(pair.inp.data.sum())


@pytest.mark.parametrize('s, height, width', [
    (2, 8, 6), (2, 7, 9), (3, 9, 12), (3, 10, 8), (4, 8, 8), (4, 9, 12)
])
@pytest.mark.parametrize('policy', [
    ALL_ON,
    AugmentPolicy(p_flip_h=1.0, p_flip_v=0.0, p_rot90=0.0),
    AugmentPolicy(p_flip_h=0.0, p_flip_v=1.0, p_rot90=0.0),
    AugmentPolicy(p_flip_h=0.0, p_flip_v=0.0, p_rot90=1.0),
])
def test_sr_transforms_permute_grid_aligned_target(rng, s, height, width, policy):
    pair = _sr_pair(rng, height, width, s)
    in_h, in_w = pair.inp.height, pair.inp.width
    trimmed = pair.target.data[:s * (in_h - 1) + 1, :s * (in_w - 1) + 1]
    out = augment_pair(pair, policy, np.random.default_rng(0))
    np.testing.assert_array_equal(np.sort(out.inp.data.ravel()), np.sort(pair.inp.data.ravel()))
    np.testing.assert_array_equal(np.sort(out.target.data.ravel()), np.sort(trimmed.ravel()))
    np.testing.assert_array_equal(decimate(out.target, s).data, out.inp.data)


def test_sr_flip_does_not_duplicate_edge_rows(rng):
    pair = _sr_pair(rng, 8, 8, 2, bands=3)
    out = augment_pair(pair, AugmentPolicy(p_flip_h=1.0, p_flip_v=0.0, p_rot90=0.0), np.random.default_rng(0))
    assert out.target.shape[:2] == (7, 7)
    np.testing.assert_array_equal(out.target.data, pair.target.data[:7, :7][:, ::-1])
    columns = {out.target.data[0, j].tobytes() for j in range(out.target.width)}
    assert len(columns) == out.target.width


def test_crop_shapes(rng):
    pair = _sr_pair(rng, 12, 10, 2)
    out = augment_pair(pair, AugmentPolicy(crop_size=3), np.random.default_rng(1))
    assert out.inp.shape[:2] == (3, 3)
    assert out.target.shape[:2] == (5, 5)
    still = augment_pair(pair, AugmentPolicy(crop_size=3, p_flip_h=0.0, p_flip_v=0.0, p_rot90=0.0),
                         np.random.default_rng(1))
    assert still.target.shape[:2] == (6, 6)
    with pytest.raises(ParamError):
        augment_pair(pair, AugmentPolicy(crop_size=6), np.random.default_rng(1))


def test_spectral_shift(rng):
    cube = make_cube(rng, height=2, width=2, bands=5)
    assert spectral_shift(cube, 0) is cube
    shifted = spectral_shift(cube, 1)
    np.testing.assert_array_equal(shifted.data[:, :, 1:], cube.data[:, :, :-1])
    np.testing.assert_array_equal(shifted.data[:, :, 0], cube.data[:, :, 0])
    np.testing.assert_array_equal(shifted.axis, cube.axis)
    back = spectral_shift(cube, -2)
    np.testing.assert_array_equal(back.data[:, :, :3], cube.data[:, :, 2:])
    with pytest.raises(ParamError):
        spectral_shift(cube, 5)


def test_spectral_flip_is_involution(rng):
    cube = make_cube(rng, height=2, width=3, bands=7)
    assert spectral_flip(spectral_flip(cube)).equals(cube)
    np.testing.assert_array_equal(spectral_flip(cube).data[:, :, 0], cube.data[:, :, -1])


def test_spectral_shift_limit_checked(rng):
    pair = _denoise_pair(rng, bands=4)
    with pytest.raises(ParamError):
        augment_pair(pair, AugmentPolicy(max_spectral_shift=4), np.random.default_rng(0))


def test_mixup(rng):
    a = _denoise_pair(rng)
    b = _denoise_pair(rng)
    assert mixup(a, b, 1.0).inp.equals(a.inp)
    same = mixup(a, a, 0.5)
    np.testing.assert_array_equal(same.inp.data, a.inp.data)
    np.testing.assert_array_equal(same.target.data, a.target.data)
    mixed = mixup(a, b, 0.25)
    np.testing.assert_allclose(mixed.target.data, 0.25 * a.target.data + 0.75 * b.target.data)
    with pytest.raises(ParamError):
        mixup(a, b, 1.5)
    with pytest.raises(ShapeError):
        mixup(a, _denoise_pair(rng, height=4), 0.5)


def test_mixup_lambda_and_worker_streams():
    rng = np.random.default_rng(0)
    values = [sample_mixup_lambda(rng, 0.2) for _ in range(100)]
    assert all(0.0 <= v <= 1.0 for v in values)
    with pytest.raises(ParamError):
        sample_mixup_lambda(rng, 0.0)
    a = worker_rng(7, 0).random(5)
    np.testing.assert_array_equal(a, worker_rng(7, 0).random(5))
    assert not np.array_equal(a, worker_rng(7, 1).random(5))


def test_policy_and_pair_validation(rng):
    with pytest.raises(ParamError):
        AugmentPolicy(p_flip_h=1.5)
    with pytest.raises(ParamError):
        AugmentPolicy(crop_size=0)
    target = make_cube(rng, height=8, width=8, bands=4)
    with pytest.raises(ShapeError):
        TrainingPair(decimate(target, 2), target, 4)
