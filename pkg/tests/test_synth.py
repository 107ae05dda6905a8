import json

import numpy as np
import pytest

from hypercube import AcquisitionMeta, fingerprint_axis, load_cube
from resample import decimate
from synth import (
    CUBE_KEYS, ComponentSpec, Layout, NoiseModel, Peak, add_polynomial_background, apply_noise,
    assign_roles, component_spectrum, gen_dataset, gen_phantom, get_library, library_names,
    lorentzian, random_components, sample_poisson
)
from utils.exceptions import ParamError
from conftest import make_cube


def test_lorentzian_shape():
    axis = np.array([990.0, 995.0, 1000.0, 1005.0])
    values = lorentzian(axis, 1000.0, 10.0, 2.0)
    assert values[2] == 2.0
    assert values[1] == pytest.approx(1.0)
    assert values[3] == pytest.approx(1.0)
    assert values[0] < values[1]


def test_component_spectrum_sums_peaks():
    axis = fingerprint_axis(100)
    spec = ComponentSpec('two', ((800.0, 10.0, 1.0), (1500.0, 20.0, 0.5)))
    expected = lorentzian(axis, 800.0, 10.0, 1.0) + lorentzian(axis, 1500.0, 20.0, 0.5)
    np.testing.assert_allclose(component_spectrum(spec, axis).values, expected)
    assert isinstance(spec.peaks[0], Peak)


def test_peak_and_layout_validation():
    with pytest.raises(ParamError):
        Peak(1000.0, 0.0, 1.0)
    with pytest.raises(ParamError):
        Peak(1000.0, 10.0, -1.0)
    with pytest.raises(ParamError):
        Layout('square', radius=2.0)
    with pytest.raises(ParamError):
        Layout('disk')
    with pytest.raises(ParamError):
        Layout('annulus', radius=2.0, inner=2.0)
    with pytest.raises(ParamError):
        ComponentSpec('empty', ())
    with pytest.raises(ParamError):
        Layout('disk', row=10.0, col=0.0, radius=2.0).mask(5, 5)


def test_layout_masks():
    np.testing.assert_array_equal(Layout().mask(3, 4), np.ones((3, 4)))
    disk = Layout('disk', row=4.0, col=4.0, radius=2.0).mask(9, 9)
    assert disk[4, 4] == 1.0 and disk[4, 6] == 1.0 and disk[4, 7] == 0.0
    ring = Layout('annulus', row=4.0, col=4.0, radius=3.0, inner=1.5).mask(9, 9)
    assert ring[4, 4] == 0.0 and ring[4, 6] == 1.0
    blob = Layout('blob', row=2.0, col=3.0, radius=1.5).mask(6, 6)
    assert blob[2, 3] == 1.0
    assert np.all((blob > 0) & (blob <= 1))


def test_libraries():
    assert library_names() == ['cell', 'tissue']
    for name in library_names():
        assert len(get_library(name)) == 4
    with pytest.raises(ParamError):
        get_library('bone')


def test_phantom_ground_truth_is_consistent():
    axis = fingerprint_axis(50)
    components = random_components('cell', 10, 12, np.random.default_rng(0))
    phantom = gen_phantom(components, 10, 12, axis, seed=4)
    ab = phantom.abundances.values
    assert ab.shape == (10, 12, 4)
    assert np.all(ab >= 0)
    np.testing.assert_allclose(ab.sum(axis=2), 1.0)
    np.testing.assert_allclose(phantom.cube.data, ab @ phantom.endmembers.spectra.T)
    for index in range(4):
        assert np.any(ab[:, :, index] == 1.0)
    np.testing.assert_array_equal(phantom.labels.labels, np.argmax(ab, axis=2))
    assert phantom.endmembers.names == [c.name for c in components]


def test_phantom_is_deterministic_per_seed():
    axis = fingerprint_axis(20)
    components = random_components('tissue', 8, 8, np.random.default_rng(1))
    a = gen_phantom(components, 8, 8, axis, seed=2)
    b = gen_phantom(components, 8, 8, axis, seed=2)
    c = gen_phantom(components, 8, 8, axis, seed=3)
    assert a.cube.equals(b.cube)
    assert not a.cube.equals(c.cube)


def test_phantom_errors():
    axis = fingerprint_axis(20)
    with pytest.raises(ParamError):
        gen_phantom([], 4, 4, axis)
    components = random_components('cell', 2, 2, np.random.default_rng(0))
    with pytest.raises(ParamError):
        gen_phantom(components, 1, 3, axis)


def test_polynomial_background(rng):
    cube = make_cube(rng, height=2, width=2, bands=11)
    shifted = add_polynomial_background(cube, [0.5])
    np.testing.assert_allclose(shifted.data, cube.data + 0.5)
    tilted = add_polynomial_background(cube, [0.0, 1.0])
    np.testing.assert_allclose(tilted.data[0, 0] - cube.data[0, 0], np.linspace(-1, 1, 11), atol=1e-12)
    with pytest.raises(ParamError):
        add_polynomial_background(cube, [])


def test_noise_model_validation():
    assert NoiseModel(0.5).gain == 100.0
    with pytest.raises(ParamError):
        NoiseModel(0.0)
    with pytest.raises(ParamError):
        NoiseModel(1.0, read_noise_sigma=-1.0)


@pytest.mark.parametrize('lam', [0.5, 3.0, 30.0, 400.0])
def test_sample_poisson_moments(lam):
    counts = sample_poisson(np.full(40000, lam), np.random.default_rng(7))
    assert np.all(counts >= 0)
    np.testing.assert_array_equal(counts, np.rint(counts))
    assert counts.mean() == pytest.approx(lam, rel=0.03)
    assert counts.var() == pytest.approx(lam, rel=0.06)


def test_sample_poisson_zero_mean():
    np.testing.assert_array_equal(sample_poisson(np.zeros(10), np.random.default_rng(0)), 0.0)


def test_apply_noise_is_unbiased_and_seeded(rng):
    clean = make_cube(rng, height=20, width=20, bands=50, meta=AcquisitionMeta(1.0, 0.5, 'c'))
    noisy = apply_noise(clean, NoiseModel(0.5), seed=3)
    assert noisy.meta.integration_time == 0.5
    assert noisy.meta.pixel_pitch == 0.5
    assert abs(float(np.mean(noisy.data - clean.data))) < 0.01
    assert apply_noise(clean, NoiseModel(0.5), seed=3).equals(noisy)
    long = apply_noise(clean, NoiseModel(5.0), seed=3)
    assert np.mean((long.data - clean.data) ** 2) < np.mean((noisy.data - clean.data) ** 2)


def test_assign_roles():
    assert assign_roles(1) == ['train']
    assert assign_roles(2) == ['train', 'train']
    assert assign_roles(3) == ['train', 'val', 'test']
    roles = assign_roles(10)
    assert roles.count('train') == 8 and roles.count('val') == 1 and roles.count('test') == 1
    roles = assign_roles(30)
    assert roles.count('val') == 3 and roles.count('test') == 3


def test_gen_dataset_structure():
    axis = fingerprint_axis(24)
    samples = gen_dataset(3, 9, 7, axis, 2, t_low=0.1, t_high=1.0, seed=5)
    assert [s.role for s in samples] == ['train', 'val', 'test']
    sample = samples[0]
    assert sample.clean_hr.shape == (9, 7, 24)
    assert sample.noisy_lr.shape == (5, 4, 24)
    assert sample.clean_lr.equals(decimate(sample.clean_hr, 2))
    assert sample.noisy_hr.meta.integration_time == 0.1
    assert sample.high_hr.meta.integration_time == 1.0
    assert sample.clean_lr.meta.pixel_pitch == 2 * sample.clean_hr.meta.pixel_pitch
    sr = sample.pair('sr')
    assert sr.scale == 2 and sr.inp is sample.high_lr and sr.target is sample.high_hr
    denoise = sample.pair('denoise')
    assert denoise.scale == 1 and denoise.inp is sample.noisy_hr
    with pytest.raises(ParamError):
        sample.cube('bogus')
    with pytest.raises(ParamError):
        sample.pair('deblur')


def test_gen_dataset_is_deterministic():
    axis = fingerprint_axis(16)
    a = gen_dataset(2, 6, 6, axis, 3, seed=11)
    b = gen_dataset(2, 6, 6, axis, 3, seed=11)
    c = gen_dataset(2, 6, 6, axis, 3, seed=12)
    for x, y in zip(a, b):
        for key in CUBE_KEYS:
            assert x.cube(key).equals(y.cube(key))
    assert not a[0].noisy_hr.equals(c[0].noisy_hr)
    assert a[0].seed != a[1].seed


def test_gen_dataset_validation():
    axis = fingerprint_axis(16)
    with pytest.raises(ParamError):
        gen_dataset(2, 8, 8, axis, 5)
    with pytest.raises(ParamError):
        gen_dataset(0, 8, 8, axis, 2)
    with pytest.raises(ParamError):
        gen_dataset(2, 8, 8, axis, 2, t_low=1.0, t_high=0.5)
    with pytest.raises(ParamError):
        gen_dataset(2, 3, 8, axis, 4)
    with pytest.raises(ParamError):
        gen_dataset(2, 8, 8, axis, 2, library='bone')


def test_write_dataset(tiny_dataset):
    samples, manifest_path = tiny_dataset
    manifest = json.loads(manifest_path.read_text(encoding='utf-8'))
    assert manifest['scale'] == 2
    assert manifest['bands'] == 32
    assert manifest['size'] == [8, 8]
    assert manifest['library'] == 'cell' and manifest['seed'] == 3
    assert len(manifest['pairs']) == 6
    assert [entry['role'] for entry in manifest['pairs']] == [s.role for s in samples]
    entry = manifest['pairs'][1]
    for key in CUBE_KEYS:
        loaded = load_cube(manifest_path.parent / entry[key])
        expected = samples[1].cube(key)
        np.testing.assert_array_equal(loaded.data, expected.data.astype(np.float32))
        assert loaded.meta.label == expected.meta.label
    assert (manifest_path.parent / manifest['axis_file']).exists()
