import json

import numpy as np
import pytest

from dsp import SgParams
from hypercube import fingerprint_axis
from neural import Checkpoint, build_model
from services import BaselineService, DataService, PipelineService
from utils.exceptions import ConfigError, DataError, IoError, ParamError, ShapeError


def _sr_checkpoint(bands=32, scale=2):
    model = build_model('sr', bands, scale, feature_channels=4, n_residual_groups=1, n_rcab_per_group=1,
                        attention_reduction=2)
    return Checkpoint.from_model(model)


def _denoise_checkpoint(bands=32):
    return Checkpoint.from_model(build_model('denoise', bands, depth=1, base_channels=2, kernel=3))


def test_load_manifest(tiny_dataset):
    _, manifest_path = tiny_dataset
    service = DataService()
    manifest = service.load_manifest(manifest_path)
    assert manifest.scale == 2
    assert len(manifest.pairs) == 6
    np.testing.assert_allclose(manifest.axis, fingerprint_axis(32), rtol=1e-9)
    assert manifest.info['library'] == 'cell'
    assert [e['role'] for e in manifest.entries(('val', 'test'))] == ['val', 'test']
    info = service.get_file_info(manifest)
    assert info['pairs'] == 6 and info['bands'] == 32
    assert info['roles'] == {'train': 4, 'val': 1, 'test': 1}


def test_manifest_errors(tmp_path):
    service = DataService()
    with pytest.raises(IoError):
        service.load_manifest(tmp_path / 'missing.json')
    bad = tmp_path / 'bad.json'
    bad.write_text('{not json', encoding='utf-8')
    with pytest.raises(DataError):
        service.load_manifest(bad)
    incomplete = tmp_path / 'incomplete.json'
    incomplete.write_text(json.dumps({'pairs': [], 'axis_file': 'axis.csv'}), encoding='utf-8')
    with pytest.raises(DataError):
        service.load_manifest(incomplete)
    empty = tmp_path / 'empty.json'
    empty.write_text(json.dumps({'pairs': [], 'axis_file': 'axis.csv', 'scale': 2}), encoding='utf-8')
    with pytest.raises(DataError):
        service.load_manifest(empty)
    partial = tmp_path / 'partial.json'
    partial.write_text(json.dumps({'pairs': [{'role': 'train'}], 'axis_file': 'axis.csv', 'scale': 2}),
                       encoding='utf-8')
    with pytest.raises(DataError):
        service.load_manifest(partial)


def test_cube_cache(tiny_dataset):
    _, manifest_path = tiny_dataset
    service = DataService()
    manifest = service.load_manifest(manifest_path)
    path = manifest.path_of(manifest.pairs[0], 'clean_hr')
    first = service.load_cube(path)
    assert service.load_cube(path) is first
    service.clear_cache()
    second = service.load_cube(path)
    assert second is not first and second.equals(first)
    with pytest.raises(IoError):
        service.load_cube(manifest.root / 'nope.hrc')


def test_training_pairs(tiny_dataset):
    _, manifest_path = tiny_dataset
    service = DataService()
    manifest = service.load_manifest(manifest_path)
    denoise = service.training_pairs(manifest, 'denoise')
    assert len(denoise) == 4
    assert denoise[0].inp.shape == denoise[0].target.shape == (8, 8, 32)
    assert denoise[0].inp.meta.integration_time == pytest.approx(0.1)
    sr = service.training_pairs(manifest, 'sr', ('test',))
    assert len(sr) == 1 and sr[0].scale == 2
    assert sr[0].inp.shape == (4, 4, 32)
    with pytest.raises(ParamError):
        service.training_pairs(manifest, 'deblur')
    with pytest.raises(DataError):
        service.training_pairs(manifest, 'sr', ('holdout',))


def test_sg_grid_table(tiny_dataset):
    samples, _ = tiny_dataset
    noisy = [s.noisy_hr for s in samples[:2]]
    clean = [s.high_hr for s in samples[:2]]
    service = BaselineService()
    table = service.sg_grid_table(noisy, clean)
    assert len(table) == 24
    assert list(table.columns) == ['method', 'order', 'frame', 'label', 'mse', 'psnr', 'ssim', 'best']
    assert table['best'].sum() == 1
    best = table[table['best']].iloc[0]
    assert best['mse'] == table['mse'].min()
    assert service.best_sg(table) == SgParams(int(best['order']), int(best['frame']))

    small = service.sg_grid_table(noisy, clean, orders=[1, 2], frames=[5, 7])
    assert list(small['label']) == [SgParams(o, f).label for o, f in ((1, 5), (1, 7), (2, 5), (2, 7))]


def test_sg_grid_table_with_denoiser(tiny_dataset):
    samples, _ = tiny_dataset
    table = BaselineService().sg_grid_table([samples[0].noisy_hr], [samples[0].high_hr], orders=[1], frames=[5],
                                            denoiser=_denoise_checkpoint())
    assert list(table['method']) == ['savgol', 'resunet1d']
    assert not table['best'].iloc[1]


def test_upsampling_table(tiny_dataset):
    samples, _ = tiny_dataset
    lr = [s.high_lr for s in samples[:2]]
    hr = [s.high_hr for s in samples[:2]]
    service = BaselineService()
    table = service.upsampling_table(lr, hr, 2)
    assert list(table['method']) == ['nearest', 'bicubic']
    assert table['best'].sum() == 1
    with_model = service.upsampling_table(lr, hr, 2, _sr_checkpoint())
    assert list(with_model['method']) == ['nearest', 'bicubic', 'hyrisr']
    with pytest.raises(DataError):
        service.upsampling_table([], [], 2)
    with pytest.raises(ShapeError):
        service.upsampling_table(lr, hr[:1], 2)


def test_check_composition(tiny_dataset):
    samples, _ = tiny_dataset
    cube = samples[0].noisy_lr
    check = PipelineService.check_composition
    assert check(None, None, cube) == 1
    assert check(_denoise_checkpoint(), _sr_checkpoint(), cube) == 2
    assert check(None, _sr_checkpoint(scale=3), cube, 3) == 3
    with pytest.raises(ConfigError):
        check(None, None, cube, 2)
    with pytest.raises(ConfigError):
        check(None, _sr_checkpoint(), cube, 3)
    with pytest.raises(ConfigError):
        check(_sr_checkpoint(), None, cube)
    with pytest.raises(ConfigError):
        check(_denoise_checkpoint(bands=16), None, cube)
    with pytest.raises(ConfigError):
        check(None, _sr_checkpoint(bands=16), cube)


def test_pipeline_self_test_mode(tiny_dataset):
    samples, _ = tiny_dataset
    cube = samples[5].high_hr
    service = PipelineService()
    result = service.run(cube, reference=cube, k=4, seed=1)
    assert result['scale'] == 1
    assert result['metrics_output']['ssim'] == 1.0
    assert result['metrics_output']['mse'] == 0.0
    assert result['accuracy_output'] == 1.0
    assert 0.0 <= result['accuracy_baseline'] <= 1.0
    assert result['speedup'] == pytest.approx(1.0)
    assert set(result['peak_maps']) == {'output_1450', 'baseline_1450', 'reference_1450'}
    assert result['baseline_method'] == 'SG(order 1, frame 9)'

    report = service.summary(result)
    assert report['output_shape'] == [8, 8, 32]
    assert 'output' not in report and 'labels' not in report
    assert len(service.get_run_history()) == 1
    assert report['run_history']['runs'] == 1
    assert report['run_history']['recent_ssim'] == [1.0]

    service.run(cube, k=4, seed=1)
    second = service.summary(service.run(cube, reference=cube, k=4, seed=1))
    assert second['run_history']['runs'] == 3
    assert second['run_history']['recent_ssim'] == [1.0, None, 1.0]
    assert len(second['run_history']['recent_execution_time']) == 3
    assert len(service.get_run_history(limit=2)) == 2


def test_pipeline_with_superres(tiny_dataset):
    samples, _ = tiny_dataset
    sample = samples[5]
    result = PipelineService().run(sample.noisy_lr, denoiser=_denoise_checkpoint(), sr_model=_sr_checkpoint(),
                                   reference=sample.high_hr, peaks=(1004.0, 1450.0), half_width=25.0)
    assert result['scale'] == 2
    assert result['speedup'] == pytest.approx(40.0)
    assert result['output'].shape == (8, 8, 32)
    assert result['baseline'].shape == (8, 8, 32)
    assert result['baseline_method'] == 'SG(order 1, frame 9) + bicubic'
    assert result['imaging_time_high'] == '01:04'
    assert result['peak_maps']['output_1004'].shape == (8, 8)
    assert np.isfinite(result['metrics_baseline']['psnr'])


def test_pipeline_infers_output_size_without_reference(tiny_dataset):
    samples, _ = tiny_dataset
    result = PipelineService().run(samples[0].noisy_lr, sr_model=_sr_checkpoint(), t_low=0.1, t_high=1.0)
    assert result['output'].shape == (8, 8, 32)
    assert 'metrics_output' not in result
    assert set(result['peak_maps']) == {'output_1450', 'baseline_1450'}
