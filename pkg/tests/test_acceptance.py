"""
桌面规模验收：方向性复现各项对比结论
Desk-Scale Acceptance Runs

只在 RAMAN_RUN_SLOW=1 时执行；单次运行需要数十分钟 CPU 时间。
"""

import numpy as np
import pytest

from augment import AugmentPolicy
from hypercube import fingerprint_axis
from neural import Checkpoint, TrainConfig, build_model, fine_tune, train
from services import BaselineService, PipelineService
from synth import gen_dataset

pytestmark = pytest.mark.slow

BANDS = 200


@pytest.fixture(scope='module')
def cell_samples():
    return gen_dataset(32, 32, 32, fingerprint_axis(BANDS), 2, t_low=0.1, t_high=1.0, seed=0, library='cell')


def _split(samples, task):
    pairs = {role: [s.pair(task) for s in samples if s.role == role] for role in ('train', 'val', 'test')}
    return pairs['train'], pairs['val'], pairs['test']


@pytest.fixture(scope='module')
def denoiser(cell_samples):
    train_pairs, val_pairs, _ = _split(cell_samples, 'denoise')
    model = build_model('denoise', BANDS, depth=3, base_channels=16, kernel=7)
    cfg = TrainConfig(epochs=10, batch_size=256, max_lr=1e-3, seed=0)
    return train(model, train_pairs, cfg, None, val_pairs).checkpoint


@pytest.fixture(scope='module')
def sr_model(cell_samples):
    train_pairs, val_pairs, _ = _split(cell_samples, 'sr')
    model = build_model('sr', BANDS, 2, feature_channels=32, n_residual_groups=2, n_rcab_per_group=2,
                        attention_reduction=4)
    cfg = TrainConfig(epochs=60, batch_size=8, max_lr=5e-4, scheduler='constant', seed=0)
    return train(model, train_pairs, cfg, AugmentPolicy(crop_size=8), val_pairs).checkpoint


def test_denoiser_beats_best_sg_filter(cell_samples, denoiser):
    _, _, test_pairs = _split(cell_samples, 'denoise')
    noisy = [p.inp for p in test_pairs]
    clean = [p.target for p in test_pairs]
    table = BaselineService().sg_grid_table(noisy, clean, denoiser=denoiser)
    best_sg = table[table['method'] == 'savgol']['mse'].min()
    model_mse = table[table['method'] == 'resunet1d']['mse'].iloc[0]
    assert model_mse <= 0.5 * best_sg


def test_superres_beats_bicubic_beats_nearest(cell_samples, sr_model):
    _, _, test_pairs = _split(cell_samples, 'sr')
    table = BaselineService().upsampling_table([p.inp for p in test_pairs], [p.target for p in test_pairs], 2,
                                               sr_model).set_index('method')
    assert table.loc['hyrisr', 'psnr'] >= table.loc['bicubic', 'psnr'] + 1.0
    assert table.loc['bicubic', 'psnr'] > table.loc['nearest', 'psnr']
    assert table.loc['hyrisr', 'ssim'] > table.loc['bicubic', 'ssim'] > table.loc['nearest', 'ssim']


def test_hybrid_pipeline_classifies_better_than_baseline(cell_samples, denoiser, sr_model):
    service = PipelineService()
    gains = []
    for sample in (s for s in cell_samples if s.role == 'test'):
        result = service.run(sample.noisy_lr, denoiser, sr_model, sample.high_hr, k=4, seed=0)
        assert result['speedup'] == pytest.approx(40.0)
        gains.append(result['accuracy_output'] - result['accuracy_baseline'])
    assert np.mean(gains) > 0.0


def test_speedup_report_per_scale():
    service = PipelineService()
    for s, expected in ((2, 40.0), (3, 90.0), (4, 160.0)):
        samples = gen_dataset(1, 12, 12, fingerprint_axis(16), s, seed=s)
        model = build_model('sr', 16, s, feature_channels=4, n_residual_groups=1, n_rcab_per_group=1,
                            attention_reduction=2)
        result = service.run(samples[0].noisy_lr, sr_model=Checkpoint.from_model(model),
                             reference=samples[0].high_hr, scale=s)
        assert result['speedup'] == pytest.approx(expected)


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_transfer_learning_converges_faster(sr_model, seed):
    tissue = gen_dataset(20, 32, 32, fingerprint_axis(BANDS), 2, seed=100 + seed, library='tissue')
    train_pairs = [s.pair('sr') for s in tissue if s.role == 'train'][:16]
    val_pairs = [s.pair('sr') for s in tissue if s.role != 'train']
    cfg = TrainConfig(epochs=30, batch_size=8, max_lr=5e-4, scheduler='constant', seed=seed)
    policy = AugmentPolicy(crop_size=8)

    scratch = train(build_model('sr', BANDS, 2, feature_channels=32, n_residual_groups=2, n_rcab_per_group=2,
                                attention_reduction=4, seed=seed), train_pairs, cfg, policy, val_pairs)
    tuned = fine_tune(sr_model, train_pairs, cfg, policy, val_pairs)

    scratch_epochs = int(scratch.history['val_l1'].idxmin()) + 1
    reached = tuned.history[tuned.history['val_l1'] <= scratch.best_val_l1]
    assert not reached.empty
    assert int(reached['epoch'].iloc[0]) <= 0.5 * scratch_epochs

    table = BaselineService().upsampling_table([p.inp for p in val_pairs], [p.target for p in val_pairs], 2,
                                               tuned.checkpoint).set_index('method')
    assert table.loc['hyrisr', 'psnr'] > table.loc['bicubic', 'psnr']
