#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
拉曼高光谱处理工具 - 命令行入口
Hyperspectral Raman Toolkit - Command Line Application

命令：synth（合成配对数据集）、train（训练/迁移学习）、pipeline（去噪 → 超分辨率
→ 评估）、baseline（SG 网格与上采样基线对比）。

退出码：0 成功，1 运行或数据错误，2 用法错误。每次运行都会回显解析后的配置并写入
输出目录的 resolved_config.json。
"""

import logging
import os
from typing import Any, Dict, Optional, Tuple

import click

from augment import AugmentPolicy
from dsp import SgParams
from exporter import ReportExporter
from hypercube import fingerprint_axis, load_cube
from neural import (
    DEFAULT_MAX_LR, DEFAULT_SCHEDULER, TrainConfig, build_model, cross_validate, fine_tune, load_checkpoint,
    save_checkpoint, train as train_model
)
from resample import SCALE_FACTORS
from services import BaselineService, DataService, PipelineService
from synth import gen_dataset, library_names, write_dataset
from utils.config import (
    echo_config, load_config_file, log_level_default, output_dir_default, resolve_config, to_default_map
)
from utils.error_handlers import handle_cli_errors
from utils.exceptions import ConfigError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']
SCALE_CHOICE = click.IntRange(min(SCALE_FACTORS), max(SCALE_FACTORS))


def _out_dir(out: Optional[str], name: str) -> str:
    return out or os.path.join(output_dir_default(), name)


@click.group()
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='TOML 配置文件（按命令分表）')
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=log_level_default,
              show_default=True, help='日志级别')
@click.pass_context
@handle_cli_errors
def cli(ctx: click.Context, config_path: Optional[str], log_level: str) -> None:
    """拉曼高光谱去噪、超分辨率与解混工具"""
    logging.basicConfig(level=getattr(logging, log_level.upper()), format=LOG_FORMAT)
    logging.getLogger().setLevel(getattr(logging, log_level.upper()))
    ctx.default_map = to_default_map(load_config_file(config_path))


@cli.command()
@click.option('--cubes', type=click.IntRange(min=1), default=None, help='立方体数量')
@click.option('--size', type=click.IntRange(min=1), default=None, help='高分辨率边长（像素）')
@click.option('--bands', type=click.IntRange(min=2), default=None, help='波段数（600–1800 cm⁻¹）')
@click.option('--scale', type=SCALE_CHOICE, default=None, help='空间抽取倍数 {2,3,4}')
@click.option('--t-low', type=float, default=None, help='低信噪比积分时间（秒）')
@click.option('--t-high', type=float, default=None, help='高信噪比积分时间（秒）')
@click.option('--library', type=click.Choice(library_names()), default=None, help='组分库')
@click.option('--seed', type=int, default=None, help='随机种子')
@click.option('--out', type=click.Path(file_okay=False), default=None, help='输出目录')
@handle_cli_errors
def synth(**params) -> None:
    """生成配对合成数据集（HRC1 立方体 + manifest.json）"""
    cfg = resolve_config('synth', params)
    out_dir = _out_dir(cfg['out'], 'dataset')
    cfg['out'] = out_dir
    echo_config(cfg, out_dir)

    axis = fingerprint_axis(cfg['bands'])
    samples = gen_dataset(
        cfg['cubes'], cfg['size'], cfg['size'], axis, cfg['scale'],
        t_low=cfg['t_low'], t_high=cfg['t_high'], seed=cfg['seed'], library=cfg['library']
    )
    info = {key: cfg[key] for key in ('t_low', 't_high', 'seed', 'library')}
    manifest = write_dataset(samples, out_dir, axis, info)
    click.echo(f"Wrote manifest: {manifest}")


def _train_policy(task: str, cfg: Dict[str, Any], pairs) -> AugmentPolicy:
    if task == 'denoise':
        return AugmentPolicy(p_flip_h=0.0, p_flip_v=0.0, p_rot90=0.0, mixup_alpha=cfg['mixup_alpha'],
                             p_mixup=cfg['p_mixup'], max_spectral_shift=cfg['max_spectral_shift'])
    crop = cfg['crop_size']
    if crop is not None:
        limit = min(min(pair.inp.height, pair.inp.width) for pair in pairs)
        if crop > limit:
            logger.warning(f"裁剪尺寸 {crop} 大于输入尺寸，改为 {limit}")
            crop = limit
    return AugmentPolicy(crop_size=crop, mixup_alpha=cfg['mixup_alpha'], p_mixup=cfg['p_mixup'],
                         max_spectral_shift=cfg['max_spectral_shift'])


def _arch_params(task: str, cfg: Dict[str, Any]) -> Dict[str, Any]:
    if task == 'denoise':
        return {'depth': cfg['depth'], 'base_channels': cfg['base_channels'],
                'kernel': cfg['kernel'], 'seed': cfg['seed']}
    return {'feature_channels': cfg['features'], 'n_residual_groups': cfg['groups'],
            'n_rcab_per_group': cfg['blocks'], 'attention_reduction': cfg['reduction'], 'seed': cfg['seed']}


@cli.command()
@click.argument('task', type=click.Choice(['denoise', 'sr']))
@click.option('--manifest', type=click.Path(dir_okay=False), required=True, help='数据集清单')
@click.option('--epochs', type=click.IntRange(min=0), default=None, help='训练轮数')
@click.option('--batch-size', type=click.IntRange(min=1), default=None, help='批大小')
@click.option('--max-lr', type=float, default=None, help='单周期最大学习率')
@click.option('--scheduler', type=click.Choice(['one_cycle', 'constant']), default=None, help='学习率调度')
@click.option('--seed', type=int, default=None, help='随机种子')
@click.option('--scale', type=SCALE_CHOICE, default=None, help='超分辨率放大倍数（须与数据集一致）')
@click.option('--from-checkpoint', type=click.Path(dir_okay=False), default=None, help='迁移学习的父检查点')
@click.option('--depth', type=click.IntRange(min=1), default=None, help='ResUNet 层数')
@click.option('--base-channels', type=click.IntRange(min=1), default=None, help='ResUNet 基础通道数')
@click.option('--kernel', type=click.IntRange(min=1), default=None, help='ResUNet 卷积核宽度')
@click.option('--features', type=click.IntRange(min=1), default=None, help='HyRISR 特征通道数')
@click.option('--groups', type=click.IntRange(min=1), default=None, help='HyRISR 残差组数')
@click.option('--blocks', type=click.IntRange(min=1), default=None, help='每组 RCAB 数')
@click.option('--reduction', type=click.IntRange(min=1), default=None, help='通道注意力压缩比')
@click.option('--crop-size', type=click.IntRange(min=1), default=None, help='超分辨率训练裁剪尺寸（低分辨率像素）')
@click.option('--mixup-alpha', type=float, default=None, help='mixup Beta 分布参数')
@click.option('--p-mixup', type=click.FloatRange(0.0, 1.0), default=None, help='mixup 概率')
@click.option('--max-spectral-shift', type=click.IntRange(min=0), default=None, help='最大光谱平移（波段）')
@click.option('--val-fraction', type=click.FloatRange(0.0, 1.0, max_open=True), default=None,
              help='无验证角色样本时的自动验证比例')
@click.option('--cv', type=click.Choice(['none', 'loo']), default=None, help='留一图像交叉验证（train 与 val 角色）')
@click.option('--out', type=click.Path(file_okay=False), default=None, help='输出目录')
@handle_cli_errors
def train(task: str, **params) -> None:
    """训练去噪（denoise）或超分辨率（sr）网络，输出检查点与损失 CSV"""
    cfg = resolve_config('train', params)
    cfg['task'] = task
    out_dir = _out_dir(cfg['out'], f"train_{task}")
    cfg['out'] = out_dir
    cfg['max_lr'] = cfg['max_lr'] if cfg['max_lr'] is not None else DEFAULT_MAX_LR[task]
    cfg['scheduler'] = cfg['scheduler'] or DEFAULT_SCHEDULER[task]
    echo_config(cfg, out_dir)

    data_service = DataService()
    manifest = data_service.load_manifest(cfg['manifest'])
    scale = manifest.scale
    if task == 'sr' and cfg['scale'] is not None and cfg['scale'] != scale:
        raise ConfigError("请求的放大倍数与数据集不一致", {'requested': cfg['scale'], 'dataset': scale})

    pairs = data_service.training_pairs(manifest, task, ('train',))
    val = data_service.training_pairs(manifest, task, ('val',)) if manifest.entries(('val',)) else None
    train_cfg = TrainConfig(epochs=cfg['epochs'], batch_size=cfg['batch_size'], max_lr=cfg['max_lr'],
                            scheduler=cfg['scheduler'], seed=cfg['seed'], val_fraction=cfg['val_fraction'])
    policy = _train_policy(task, cfg, pairs + (val or []))

    if cfg['from_checkpoint']:
        parent = load_checkpoint(cfg['from_checkpoint'])
        if task == 'sr' and parent.config.get('scale') != scale:
            raise ConfigError("父检查点的放大倍数与数据集不一致",
                              {'checkpoint': parent.config.get('scale'), 'dataset': scale})
        result = fine_tune(parent, pairs, train_cfg, policy, val)

        def make_model():
            return parent.build_model().train()
    else:
        def make_model():
            return build_model(task, int(manifest.axis.size), scale, **_arch_params(task, cfg))

        result = train_model(make_model(), pairs, train_cfg, policy, val, {'manifest': str(cfg['manifest'])})

    ckpt_path = save_checkpoint(result.checkpoint, os.path.join(out_dir, f"{task}.dprc"))
    exporter = ReportExporter(out_dir)
    loss_path = exporter.export_table_csv(result.history, f"loss_{task}.csv")
    click.echo(f"Wrote checkpoint: {ckpt_path}")
    click.echo(f"Wrote loss history: {loss_path}")

    if cfg['cv'] == 'loo':
        cv_pairs = data_service.training_pairs(manifest, task, ('train', 'val'))
        folds = cross_validate(make_model, cv_pairs, train_cfg, policy)
        cv_path = exporter.export_table_csv(folds, f"cv_{task}.csv")
        click.echo(f"cv_val_l1_mean={folds['val_l1'].mean():.6f}")
        click.echo(f"Wrote cross-validation: {cv_path}")


def _peaks(peak) -> Tuple[float, ...]:
    if isinstance(peak, (list, tuple)):
        return tuple(float(p) for p in peak)
    return (float(peak),)


@cli.command()
@click.option('--input', 'input_path', type=click.Path(dir_okay=False), required=True,
              help='低信噪比（低分辨率）输入立方体 HRC1')
@click.option('--denoiser', type=click.Path(dir_okay=False), default=None, help='去噪检查点')
@click.option('--sr', 'sr_path', type=click.Path(dir_okay=False), default=None, help='超分辨率检查点')
@click.option('--reference', type=click.Path(dir_okay=False), default=None, help='参考立方体 HRC1')
@click.option('--scale', type=SCALE_CHOICE, default=None, help='期望的放大倍数（须与检查点一致）')
@click.option('--k', type=click.IntRange(min=1), default=None, help='VCA 端元数')
@click.option('--seed', type=int, default=None, help='VCA 随机种子')
@click.option('--t-low', type=float, default=None, help='输入积分时间（默认取立方体元数据）')
@click.option('--t-high', type=float, default=None, help='参考积分时间')
@click.option('--peak', type=float, multiple=True, help='峰强度热图的谱峰中心（可重复）')
@click.option('--half-width', type=float, default=None, help='峰强度积分半宽（cm⁻¹）')
@click.option('--sg-order', type=click.IntRange(min=0), default=None, help='基线 SG 阶数')
@click.option('--sg-frame', type=click.IntRange(min=1), default=None, help='基线 SG 窗宽')
@click.option('--n-jobs', type=int, default=1, show_default=True, help='丰度回归并行数')
@click.option('--out', type=click.Path(file_okay=False), default=None, help='输出目录')
@handle_cli_errors
def pipeline(**params) -> None:
    """去噪 → 超分辨率 → 指标、分类准确率、热图与加速比报告"""
    params['peak'] = list(params['peak']) or None
    cfg = resolve_config('pipeline', params)
    out_dir = _out_dir(cfg['out'], 'pipeline')
    cfg['out'] = out_dir
    echo_config(cfg, out_dir)

    inp = load_cube(cfg['input_path'])
    denoiser = load_checkpoint(cfg['denoiser']) if cfg['denoiser'] else None
    sr_model = load_checkpoint(cfg['sr_path']) if cfg['sr_path'] else None
    reference = load_cube(cfg['reference']) if cfg['reference'] else None

    service = PipelineService()
    result = service.run(
        inp, denoiser, sr_model, reference, scale=cfg['scale'], k=cfg['k'], seed=cfg['seed'],
        t_low=cfg['t_low'], t_high=cfg['t_high'], sg_params=SgParams(cfg['sg_order'], cfg['sg_frame']),
        peaks=_peaks(cfg['peak']), half_width=cfg['half_width'], n_jobs=cfg['n_jobs']
    )

    exporter = ReportExporter(out_dir)
    exporter.export_cube(result['output'], 'output.hrc')
    exporter.export_cube(result['baseline'], 'baseline.hrc')
    for name, image in result['peak_maps'].items():
        exporter.export_heatmap(image, f"peak_{name}")
    if 'labels' in result:
        for name, labels in result['labels'].items():
            exporter.export_labels(labels, f"labels_{name}")

    report = service.summary(result)
    report['input'] = cfg['input_path']
    exporter.export_json(report, 'report.json')
    exporter.export_text(report, 'report.txt')
    click.echo(f"speedup={report['speedup']:g}")
    if 'metrics_output' in report:
        click.echo(f"ssim={report['metrics_output']['ssim']:.6f} psnr={report['metrics_output']['psnr']:.4f}")
    click.echo(f"Wrote report: {os.path.join(out_dir, 'report.json')}")


@cli.command()
@click.option('--manifest', type=click.Path(dir_okay=False), required=True, help='数据集清单')
@click.option('--mode', type=click.Choice(['grid', 'upsample', 'all']), default=None, help='对比内容')
@click.option('--roles', type=str, default=None, help='参与评估的样本角色（逗号分隔）')
@click.option('--scale', type=SCALE_CHOICE, default=None, help='放大倍数（须与数据集一致）')
@click.option('--denoiser', type=click.Path(dir_okay=False), default=None, help='参与对比的去噪检查点')
@click.option('--sr', 'sr_path', type=click.Path(dir_okay=False), default=None, help='参与对比的超分辨率检查点')
@click.option('--out', type=click.Path(file_okay=False), default=None, help='输出目录')
@handle_cli_errors
def baseline(**params) -> None:
    """SG 参数网格与最近邻/双三次上采样基线对比表"""
    cfg = resolve_config('baseline', params)
    out_dir = _out_dir(cfg['out'], 'baseline')
    cfg['out'] = out_dir
    echo_config(cfg, out_dir)

    data_service = DataService()
    manifest = data_service.load_manifest(cfg['manifest'])
    if cfg['scale'] is not None and cfg['scale'] != manifest.scale:
        raise ConfigError("请求的放大倍数与数据集不一致", {'requested': cfg['scale'], 'dataset': manifest.scale})
    roles = tuple(role.strip() for role in cfg['roles'].split(',') if role.strip())

    service = BaselineService()
    exporter = ReportExporter(out_dir)
    tables, report = {}, {'roles': list(roles)}
    if cfg['mode'] in ('grid', 'all'):
        pairs = data_service.training_pairs(manifest, 'denoise', roles)
        denoiser = load_checkpoint(cfg['denoiser']) if cfg['denoiser'] else None
        table = service.sg_grid_table([p.inp for p in pairs], [p.target for p in pairs], denoiser=denoiser)
        tables['SG grid'] = table
        exporter.export_table_csv(table, 'baseline_grid.csv')
        best = table[table['best']].iloc[0]
        report['best_sg'] = {'label': best['label'], 'mse': best['mse'], 'psnr': best['psnr'], 'ssim': best['ssim']}
        click.echo(table.to_string(index=False))
    if cfg['mode'] in ('upsample', 'all'):
        pairs = data_service.training_pairs(manifest, 'sr', roles)
        sr_model = load_checkpoint(cfg['sr_path']) if cfg['sr_path'] else None
        table = service.upsampling_table([p.inp for p in pairs], [p.target for p in pairs],
                                         manifest.scale, sr_model)
        tables['Upsampling'] = table
        exporter.export_table_csv(table, 'baseline_upsampling.csv')
        report['upsampling'] = {row['method']: {'mse': row['mse'], 'psnr': row['psnr'], 'ssim': row['ssim']}
                                for _, row in table.iterrows()}
        click.echo(table.to_string(index=False))

    exporter.export_excel(tables, report, 'baseline.xlsx', title='基线对比报告')
    exporter.export_json(report, 'report.json')
    exporter.export_text(report, 'report.txt')


if __name__ == '__main__':
    cli()
