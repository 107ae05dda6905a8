"""
流水线服务
Pipeline Service

低信噪比、低分辨率输入依次经过去噪与超分辨率网络；给定参考立方体时计算图像
质量指标，并在参考图像上做 VCA 端元提取，比较网络输出与 SG + 双三次基线的
逐像素分类准确率，同时给出成像加速比与采集时间。
"""

import logging
import time
from typing import Any, Dict, List, Optional, Sequence

from dsp import SgParams, sg_filter_cube
from hypercube import HyperCube, peak_intensity_map
from metrics import acquisition_time, format_min_sec, score, speedup
from neural import Checkpoint, infer_denoise, infer_superres
from resample import upsample_bicubic
from unmix import abundance_map, classification_accuracy, classify_pixels, vca
from utils.exceptions import ConfigError

logger = logging.getLogger(__name__)


class PipelineService:
    """流水线服务类"""

    def __init__(self):
        self._run_history: List[Dict[str, Any]] = []

    @staticmethod
    def check_composition(denoiser: Optional[Checkpoint], sr_model: Optional[Checkpoint],
                          cube: HyperCube, scale: Optional[int] = None) -> int:
        """
        检查去噪与超分辨率网络能否串联，返回放大倍数（无超分辨率时为 1）

        Args:
            scale: 期望的放大倍数，None 表示取超分辨率检查点的值

        Raises:
            ConfigError: 网络结构、波段数或放大倍数不一致
        """
        if denoiser is not None:
            if denoiser.arch != 'resunet1d':
                raise ConfigError("去噪检查点不是 ResUNet", {'arch': denoiser.arch})
            if denoiser.config['in_len'] != cube.bands:
                raise ConfigError("去噪网络波段数与输入不一致",
                                  {'model': denoiser.config['in_len'], 'cube': cube.bands})
        if sr_model is None:
            if scale not in (None, 1):
                raise ConfigError("放大倍数 > 1 需要超分辨率检查点", {'scale': scale})
            return 1
        if sr_model.arch != 'hyrisr':
            raise ConfigError("超分辨率检查点不是 HyRISR", {'arch': sr_model.arch})
        if sr_model.config['bands'] != cube.bands:
            raise ConfigError("超分辨率网络波段数与输入不一致",
                              {'model': sr_model.config['bands'], 'cube': cube.bands})
        model_scale = int(sr_model.config['scale'])
        if scale is not None and scale != model_scale:
            raise ConfigError("超分辨率检查点的放大倍数与请求不一致",
                              {'checkpoint': model_scale, 'requested': scale})
        return model_scale

    def run(self, inp: HyperCube, denoiser: Optional[Checkpoint] = None,
            sr_model: Optional[Checkpoint] = None, reference: Optional[HyperCube] = None,
            scale: Optional[int] = None, k: int = 4, seed: int = 0, t_low: Optional[float] = None, t_high: float = 1.0,
            sg_params: SgParams = SgParams(1, 9), peaks: Sequence[float] = (1450.0,),
            half_width: float = 10.0, n_jobs: int = 1) -> Dict[str, Any]:
        """
        执行去噪 → 超分辨率 → 评估

        Args:
            inp: 低信噪比（低分辨率）输入立方体
            denoiser: 去噪检查点，None 表示跳过
            sr_model: 超分辨率检查点，None 表示跳过
            reference: 高信噪比高分辨率参考立方体
            scale: 期望的放大倍数（与检查点不一致时报错）
            k: VCA 端元数
            seed: VCA 随机种子
            t_low, t_high: 单条光谱积分时间，t_low 默认取输入元数据
            sg_params: 基线 SG 参数
            peaks: 输出峰强度图的谱峰中心
            half_width: 峰强度积分半宽
            n_jobs: 丰度回归并行数

        Returns:
            Dict[str, Any]: 输出立方体、基线立方体、指标与峰强度图
        """
        start = time.time()
        s = self.check_composition(denoiser, sr_model, inp, scale)
        out_h, out_w = (reference.height, reference.width) if reference is not None else \
            (inp.height * s, inp.width * s)
        logger.info(f"开始流水线：输入 {inp.shape}，s={s}，输出 ({out_h}, {out_w})")

        denoised = infer_denoise(denoiser, inp) if denoiser is not None else inp
        output = infer_superres(sr_model, denoised, out_h, out_w) if sr_model is not None else denoised

        baseline = sg_filter_cube(inp, sg_params)
        if s > 1:
            baseline = upsample_bicubic(baseline, s, out_h, out_w)

        t_low = inp.meta.integration_time if t_low is None else t_low
        result: Dict[str, Any] = {
            'output': output,
            'baseline': baseline,
            'scale': s,
            'speedup': speedup(t_low, t_high, s),
            't_low': t_low,
            't_high': t_high,
            'baseline_method': f"{sg_params.label} + bicubic" if s > 1 else sg_params.label,
        }
        full_time = acquisition_time(out_h, out_w, t_high)
        fast_time = acquisition_time(inp.height, inp.width, t_low)
        result['imaging_time_high'] = format_min_sec(full_time)
        result['imaging_time_fast'] = format_min_sec(fast_time)

        images = {'output': output, 'baseline': baseline}
        if reference is not None:
            images['reference'] = reference
            result['metrics_output'] = score(reference, output)
            result['metrics_baseline'] = score(reference, baseline)
            result.update(self._classify(reference, output, baseline, k, seed, n_jobs))
        result['peak_maps'] = {
            f"{name}_{peak:g}": peak_intensity_map(cube, peak, half_width)
            for name, cube in images.items() for peak in peaks
        }

        result['execution_time'] = time.time() - start
        self._record_run(result)
        logger.info(f"流水线完成，耗时 {result['execution_time']:.2f} 秒，加速比 {result['speedup']:g}×")
        return result

    def _classify(self, reference: HyperCube, output: HyperCube, baseline: HyperCube,
                  k: int, seed: int, n_jobs: int) -> Dict[str, Any]:
        endmembers = vca(reference, k, seed)
        labels = {
            name: classify_pixels(abundance_map(cube, endmembers, n_jobs))
            for name, cube in (('reference', reference), ('output', output), ('baseline', baseline))
        }
        return {
            'endmembers': endmembers,
            'labels': labels,
            'accuracy_output': classification_accuracy(labels['output'], labels['reference']),
            'accuracy_baseline': classification_accuracy(labels['baseline'], labels['reference']),
        }

    def summary(self, result: Dict[str, Any]) -> Dict[str, Any]:
        """可序列化的报告字段（去掉立方体与图像），附带本服务的运行历史"""
        keys = ('scale', 'speedup', 't_low', 't_high', 'baseline_method', 'imaging_time_high',
                'imaging_time_fast', 'metrics_output', 'metrics_baseline', 'accuracy_output',
                'accuracy_baseline', 'execution_time')
        report = {key: result[key] for key in keys if key in result}
        report['output_shape'] = list(result['output'].shape)
        recent = self.get_run_history()
        report['run_history'] = {
            'runs': len(self._run_history),
            'recent_execution_time': [run['execution_time'] for run in recent],
            'recent_ssim': [run['ssim'] for run in recent],
        }
        return report

    def _record_run(self, result: Dict[str, Any]) -> None:
        self._run_history.append({
            'timestamp': time.time(),
            'scale': result['scale'],
            'execution_time': result['execution_time'],
            'ssim': result.get('metrics_output', {}).get('ssim'),
        })
        if len(self._run_history) > 100:
            self._run_history = self._run_history[-100:]

    def get_run_history(self, limit: int = 10) -> List[Dict[str, Any]]:
        """最近 limit 次运行记录（时间戳、放大倍数、耗时、SSIM）"""
        return self._run_history[-limit:]
