"""
基线对比服务
Baseline Service

Savitzky-Golay 参数网格去噪与最近邻/双三次上采样基线，可选与训练好的网络对比。
结果以 DataFrame 返回，MSE 最小的一行标记为 best。
"""

import logging
import time
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from dsp import SG_FRAMES, SG_ORDERS, SgParams, sg_filter_cube, sg_grid
from hypercube import HyperCube
from metrics import score
from neural import Checkpoint, infer_denoise, infer_superres
from resample import upsample_bicubic, upsample_nearest
from utils.exceptions import DataError, ShapeError

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ['mse', 'psnr', 'ssim']


def _mean_scores(outputs: Sequence[HyperCube], references: Sequence[HyperCube]) -> dict:
    records = [score(ref, out) for ref, out in zip(references, outputs)]
    return {key: float(np.mean([r[key] for r in records])) for key in METRIC_COLUMNS}


def _flag_best(table: pd.DataFrame) -> pd.DataFrame:
    table = table.reset_index(drop=True)
    table['best'] = False
    if not table.empty:
        table.loc[table['mse'].idxmin(), 'best'] = True
    return table


def _check_pairs(inputs: Sequence[HyperCube], references: Sequence[HyperCube]) -> None:
    if not inputs:
        raise DataError("没有可评估的立方体")
    if len(inputs) != len(references):
        raise ShapeError("输入与参考立方体数量不一致", {'inputs': len(inputs), 'references': len(references)})


class BaselineService:
    """基线对比服务类"""

    def sg_grid_table(self, noisy: Sequence[HyperCube], clean: Sequence[HyperCube],
                      orders: Iterable[int] = SG_ORDERS, frames: Iterable[int] = SG_FRAMES,
                      denoiser: Optional[Checkpoint] = None) -> pd.DataFrame:
        """
        SG 参数网格评估：每个 (order, frame) 一行

        Args:
            noisy: 低信噪比立方体
            clean: 对应的参考立方体
            orders, frames: 网格范围（只保留 order < frame 的组合）
            denoiser: 可选的去噪网络，结果追加为 method = resunet1d 的一行

        Returns:
            pd.DataFrame: method, order, frame, label, mse, psnr, ssim, best
        """
        _check_pairs(noisy, clean)
        start = time.time()
        rows: List[dict] = []
        for params in sg_grid(orders, frames):
            outputs = [sg_filter_cube(cube, params) for cube in noisy]
            rows.append({'method': 'savgol', 'order': params.order, 'frame': params.frame,
                         'label': params.label, **_mean_scores(outputs, clean)})
        table = _flag_best(pd.DataFrame(rows))
        if denoiser is not None:
            outputs = [infer_denoise(denoiser, cube) for cube in noisy]
            model_row = {'method': denoiser.arch, 'order': None, 'frame': None,
                         'label': denoiser.arch, **_mean_scores(outputs, clean), 'best': False}
            table = pd.concat([table, pd.DataFrame([model_row])], ignore_index=True)
        logger.info(f"SG 网格评估完成：{len(rows)} 组参数，耗时 {time.time() - start:.2f} 秒")
        return table

    def best_sg(self, table: pd.DataFrame) -> SgParams:
        row = table[(table['method'] == 'savgol') & table['best']].iloc[0]
        return SgParams(int(row['order']), int(row['frame']))

    def upsampling_table(self, lr: Sequence[HyperCube], hr: Sequence[HyperCube], s: int,
                         sr_model: Optional[Checkpoint] = None) -> pd.DataFrame:
        """
        上采样方法对比：nearest、bicubic（及可选的 HyRISR）

        Returns:
            pd.DataFrame: method, mse, psnr, ssim, best
        """
        _check_pairs(lr, hr)
        start = time.time()
        methods = {
            'nearest': lambda cube, ref: upsample_nearest(cube, s, ref.height, ref.width),
            'bicubic': lambda cube, ref: upsample_bicubic(cube, s, ref.height, ref.width),
        }
        if sr_model is not None:
            methods[sr_model.arch] = lambda cube, ref: infer_superres(sr_model, cube, ref.height, ref.width)
        rows = []
        for name, method in methods.items():
            outputs = [method(cube, ref) for cube, ref in zip(lr, hr)]
            rows.append({'method': name, **_mean_scores(outputs, hr)})
        logger.info(f"上采样对比完成（s={s}），耗时 {time.time() - start:.2f} 秒")
        return _flag_best(pd.DataFrame(rows))
