#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
报告导出模块
Report Export Module

指标报告（key=value 文本与 JSON）、Excel 对比表、8 位灰度热图 PNG（附带记录
灰度映射范围的 .txt）、丰度/标签图与训练损失 CSV。
"""

import json
import logging
import math
import os
from datetime import datetime
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Font, Alignment, PatternFill, Border, Side
from openpyxl.utils.dataframe import dataframe_to_rows
from PIL import Image

from hypercube import HyperCube, save_cube
from unmix import AbundanceCube, LabelMap
from utils.exceptions import IoError, ValidationError

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """numpy 标量与非有限浮点数转换为 JSON 可表示的值"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def flatten_report(report: Dict[str, Any], prefix: str = '') -> List[Tuple[str, Any]]:
    """嵌套字典展开为 (a.b, value) 列表，按插入顺序"""
    items = []
    for key, value in report.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            items.extend(flatten_report(value, f"{name}."))
        else:
            items.append((name, value))
    return items


def _format_value(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.10g')
    if isinstance(value, (list, tuple)):
        return ','.join(_format_value(v) for v in value)
    return str(value)


def to_uint8(image: np.ndarray) -> Tuple[np.ndarray, float, float]:
    """
    最小-最大映射到 0–255

    常数图像映射为全 0。

    Returns:
        Tuple[np.ndarray, float, float]: 8 位图像、最小值、最大值
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2:
        raise ValidationError("热图必须是二维数组", {'shape': image.shape})
    if not np.all(np.isfinite(image)):
        raise ValidationError("热图包含非有限值")
    lo, hi = float(image.min()), float(image.max())
    if hi > lo:
        scaled = np.round((image - lo) / (hi - lo) * 255.0)
    else:
        scaled = np.zeros_like(image)
    return scaled.astype(np.uint8), lo, hi


class ReportExporter:
    """报告导出器"""

    def __init__(self, output_dir: str):
        """
        初始化导出器

        Args:
            output_dir: 输出目录（不存在时创建）
        """
        self.output_dir = output_dir
        try:
            os.makedirs(output_dir, exist_ok=True)
        except OSError as e:
            raise IoError(f"无法创建输出目录: {output_dir}", {'original_error': str(e)})

        # 样式定义
        self.header_font = Font(bold=True, size=12)
        self.center_alignment = Alignment(horizontal='center', vertical='center')
        self.header_fill = PatternFill(start_color='D9E1F2', end_color='D9E1F2', fill_type='solid')
        self.best_fill = PatternFill(start_color='E2EFDA', end_color='E2EFDA', fill_type='solid')
        self.border = Border(
            left=Side(style='thin'),
            right=Side(style='thin'),
            top=Side(style='thin'),
            bottom=Side(style='thin')
        )

    def _path(self, filename: str) -> str:
        return os.path.join(self.output_dir, filename)

    def _write_text(self, filename: str, text: str) -> str:
        path = self._path(filename)
        try:
            with open(path, 'w', encoding='utf-8') as f:
                f.write(text)
        except OSError as e:
            raise IoError(f"写入文件失败: {path}", {'original_error': str(e)})
        return path

    def export_json(self, report: Dict[str, Any], filename: str = 'report.json') -> str:
        """导出 JSON 报告"""
        text = json.dumps(_plain(report), indent=2, sort_keys=True, ensure_ascii=False)
        path = self._write_text(filename, text + '\n')
        logger.info(f"JSON 报告已导出到: {path}")
        return path

    def export_text(self, report: Dict[str, Any], filename: str = 'report.txt') -> str:
        """导出逐行 key=value 文本报告"""
        lines = [f"{key}={_format_value(value)}" for key, value in flatten_report(report)]
        path = self._write_text(filename, '\n'.join(lines) + '\n')
        logger.info(f"文本报告已导出到: {path}")
        return path

    def export_table_csv(self, table: pd.DataFrame, filename: str) -> str:
        """导出表格（训练损失、对比表）为 CSV"""
        path = self._path(filename)
        try:
            table.to_csv(path, index=False)
        except OSError as e:
            raise IoError(f"写入 CSV 失败: {path}", {'original_error': str(e)})
        logger.info(f"CSV 已导出到: {path}（{len(table)} 行）")
        return path

    def export_excel(self, tables: Dict[str, pd.DataFrame], summary: Optional[Dict[str, Any]] = None,
                     filename: str = 'report.xlsx', title: str = '拉曼高光谱处理报告') -> str:
        """
        导出 Excel 报告：概要工作表加每个表格一个工作表

        Args:
            tables: 工作表名到 DataFrame 的映射；含 best 列时最优行高亮
            summary: 概要字段（展开为 key/value 两列）
            filename: 文件名
            title: 概要页标题

        Returns:
            str: 文件路径
        """
        workbook = Workbook()
        workbook.remove(workbook['Sheet'])
        self._create_summary_sheet(workbook, summary or {}, title)
        for name, table in tables.items():
            self._create_table_sheet(workbook, name, table)

        path = self._path(filename)
        try:
            workbook.save(path)
        except OSError as e:
            raise IoError(f"导出 Excel 报告失败: {path}", {'original_error': str(e)})
        logger.info(f"Excel 报告已导出到: {path}")
        return path

    def _create_summary_sheet(self, workbook: Workbook, summary: Dict[str, Any], title: str) -> None:
        ws = workbook.create_sheet("概要 (Summary)")
        ws['A1'] = title
        ws['A1'].font = Font(bold=True, size=16)
        ws['A1'].alignment = self.center_alignment
        ws.merge_cells('A1:B1')
        ws['A2'] = "生成时间:"
        ws['B2'] = datetime.now().strftime('%Y-%m-%d %H:%M:%S')
        ws['A2'].font = self.header_font

        for col, header in enumerate(['指标', '数值'], 1):
            cell = ws.cell(row=4, column=col, value=header)
            cell.font = self.header_font
            cell.fill = self.header_fill
            cell.alignment = self.center_alignment
            cell.border = self.border
        for row, (key, value) in enumerate(flatten_report(summary), 5):
            ws.cell(row=row, column=1, value=key).border = self.border
            cell = ws.cell(row=row, column=2, value=_plain(value) if not isinstance(value, (list, tuple))
                           else _format_value(value))
            cell.border = self.border
        self._fit_columns(ws)

    def _create_table_sheet(self, workbook: Workbook, name: str, table: pd.DataFrame) -> None:
        ws = workbook.create_sheet(name[:31])
        if table.empty:
            ws['A1'] = "无数据"
            return
        for r in dataframe_to_rows(table, index=False, header=True):
            ws.append([_plain(v) for v in r])

        for cell in ws[1]:
            cell.font = self.header_font
            cell.fill = self.header_fill
            cell.alignment = self.center_alignment
            cell.border = self.border

        best = table['best'].tolist() if 'best' in table.columns else [False] * len(table)
        for offset, row in enumerate(ws.iter_rows(min_row=2, max_row=len(table) + 1,
                                                  max_col=len(table.columns))):
            for cell in row:
                cell.border = self.border
                if best[offset]:
                    cell.fill = self.best_fill
        self._fit_columns(ws)

    @staticmethod
    def _fit_columns(ws) -> None:
        for column in ws.columns:
            column_letter = column[0].column_letter
            max_length = max((len(str(cell.value)) for cell in column if cell.value is not None), default=0)
            ws.column_dimensions[column_letter].width = min(max_length + 2, 50)

    def export_heatmap(self, image: np.ndarray, name: str) -> Tuple[str, str]:
        """
        导出 8 位灰度热图与灰度范围附注

        Args:
            image: 二维数组
            name: 文件名（不含扩展名）

        Returns:
            Tuple[str, str]: PNG 路径与附注 .txt 路径
        """
        pixels, lo, hi = to_uint8(image)
        png_path = self._path(f"{name}.png")
        try:
            Image.fromarray(pixels).save(png_path)
        except OSError as e:
            raise IoError(f"写入热图失败: {png_path}", {'original_error': str(e)})
        sidecar = self._write_text(
            f"{name}.txt",
            f"min={_format_value(lo)}\nmax={_format_value(hi)}\nshape={pixels.shape[0]}x{pixels.shape[1]}\n"
        )
        logger.debug(f"热图已导出: {png_path}")
        return png_path, sidecar

    def export_cube(self, cube: HyperCube, filename: str) -> str:
        """导出 HRC1 立方体"""
        path = self._path(filename)
        save_cube(cube, path)
        logger.info(f"立方体已导出到: {path}")
        return path

    def export_abundances(self, abundances: AbundanceCube, name: str = 'abundance') -> List[str]:
        """
        导出丰度：K 波段 HRC1（K ≥ 2 时）与每个端元一张灰度图

        Returns:
            List[str]: 写出的文件路径
        """
        paths = []
        if abundances.k >= 2:
            cube = HyperCube(abundances.values, np.arange(abundances.k, dtype=np.float64))
            paths.append(self.export_cube(cube, f"{name}.hrc"))
        names = abundances.names or [str(k) for k in range(abundances.k)]
        for k, plane_name in enumerate(names):
            paths.extend(self.export_heatmap(abundances.values[:, :, k], f"{name}_{plane_name}"))
        return paths

    def export_labels(self, labels: LabelMap, name: str = 'labels') -> str:
        """导出标签图：标签 l 映射为灰度 round(255·l/(K−1))"""
        scale = 255.0 / max(labels.k - 1, 1)
        pixels = np.round(labels.labels * scale).astype(np.uint8)
        path = self._path(f"{name}.png")
        try:
            Image.fromarray(pixels).save(path)
        except OSError as e:
            raise IoError(f"写入标签图失败: {path}", {'original_error': str(e)})
        return path
