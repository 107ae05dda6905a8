import json

import numpy as np
import pandas as pd
import pytest
from openpyxl import load_workbook
from PIL import Image

from exporter import ReportExporter, flatten_report, to_uint8
from hypercube import load_cube
from unmix import AbundanceCube, LabelMap
from utils.exceptions import IoError, ValidationError
from conftest import make_cube


def test_to_uint8_scaling():
    pixels, lo, hi = to_uint8(np.array([[1.0, 2.0], [3.0, 5.0]]))
    np.testing.assert_array_equal(pixels, [[0, 64], [128, 255]])
    assert (lo, hi) == (1.0, 5.0)
    constant, lo, hi = to_uint8(np.full((2, 3), 7.0))
    np.testing.assert_array_equal(constant, 0)
    assert lo == hi == 7.0
    with pytest.raises(ValidationError):
        to_uint8(np.zeros(4))
    with pytest.raises(ValidationError):
        to_uint8(np.array([[np.nan, 1.0]]))


def test_flatten_report():
    report = {'speedup': 40.0, 'metrics': {'mse': 0.1, 'ssim': 0.9}, 'shape': [2, 3]}
    assert flatten_report(report) == [('speedup', 40.0), ('metrics.mse', 0.1), ('metrics.ssim', 0.9),
                                      ('shape', [2, 3])]


def test_export_json_and_text(tmp_path):
    exporter = ReportExporter(str(tmp_path / 'out'))
    report = {'speedup': np.float64(40.0), 'metrics_output': {'psnr': float('inf'), 'mse': 0.0},
              'output_shape': [8, 8, 32], 'baseline_method': 'SG(order 1, frame 9)'}
    data = json.loads(open(exporter.export_json(report), encoding='utf-8').read())
    assert data['speedup'] == 40.0
    assert data['metrics_output']['psnr'] == 'inf'
    lines = open(exporter.export_text(report), encoding='utf-8').read().splitlines()
    assert lines == ['speedup=40', 'metrics_output.psnr=inf', 'metrics_output.mse=0',
                     'output_shape=8,8,32', 'baseline_method=SG(order 1, frame 9)']


def test_export_heatmap(tmp_path):
    exporter = ReportExporter(str(tmp_path))
    image = np.arange(12, dtype=np.float64).reshape(3, 4)
    png, sidecar = exporter.export_heatmap(image, 'peak_output_1450')
    with Image.open(png) as img:
        assert img.mode == 'L'
        assert img.size == (4, 3)
        pixels = np.asarray(img)
    np.testing.assert_array_equal(pixels, to_uint8(image)[0])
    assert open(sidecar, encoding='utf-8').read() == 'min=0\nmax=11\nshape=3x4\n'


def test_export_labels_gray_levels(tmp_path):
    exporter = ReportExporter(str(tmp_path))
    path = exporter.export_labels(LabelMap(np.array([[0, 1, 2]]), 3), 'labels_output')
    with Image.open(path) as img:
        np.testing.assert_array_equal(np.asarray(img), [[0, 128, 255]])


def test_export_abundances(tmp_path):
    exporter = ReportExporter(str(tmp_path))
    values = np.random.default_rng(0).random((3, 4, 2))
    paths = exporter.export_abundances(AbundanceCube(values, ['lipid', 'protein']), 'abundance')
    assert len(paths) == 5
    cube = load_cube(paths[0])
    assert cube.shape == (3, 4, 2)
    np.testing.assert_array_equal(cube.data, values.astype(np.float32))
    assert (tmp_path / 'abundance_protein.png').exists()
    single = exporter.export_abundances(AbundanceCube(values[:, :, :1]), 'single')
    assert len(single) == 2


def test_export_cube_round_trip(tmp_path, rng):
    exporter = ReportExporter(str(tmp_path))
    cube = make_cube(rng, height=3, width=2, bands=5)
    loaded = load_cube(exporter.export_cube(cube, 'output.hrc'))
    np.testing.assert_array_equal(loaded.data, cube.data.astype(np.float32))
    assert loaded.meta == cube.meta


def test_export_excel(tmp_path):
    exporter = ReportExporter(str(tmp_path))
    table = pd.DataFrame({'method': ['nearest', 'bicubic'], 'mse': [0.2, 0.1], 'best': [False, True]})
    path = exporter.export_excel({'Upsampling': table, 'Empty': pd.DataFrame()}, {'roles': ['test'], 'n': 2})
    workbook = load_workbook(path)
    assert workbook.sheetnames == ['概要 (Summary)', 'Upsampling', 'Empty']
    sheet = workbook['Upsampling']
    assert [c.value for c in sheet[1]] == ['method', 'mse', 'best']
    assert sheet['A3'].value == 'bicubic'
    assert sheet['A3'].fill.start_color.rgb.endswith('E2EFDA')
    assert not sheet['A2'].fill.start_color.rgb.endswith('E2EFDA')
    summary = workbook['概要 (Summary)']
    assert summary['A5'].value == 'roles' and summary['B5'].value == 'test'
    assert workbook['Empty']['A1'].value == '无数据'


def test_export_csv(tmp_path):
    exporter = ReportExporter(str(tmp_path))
    history = pd.DataFrame({'epoch': [1, 2], 'train_l1': [0.5, 0.4], 'val_l1': [0.6, 0.45], 'lr': [1e-4, 5e-5]})
    path = exporter.export_table_csv(history, 'loss_denoise.csv')
    pd.testing.assert_frame_equal(pd.read_csv(path), history)


def test_output_dir_must_be_creatable(tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('x')
    with pytest.raises(IoError):
        ReportExporter(str(blocker))
