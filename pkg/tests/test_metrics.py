import math

import numpy as np
import pytest

from hypercube import HyperCube, fingerprint_axis
from metrics import (
    MetricsPair, SsimConstants, acquisition_time, format_min_sec, mse, psnr, score, speedup, ssim
)
from utils.exceptions import ParamError, ShapeError, ValidationError


def _naive(x, y, k1=0.01, k2=0.03):
    m, n, p = x.shape
    total = 0.0
    x_max = -math.inf
    for i in range(m):
        for j in range(n):
            for k in range(p):
                total += (float(x[i, j, k]) - float(y[i, j, k])) ** 2
                x_max = max(x_max, float(x[i, j, k]))
    error = total / (m * n * p)
    c1, c2 = (k1 * x_max) ** 2, (k2 * x_max) ** 2
    values = []
    for k in range(p):
        xs = [float(v) for v in x[:, :, k].ravel()]
        ys = [float(v) for v in y[:, :, k].ravel()]
        count = len(xs)
        mu_x, mu_y = sum(xs) / count, sum(ys) / count
        var_x = sum((a - mu_x) ** 2 for a in xs) / count
        var_y = sum((b - mu_y) ** 2 for b in ys) / count
        cov = sum((a - mu_x) * (b - mu_y) for a, b in zip(xs, ys)) / count
        values.append((2 * mu_x * mu_y + c1) * (2 * cov + c2)
                      / ((mu_x ** 2 + mu_y ** 2 + c1) * (var_x + var_y + c2)))
    return error, 10 * math.log10(x_max ** 2 / error), sum(values) / p


def _cube(data):
    return HyperCube(data, fingerprint_axis(data.shape[2]))


def test_metrics_match_naive_summation():
    rng = np.random.default_rng(0)
    for _ in range(100):
        shape = tuple(int(v) for v in rng.integers(2, 6, 3))
        x = rng.random(shape) + 0.1
        y = x + 0.1 * rng.standard_normal(shape)
        record = score(_cube(x), _cube(y))
        error, peak_snr, structural = _naive(x, y)
        assert abs(record['mse'] - error) < 1e-10
        assert abs(record['psnr'] - peak_snr) < 1e-10
        assert abs(record['ssim'] - structural) < 1e-10


def test_identical_images():
    rng = np.random.default_rng(1)
    x = _cube(rng.random((5, 4, 3)))
    record = score(x, x)
    assert record['mse'] == 0.0
    assert record['psnr'] == math.inf
    assert record['ssim'] == 1.0


def test_known_psnr():
    x = np.ones((4, 4, 2))
    pair = MetricsPair(x, x - 0.1)
    assert mse(pair) == pytest.approx(0.01)
    assert psnr(pair) == pytest.approx(20.0)


def test_ssim_constants_from_reference():
    x = np.full((2, 2, 2), 2.0)
    record = score(_cube(x), _cube(x))
    assert record['c1'] == pytest.approx((0.01 * 2.0) ** 2)
    assert record['c2'] == pytest.approx((0.03 * 2.0) ** 2)
    assert record['x_max'] == 2.0


def test_ssim_drops_with_noise():
    rng = np.random.default_rng(2)
    x = rng.random((8, 8, 4))
    pair_small = MetricsPair(x, x + 0.01 * rng.standard_normal(x.shape))
    pair_large = MetricsPair(x, x + 0.3 * rng.standard_normal(x.shape))
    consts = SsimConstants.from_reference(pair_small)
    assert ssim(pair_small, consts) > ssim(pair_large, consts)


def test_two_dimensional_inputs_promoted():
    pair = MetricsPair(np.ones((3, 3)), np.ones((3, 3)))
    assert pair.x.shape == (3, 3, 1)


def test_metric_errors():
    with pytest.raises(ShapeError):
        MetricsPair(np.ones((2, 2, 2)), np.ones((2, 2, 3)))
    with pytest.raises(ValidationError):
        MetricsPair(np.array([[[np.nan]]]), np.zeros((1, 1, 1)))
    with pytest.raises(ValidationError):
        psnr(MetricsPair(np.zeros((2, 2, 1)), np.ones((2, 2, 1))))
    with pytest.raises(ValidationError):
        SsimConstants.from_reference(MetricsPair(-np.ones((2, 2, 1)), np.ones((2, 2, 1))))


@pytest.mark.parametrize('s, expected', [(2, 40.0), (3, 90.0), (4, 160.0)])
def test_speedup_figures(s, expected):
    assert speedup(0.1, 1.0, s) == pytest.approx(expected, rel=1e-12)


def test_speedup_errors():
    with pytest.raises(ValidationError):
        speedup(0.0, 1.0, 2)
    with pytest.raises(ParamError):
        speedup(0.1, 1.0, 0)
    assert speedup(0.5, 1.0, 1) == 2.0
    assert speedup(1.0, 1.0, 1) == 1.0


@pytest.mark.parametrize("t_low, t_high, s", [(0.1, 1.0, 2.5), (0.1, 1.0, 1.999), (2.0, 1.0, 2)])
def test_speedup_rejects_fractional_scale_and_inverted_times(t_low, t_high, s):
    with pytest.raises(ParamError):
        speedup(t_low, t_high, s)


def test_acquisition_time_and_format():
    assert acquisition_time(64, 64, 1.0) == 4096.0
    assert format_min_sec(4095) == "68:15"
    assert format_min_sec(4095 / 4) == "17:03"
    assert format_min_sec(59.99) == "00:59"
    with pytest.raises(ValidationError):
        format_min_sec(-1)
    with pytest.raises(ValidationError):
        acquisition_time(4, 4, 0)
