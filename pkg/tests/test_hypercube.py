import numpy as np
import pytest

from hypercube import (
    AcquisitionMeta, HyperCube, Spectrum, crop_spectral, fingerprint_axis, load_cube,
    load_spectrum_csv, peak_intensity_map, raw_axis, save_cube, save_spectrum_csv
)
from hypercube.io import decode_cube, encode_cube
from utils.exceptions import FormatError, IoError, RangeError, ValidationError
from conftest import make_cube


def test_cube_validation():
    axis = fingerprint_axis(5)
    with pytest.raises(ValidationError):
        HyperCube(np.zeros((2, 2)), axis)
    with pytest.raises(ValidationError):
        HyperCube(np.zeros((2, 2, 4)), axis)
    with pytest.raises(ValidationError):
        HyperCube(np.zeros((2, 2, 5)), axis[::-1])
    data = np.zeros((2, 2, 5))
    data[0, 0, 0] = np.nan
    with pytest.raises(ValidationError):
        HyperCube(data, axis)
    with pytest.raises(ValidationError):
        HyperCube(np.zeros((2, 2, 1)), axis[:1])


def test_meta_validation():
    with pytest.raises(ValidationError):
        AcquisitionMeta(integration_time=0)
    with pytest.raises(ValidationError):
        AcquisitionMeta(pixel_pitch=-1)
    assert AcquisitionMeta().with_pitch(0.25).pixel_pitch == 0.25


def test_cube_is_immutable(cube):
    with pytest.raises(ValueError):
        cube.data[0, 0, 0] = 1.0


def test_spectrum_and_pixels(cube):
    spectrum = cube.spectrum(2, 3)
    np.testing.assert_array_equal(spectrum.values, cube.data[2, 3])
    pixels = cube.pixels()
    assert pixels.shape == (cube.height * cube.width, cube.bands)
    np.testing.assert_array_equal(pixels[2 * cube.width + 3], spectrum.values)


def test_hrc1_round_trip_is_byte_exact(tmp_path, rng):
    cube = make_cube(rng, meta=AcquisitionMeta(0.1, 0.25, 'cell_007 µ'))
    path = tmp_path / 'cube.hrc'
    save_cube(cube, path)
    first = path.read_bytes()
    loaded = load_cube(path)
    save_cube(loaded, path)
    assert path.read_bytes() == first
    np.testing.assert_array_equal(loaded.data, cube.data.astype(np.float32))
    np.testing.assert_array_equal(loaded.axis, cube.axis)
    assert loaded.meta == cube.meta


def test_hrc1_header_layout(cube):
    raw = encode_cube(cube)
    assert raw[:4] == b'HRC1'
    label_len = len(cube.meta.label.encode('utf-8'))
    expected = 4 + 4 * 4 + 8 * 2 + 4 + label_len + 8 * cube.bands + 4 * cube.data.size
    assert len(raw) == expected


def test_hrc1_bad_magic_and_truncation(cube):
    raw = encode_cube(cube)
    with pytest.raises(FormatError):
        decode_cube(b'XXXX' + raw[4:])
    with pytest.raises(FormatError):
        decode_cube(raw[:-1])
    with pytest.raises(FormatError):
        decode_cube(raw + b'\x00')
    with pytest.raises(FormatError):
        decode_cube(raw[:10])


def test_hrc1_non_increasing_axis_rejected(cube):
    raw = bytearray(encode_cube(cube))
    label_len = len(cube.meta.label.encode('utf-8'))
    axis_offset = 4 + 4 * 4 + 8 * 2 + 4 + label_len
    raw[axis_offset:axis_offset + 8] = np.array([1e9], dtype='<f8').tobytes()
    with pytest.raises(ValidationError):
        decode_cube(bytes(raw))


def test_save_overflow_rejected(tmp_path):
    cube = HyperCube(np.full((1, 1, 2), 1e300), fingerprint_axis(2))
    path = tmp_path / 'big.hrc'
    with pytest.raises(ValidationError):
        save_cube(cube, path)
    assert not path.exists()


def test_load_missing_file(tmp_path):
    with pytest.raises(IoError):
        load_cube(tmp_path / 'missing.hrc')


def test_crop_spectral(cube):
    cropped = crop_spectral(cube, 900.0, 1500.0)
    assert np.all((cropped.axis >= 900.0) & (cropped.axis <= 1500.0))
    keep = (cube.axis >= 900.0) & (cube.axis <= 1500.0)
    np.testing.assert_array_equal(cropped.data, cube.data[:, :, keep])


def test_crop_full_range_is_identity(cube):
    assert crop_spectral(cube, cube.axis[0], cube.axis[-1]).equals(cube)


def test_crop_errors(cube):
    with pytest.raises(RangeError):
        crop_spectral(cube, 1500.0, 900.0)
    with pytest.raises(RangeError):
        crop_spectral(cube, 2000.0, 3000.0)
    with pytest.raises(RangeError):
        crop_spectral(cube, 1000.0, 1000.5)


def test_peak_intensity_map(cube):
    image = peak_intensity_map(cube, 1200.0, 40.0)
    window = (cube.axis >= 1160.0) & (cube.axis <= 1240.0)
    np.testing.assert_allclose(image, cube.data[:, :, window].mean(axis=2))
    assert image.shape == (cube.height, cube.width)
    with pytest.raises(RangeError):
        peak_intensity_map(cube, 5000.0, 1.0)


def test_spectrum_csv_round_trip(tmp_path):
    spectrum = Spectrum(fingerprint_axis(10), np.linspace(0, 1, 10))
    path = tmp_path / 'spectrum.csv'
    save_spectrum_csv(spectrum, path)
    loaded = load_spectrum_csv(path)
    np.testing.assert_allclose(loaded.values, spectrum.values)
    np.testing.assert_allclose(loaded.axis, spectrum.axis)


def test_spectrum_csv_without_header(tmp_path):
    path = tmp_path / 'plain.csv'
    path.write_text("600,1.0\n700,2.0\n800,3.0\n")
    loaded = load_spectrum_csv(path)
    np.testing.assert_array_equal(loaded.values, [1.0, 2.0, 3.0])


def test_axis_builders():
    axis = fingerprint_axis(500)
    assert axis[0] == 600.0 and axis[-1] == 1800.0 and axis.size == 500
    raw = raw_axis()
    assert raw[0] == 0.0 and raw[-1] <= 3700.0 + 1e-9
