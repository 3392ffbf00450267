import numpy as np
import pytest

from platelink.demosaic import (
    BayerFrame,
    BayerOrder,
    demosaic_downsample,
    iter_demosaic_rows,
)
from platelink.errors import DimensionError, SampleRangeError
from platelink.synthetic import mosaic_from_rgb

from oracles import QUAD_POSITIONS, demosaic_quads_loop

ALL_ORDERS = list(BayerOrder)


@pytest.mark.parametrize("order", ALL_ORDERS)
@pytest.mark.parametrize("value", [0, 4095])
def test_constant_input_is_order_invariant(order, value):
    frame = BayerFrame(np.full((4, 4), value, np.uint16), order)
    rgb = demosaic_downsample(frame)
    assert rgb.width == 2 and rgb.height == 2
    assert np.all(rgb.pixels == value)


def test_single_quad_by_role():
    # RGGB quad with G1=100, R=200, B=50, G2=300 -> (200, 200, 50)
    pos = QUAD_POSITIONS["RGGB"]
    samples = np.zeros((2, 2), np.uint16)
    samples[pos["g1"]] = 100
    samples[pos["r"]] = 200
    samples[pos["b"]] = 50
    samples[pos["g2"]] = 300
    rgb = demosaic_downsample(BayerFrame(samples, BayerOrder.RGGB))
    assert tuple(rgb.pixels[0, 0]) == (200, 200, 50)


def test_green_average_uses_floor():
    samples = np.zeros((2, 2), np.uint16)
    samples[0, 1] = 100  # G1
    samples[1, 0] = 101  # G2
    rgb = demosaic_downsample(BayerFrame(samples, BayerOrder.RGGB))
    assert rgb.pixels[0, 0, 1] == 100


@pytest.mark.parametrize("order", ALL_ORDERS)
def test_matches_per_quad_oracle(order):
    rng = np.random.default_rng(17)
    samples = rng.integers(0, 4096, size=(12, 16), dtype=np.uint16)
    rgb = demosaic_downsample(BayerFrame(samples, order))
    expected = np.array(demosaic_quads_loop(samples, order.value), np.uint16)
    assert np.array_equal(rgb.pixels, expected)


def test_locality_one_sample_touches_one_pixel():
    rng = np.random.default_rng(3)
    for case in range(25):
        order = ALL_ORDERS[case % 4]
        samples = rng.integers(0, 4094, size=(8, 10), dtype=np.uint16)
        base = demosaic_downsample(BayerFrame(samples, order)).pixels
        y = int(rng.integers(0, 8))
        x = int(rng.integers(0, 10))
        perturbed = samples.copy()
        perturbed[y, x] += 2  # +2 moves a green floor-average by exactly 1
        changed = demosaic_downsample(BayerFrame(perturbed, order)).pixels
        diff = np.any(changed != base, axis=2)
        assert diff.sum() == 1
        assert diff[y // 2, x // 2]


def test_output_range_and_determinism():
    rng = np.random.default_rng(5)
    samples = rng.integers(0, 4096, size=(32, 32), dtype=np.uint16)
    frame = BayerFrame(samples, BayerOrder.GRBG)
    a = demosaic_downsample(frame).pixels
    b = demosaic_downsample(frame).pixels
    assert a.max() <= 4095
    assert np.array_equal(a, b)


def test_row_iterator_matches_whole_frame():
    rng = np.random.default_rng(11)
    samples = rng.integers(0, 4096, size=(10, 14), dtype=np.uint16)
    for order in ALL_ORDERS:
        frame = BayerFrame(samples, order)
        stacked = np.stack(list(iter_demosaic_rows(frame)))
        assert np.array_equal(stacked, demosaic_downsample(frame).pixels)


def test_mosaic_roundtrip_is_exact():
    rng = np.random.default_rng(23)
    rgb = rng.integers(0, 4096, size=(9, 13, 3), dtype=np.uint16)
    for order in ALL_ORDERS:
        back = demosaic_downsample(mosaic_from_rgb(rgb, order))
        assert np.array_equal(back.pixels, rgb)


def test_odd_dimensions_rejected():
    with pytest.raises(DimensionError):
        BayerFrame(np.zeros((3, 4), np.uint16))
    with pytest.raises(DimensionError):
        BayerFrame(np.zeros((4, 6, 1), np.uint16))


def test_out_of_range_sample_rejected():
    samples = np.zeros((2, 2), np.uint16)
    samples[0, 0] = 4096
    with pytest.raises(SampleRangeError):
        BayerFrame(samples)


def test_from_flat_checks_length():
    with pytest.raises(DimensionError):
        BayerFrame.from_flat(4, 4, np.zeros(15, np.uint16))
    frame = BayerFrame.from_flat(4, 2, np.arange(8, dtype=np.uint16))
    assert frame.width == 4 and frame.height == 2


def test_frames_are_immutable():
    frame = BayerFrame(np.zeros((2, 2), np.uint16))
    with pytest.raises(ValueError):
        frame.samples[0, 0] = 1
