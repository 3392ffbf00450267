"""Deterministic synthetic traffic scenes for tests, demos and benchmarks."""

from __future__ import annotations

import numpy as np

from .demosaic import BayerFrame, BayerOrder, RgbFrame
from .detector import PlateRegion

# Plate-background yellow around hue 50 deg with strong saturation; survives
# the +-120 noise used below with wide margin inside the default window.
PLATE_RGB = (3600, 3100, 600)


def mosaic_from_rgb(pixels, order=BayerOrder.RGGB) -> BayerFrame:
    """Expand an RGB image into the mosaic whose quad-binning demosaic
    reproduces it exactly (both green sites of a quad carry the green value)."""
    pixels = pixels.pixels if isinstance(pixels, RgbFrame) else np.asarray(pixels)
    h, w, _ = pixels.shape
    samples = np.empty((2 * h, 2 * w), np.uint16)
    (rr, rc), (g1r, g1c), (g2r, g2c), (br, bc) = order.quad_sites
    samples[rr::2, rc::2] = pixels[:, :, 0]
    samples[g1r::2, g1c::2] = pixels[:, :, 1]
    samples[g2r::2, g2c::2] = pixels[:, :, 1]
    samples[br::2, bc::2] = pixels[:, :, 2]
    return BayerFrame(samples, order)


def synthetic_scene(
    width: int,
    height: int,
    seed: int = 0,
    plate: PlateRegion | None = None,
    noise: int = 120,
) -> tuple[RgbFrame, PlateRegion]:
    """Street-like RGB scene with a yellow plate; returns it with the plate rect.

    Layout: dull sky over a dark road, one car body, and a plate whose
    position defaults to a deterministic spot derived from the seed.
    """
    rng = np.random.default_rng(seed)
    pixels = np.empty((height, width, 3), np.int32)

    horizon = height // 3
    pixels[:horizon] = (2100, 2150, 2300)
    pixels[horizon:] = (1500, 1500, 1550)

    if plate is None:
        ph = max(6, height // 12)
        pw = max(24, width // 5)
        top = int(rng.integers(horizon, max(horizon + 1, height - ph - 1)))
        left = int(rng.integers(1, max(2, width - pw - 1)))
        plate = PlateRegion(top, min(top + ph - 1, height - 1), left, min(left + pw - 1, width - 1))

    # car body surrounding the plate, clipped to the frame
    body_top = max(0, plate.top - height // 10)
    body_bottom = min(height - 1, plate.bottom + height // 20)
    body_left = max(0, plate.left - width // 10)
    body_right = min(width - 1, plate.right + width // 10)
    pixels[body_top : body_bottom + 1, body_left : body_right + 1] = (900, 1100, 2600)

    pixels[plate.top : plate.bottom + 1, plate.left : plate.right + 1] = PLATE_RGB

    if noise:
        pixels += rng.integers(-noise, noise + 1, size=pixels.shape, dtype=np.int32)
    np.clip(pixels, 0, 4095, out=pixels)
    return RgbFrame(pixels.astype(np.uint16)), plate


def synthetic_bayer_scene(
    width: int,
    height: int,
    seed: int = 0,
    order=BayerOrder.RGGB,
    plate: PlateRegion | None = None,
) -> tuple[BayerFrame, PlateRegion]:
    """Mosaiced scene: `width` x `height` is the Bayer geometry (even dims)."""
    rgb, region = synthetic_scene(width // 2, height // 2, seed=seed, plate=plate)
    return mosaic_from_rgb(rgb, order), region


def random_bayer_frame(width: int, height: int, seed: int = 0, order=BayerOrder.RGGB) -> BayerFrame:
    """Uniform 12-bit noise mosaic."""
    rng = np.random.default_rng(seed)
    samples = rng.integers(0, 4096, size=(height, width), dtype=np.uint16)
    return BayerFrame(samples, order)
