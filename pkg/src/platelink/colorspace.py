"""HSV conversion of 12-bit RGB pixels and yellow-window classification.

Hue/saturation/value follow the normalized hexcone definition: v = max/4095,
s = (max-min)/max (0 when max is 0), h = 60 deg times the sector formula.
Achromatic pixels get the canonical hue 0. The vectorized paths reproduce
the scalar float64 arithmetic exactly so per-pixel and whole-frame
classification can never disagree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .demosaic import MAX_SAMPLE, RgbFrame
from .errors import SampleRangeError


@dataclass(frozen=True)
class HsvPixel:
    h: float
    s: float
    v: float

    def __post_init__(self):
        if not (0.0 <= self.h < 360.0):
            raise ValueError(f"hue {self.h} outside [0, 360)")
        if not (0.0 <= self.s <= 1.0 and 0.0 <= self.v <= 1.0):
            raise ValueError(f"saturation/value ({self.s}, {self.v}) outside [0, 1]")
        if self.s == 0.0 and self.h != 0.0:
            raise ValueError("achromatic pixels must carry the canonical hue 0")


@dataclass(frozen=True)
class YellowWindow:
    """Inclusive HSV acceptance window for plate-background yellow."""

    h_min: float = 40.0
    h_max: float = 70.0
    s_min: float = 0.35
    v_min: float = 0.30

    def __post_init__(self):
        if not (0.0 <= self.h_min < self.h_max < 360.0):
            raise ValueError(f"need 0 <= h_min < h_max < 360, got [{self.h_min}, {self.h_max}]")
        if not (0.0 <= self.s_min <= 1.0 and 0.0 <= self.v_min <= 1.0):
            raise ValueError("s_min and v_min must lie in [0, 1]")


def _check_channel(value) -> int:
    value = int(value)
    if not 0 <= value <= MAX_SAMPLE:
        raise SampleRangeError(f"channel value {value} outside 0..{MAX_SAMPLE}")
    return value


def rgb_to_hsv(r, g, b) -> HsvPixel:
    """Convert one 12-bit RGB triple to HSV."""
    r = _check_channel(r)
    g = _check_channel(g)
    b = _check_channel(b)
    mx = max(r, g, b)
    mn = min(r, g, b)
    v = mx / 4095.0
    if mx == 0:
        return HsvPixel(0.0, 0.0, 0.0)
    delta = float(mx - mn)
    s = delta / mx
    if delta == 0.0:
        h = 0.0
    elif mx == r:
        h = 60.0 * (((g - b) / delta) % 6.0)
    elif mx == g:
        h = 60.0 * ((b - r) / delta + 2.0)
    else:
        h = 60.0 * ((r - g) / delta + 4.0)
    return HsvPixel(h, s, v)


def classify_yellow(pixel: HsvPixel, window: YellowWindow) -> bool:
    """True iff the pixel falls inside the (inclusive) yellow window."""
    return (
        window.h_min <= pixel.h <= window.h_max
        and pixel.s >= window.s_min
        and pixel.v >= window.v_min
    )


def hsv_image(frame: RgbFrame | np.ndarray) -> np.ndarray:
    """HSV planes for a whole frame as a float64 (h, w, 3) array."""
    pixels = frame.pixels if isinstance(frame, RgbFrame) else np.asarray(frame)
    rf = pixels[..., 0].astype(np.float64)
    gf = pixels[..., 1].astype(np.float64)
    bf = pixels[..., 2].astype(np.float64)
    mx = np.maximum(np.maximum(rf, gf), bf)
    mn = np.minimum(np.minimum(rf, gf), bf)
    delta = mx - mn

    v = mx / 4095.0
    safe = np.where(mx > 0, mx, 1.0)
    s = np.where(mx > 0, delta / safe, 0.0)
    dsafe = np.where(delta > 0, delta, 1.0)
    h_r = 60.0 * (((gf - bf) / dsafe) % 6.0)
    h_g = 60.0 * ((bf - rf) / dsafe + 2.0)
    h_b = 60.0 * ((rf - gf) / dsafe + 4.0)
    h = np.where(mx == rf, h_r, np.where(mx == gf, h_g, h_b))
    h = np.where(delta == 0, 0.0, h)
    return np.stack([h, s, v], axis=-1)


def yellow_mask(frame: RgbFrame | np.ndarray, window: YellowWindow) -> np.ndarray:
    """Boolean mask of yellow-classified pixels for a whole frame.

    Dispatches to the accelerated kernel; agrees exactly with
    classify_yellow(rgb_to_hsv(...)) on every pixel.
    """
    pixels = frame.pixels if isinstance(frame, RgbFrame) else np.asarray(frame)
    shape = pixels.shape[:-1]
    flat = pixels.reshape(-1, 3)
    r = np.ascontiguousarray(flat[:, 0])
    g = np.ascontiguousarray(flat[:, 1])
    b = np.ascontiguousarray(flat[:, 2])
    mask = _kernels.yellow_mask_channels(
        r, g, b, window.h_min, window.h_max, window.s_min, window.v_min
    )
    return mask.reshape(shape)


def classify_hsv_rows(hsv: np.ndarray, window: YellowWindow) -> np.ndarray:
    """Classify an (..., 3) array of already-converted HSV values."""
    h = hsv[..., 0]
    s = hsv[..., 1]
    v = hsv[..., 2]
    return (h >= window.h_min) & (h <= window.h_max) & (s >= window.s_min) & (v >= window.v_min)
