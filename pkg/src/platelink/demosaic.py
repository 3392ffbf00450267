"""Bayer mosaic frames and 2x2 quad-binning demosaic.

Each non-overlapping 2x2 quad of the mosaic produces one output pixel: the
red and blue samples are taken directly and the two greens are averaged with
integer floor. Output dimensions are therefore half the input in each axis.
All arithmetic is integer-only so results are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

import numpy as np

from .errors import DimensionError, SampleRangeError

MAX_SAMPLE = 4095
DEFAULT_WIDTH = 1280
DEFAULT_HEIGHT = 960


class BayerOrder(Enum):
    """Mosaic phase, named by the 2x2 reading order at pixel (0, 0).

    RGGB means row 0 starts R G, row 1 starts G B; the other three values
    are the remaining phases under the same convention.
    """

    RGGB = "RGGB"
    GRBG = "GRBG"
    GBRG = "GBRG"
    BGGR = "BGGR"

    @property
    def quad_sites(self):
        """(row, col) of the R, G1, G2 and B samples inside a quad."""
        return _QUAD_SITES[self]


# reading-order position of each channel per phase: (r, g1, g2, b)
_QUAD_SITES = {
    BayerOrder.RGGB: ((0, 0), (0, 1), (1, 0), (1, 1)),
    BayerOrder.GRBG: ((0, 1), (0, 0), (1, 1), (1, 0)),
    BayerOrder.GBRG: ((1, 0), (0, 0), (1, 1), (0, 1)),
    BayerOrder.BGGR: ((1, 1), (0, 1), (1, 0), (0, 0)),
}


def _checked_samples(samples, channels=None) -> np.ndarray:
    arr = np.array(samples, dtype=np.uint16, copy=True)
    expected_ndim = 2 if channels is None else 3
    if arr.ndim != expected_ndim or (channels and arr.shape[2] != channels):
        raise DimensionError(f"expected a {expected_ndim}-d sample array, got shape {arr.shape}")
    if arr.size and int(arr.max()) > MAX_SAMPLE:
        raise SampleRangeError(f"sample {int(arr.max())} exceeds {MAX_SAMPLE}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BayerFrame:
    """Single-channel 12-bit mosaic with a declared phase.

    ``samples`` is a read-only (height, width) uint16 array; both dimensions
    must be even because processing consumes whole 2x2 quads.
    """

    samples: np.ndarray
    order: BayerOrder = BayerOrder.RGGB

    def __post_init__(self):
        arr = _checked_samples(self.samples)
        if arr.shape[0] % 2 or arr.shape[1] % 2:
            raise DimensionError(f"Bayer dimensions must be even, got {arr.shape[1]}x{arr.shape[0]}")
        object.__setattr__(self, "samples", arr)
        if not isinstance(self.order, BayerOrder):
            object.__setattr__(self, "order", BayerOrder(self.order))

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @classmethod
    def from_flat(cls, width: int, height: int, samples, order=BayerOrder.RGGB) -> "BayerFrame":
        flat = np.asarray(samples, dtype=np.uint16)
        if flat.size != width * height:
            raise DimensionError(
                f"expected {width * height} samples for {width}x{height}, got {flat.size}"
            )
        return cls(flat.reshape(height, width), order)


@dataclass(frozen=True)
class RgbFrame:
    """12-bit-per-channel color image; ``pixels`` is read-only (h, w, 3) uint16."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _checked_samples(self.pixels, channels=3))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def _quad_planes(samples: np.ndarray, order: BayerOrder):
    (rr, rc), (g1r, g1c), (g2r, g2c), (br, bc) = order.quad_sites
    r = samples[rr::2, rc::2]
    g1 = samples[g1r::2, g1c::2]
    g2 = samples[g2r::2, g2c::2]
    b = samples[br::2, bc::2]
    return r, g1, g2, b


def demosaic_downsample(frame: BayerFrame) -> RgbFrame:
    """Collapse each 2x2 quad into one RGB pixel (R, floor((G1+G2)/2), B)."""
    r, g1, g2, b = _quad_planes(frame.samples, frame.order)
    out = np.empty((frame.height // 2, frame.width // 2, 3), np.uint16)
    out[:, :, 0] = r
    out[:, :, 1] = (g1 + g2) // 2  # sum <= 8190, no uint16 overflow
    out[:, :, 2] = b
    return RgbFrame(out)


def iter_demosaic_rows(frame: BayerFrame) -> Iterator[np.ndarray]:
    """Stream the demosaic one output row at a time.

    Mirrors the hardware two-row-tap scheme: only one Bayer row pair is
    consulted per yielded (width/2, 3) uint16 row. Stacking all yielded rows
    reproduces demosaic_downsample exactly.
    """
    (rr, rc), (g1r, g1c), (g2r, g2c), (br, bc) = frame.order.quad_sites
    for y in range(0, frame.height, 2):
        pair = frame.samples[y : y + 2]
        row = np.empty((frame.width // 2, 3), np.uint16)
        row[:, 0] = pair[rr, rc::2]
        row[:, 1] = (pair[g1r, g1c::2] + pair[g2r, g2c::2]) // 2
        row[:, 2] = pair[br, bc::2]
        yield row
