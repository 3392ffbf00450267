"""Number-plate localization by raster-scan run-length analysis.

A row qualifies when it contains at least one run of consecutive yellow
pixels no shorter than min_run (shorter runs are treated as noise). The
first qualifying row opens the plate band; the band tolerates up to
max_row_gap consecutive non-qualifying rows and closes on the first longer
break, so the first band in the frame wins. The region's columns span the
extrema of the qualifying runs inside the band, and the binary output is
white exactly at yellow pixels inside the region.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .colorspace import HsvPixel, YellowWindow, classify_hsv_rows, yellow_mask
from .demosaic import RgbFrame
from .errors import RegionBoundsError


@dataclass(frozen=True)
class DetectorConfig:
    window: YellowWindow = field(default_factory=YellowWindow)
    min_run: int = 32
    max_row_gap: int = 2

    def __post_init__(self):
        if self.min_run < 1:
            raise ValueError(f"min_run must be >= 1, got {self.min_run}")
        if self.max_row_gap < 0:
            raise ValueError(f"max_row_gap must be >= 0, got {self.max_row_gap}")


@dataclass(frozen=True)
class PlateRegion:
    top: int
    bottom: int
    left: int
    right: int

    def __post_init__(self):
        if self.top > self.bottom or self.left > self.right:
            raise ValueError(f"degenerate region {self}")
        if min(self.top, self.left) < 0:
            raise ValueError(f"negative region indices in {self}")


@dataclass(frozen=True)
class BinaryFrame:
    """Two-color output image: True = plate background white, False = black."""

    bits: np.ndarray

    def __post_init__(self):
        arr = np.array(self.bits, dtype=bool, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"bits must be 2-d, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


@dataclass(frozen=True)
class DetectionResult:
    region: PlateRegion | None
    binary: BinaryFrame
    qualifying_rows: int


def _mask_runs(mask: np.ndarray, min_run: int):
    """All runs of True with length >= min_run over a (h, w) mask.

    Returns (rows, starts, lengths) arrays; rows are sorted by construction
    (row-major scan order).
    """
    h, w = mask.shape
    padded = np.zeros((h, w + 2), np.int8)
    padded[:, 1:-1] = mask
    d = np.diff(padded, axis=1).ravel()
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    lengths = ends - starts
    keep = lengths >= min_run
    starts = starts[keep]
    rows = starts // (w + 1)
    cols = starts % (w + 1)
    return rows, cols, lengths[keep]


def scan_row_runs(row, window: YellowWindow, min_run: int) -> list[tuple[int, int]]:
    """Maximal yellow runs of length >= min_run in one row, left to right.

    ``row`` is either a sequence of HsvPixel or an (w, 3) array of HSV values.
    Returns (start_col, length) pairs.
    """
    if min_run < 1:
        raise ValueError(f"min_run must be >= 1, got {min_run}")
    if len(row) and isinstance(row[0], HsvPixel):
        hsv = np.array([(p.h, p.s, p.v) for p in row], np.float64)
    else:
        hsv = np.asarray(row, np.float64).reshape(-1, 3)
    if hsv.size == 0:
        return []
    mask = classify_hsv_rows(hsv, window)
    _, cols, lengths = _mask_runs(mask[np.newaxis, :], min_run)
    return list(zip(cols.tolist(), lengths.tolist()))


def detect_plate(frame: RgbFrame, config: DetectorConfig) -> DetectionResult:
    """Locate the plate band and produce the two-color output image."""
    mask = yellow_mask(frame, config.window)
    rows, cols, lengths = _mask_runs(mask, config.min_run)

    if rows.size == 0:
        empty = BinaryFrame(np.zeros(mask.shape, bool))
        return DetectionResult(None, empty, 0)

    qual_rows = np.unique(rows)
    top = int(qual_rows[0])
    bottom = top
    for r in qual_rows[1:]:
        if int(r) - bottom - 1 > config.max_row_gap:
            break  # band closed; later qualifying rows belong to other features
        bottom = int(r)

    in_band = (rows >= top) & (rows <= bottom)
    left = int(cols[in_band].min())
    right = int((cols[in_band] + lengths[in_band]).max()) - 1
    region = PlateRegion(top, bottom, left, right)

    box = np.zeros(mask.shape, bool)
    box[top : bottom + 1, left : right + 1] = True
    binary = BinaryFrame(mask & box)
    n_qual = int(np.count_nonzero((qual_rows >= top) & (qual_rows <= bottom)))
    return DetectionResult(region, binary, n_qual)


def overlay_region(frame: RgbFrame, region: PlateRegion) -> RgbFrame:
    """Copy of the frame with a 1-pixel red border on the region perimeter."""
    if region.bottom >= frame.height or region.right >= frame.width:
        raise RegionBoundsError(
            f"region {region} exceeds frame {frame.width}x{frame.height}"
        )
    out = np.array(frame.pixels, copy=True)
    red = (4095, 0, 0)
    out[region.top, region.left : region.right + 1] = red
    out[region.bottom, region.left : region.right + 1] = red
    out[region.top : region.bottom + 1, region.left] = red
    out[region.top : region.bottom + 1, region.right] = red
    return RgbFrame(out)
