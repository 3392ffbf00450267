"""Locating the yellow plate by run-length scanning in HSV space."""

from pathlib import Path

from platelink import (
    DetectorConfig,
    YellowWindow,
    demosaic_downsample,
    detect_plate,
    overlay_region,
    rgb_to_hsv,
    scan_row_runs,
    synthetic_bayer_scene,
)
from platelink.colorspace import hsv_image
from platelink.io_transport import write_binary_pgm, write_rgb_ppm

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

bayer, planted = synthetic_bayer_scene(1280, 960, seed=21)
rgb = demosaic_downsample(bayer)

# Plate yellow sits around hue 50: saturated and bright, unlike road gray.
sample = rgb.pixels[planted.top + 2, planted.left + 2]
pixel = rgb_to_hsv(*(int(c) for c in sample))
print(f"a plate pixel {tuple(int(c) for c in sample)} -> "
      f"h={pixel.h:.1f} s={pixel.s:.2f} v={pixel.v:.2f}")

config = DetectorConfig(window=YellowWindow(), min_run=32, max_row_gap=2)
result = detect_plate(rgb, config)
print(f"planted: {planted}")
print(f"detected: {result.region} ({result.qualifying_rows} qualifying rows)")

# Row-level view: the run scanner reports (start, length) per row; rows with
# a long enough run qualify, short blobs are discarded as noise.
hsv = hsv_image(rgb)
runs = scan_row_runs(hsv[planted.top + 1], config.window, config.min_run)
print(f"runs in one plate row: {runs}")
noise_runs = scan_row_runs(hsv[5], config.window, config.min_run)
print(f"runs in a sky row: {noise_runs}")

write_binary_pgm(out_dir / "binary.pgm", result.binary)
write_rgb_ppm(out_dir / "overlay.ppm", overlay_region(rgb, result.region))
print(f"wrote {out_dir / 'binary.pgm'} (white = plate) and {out_dir / 'overlay.ppm'} (red box)")
