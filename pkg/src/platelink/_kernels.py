"""Hot-path kernels with numba acceleration and pure-numpy fallbacks.

The pipeline has two inner loops that dominate per-frame cost: yellow-pixel
classification and the per-chunk CRC-32. Both are implemented twice — a
numba kernel used when numba imports cleanly, and a numpy version that is
bit-for-bit equivalent. Classification must agree exactly with the scalar
float64 reference in colorspace (same operations, same order), so the numpy
fallback only prefilters with conservative integer bounds and re-evaluates
the exact float64 formula on the surviving candidates.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None
    HAVE_NUMBA = False

# Tests may flip this to force the numpy fallbacks.
USE_NUMBA = HAVE_NUMBA


def crc32_table() -> np.ndarray:
    """Reflected CRC-32 table for the Ethernet polynomial (0x04C11DB7 reflected)."""
    table = np.empty(256, np.uint32)
    for i in range(256):
        c = i
        for _ in range(8):
            c = (c >> 1) ^ 0xEDB88320 if c & 1 else c >> 1
        table[i] = c
    return table


_CRC_TABLE = crc32_table()


# ---------------------------------------------------------------------------
# yellow classification


def _yellow_mask_numpy(r, g, b, h_min, h_max, s_min, v_min):
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn

    # Conservative integer prefilter: anything the exact test could accept
    # must survive (margins dwarf float32 rounding).
    cand = np.ones(mx.shape, bool)
    if v_min > 0:
        cand &= mx >= max(0.0, v_min * 4095.0 - 1.0)
    if s_min > 0:
        s_lo = np.float32(max(0.0, s_min - 1e-3))
        cand &= delta.astype(np.float32) >= s_lo * mx.astype(np.float32)

    idx = np.flatnonzero(cand)
    out = np.zeros(mx.shape, bool)
    if idx.size == 0:
        return out

    rf = r[idx].astype(np.float64)
    gf = g[idx].astype(np.float64)
    bf = b[idx].astype(np.float64)
    mxf = mx[idx].astype(np.float64)
    df = delta[idx].astype(np.float64)

    v = mxf / 4095.0
    safe = np.where(mxf > 0, mxf, 1.0)
    s = np.where(mxf > 0, df / safe, 0.0)
    dsafe = np.where(df > 0, df, 1.0)
    h_r = 60.0 * (((gf - bf) / dsafe) % 6.0)
    h_g = 60.0 * ((bf - rf) / dsafe + 2.0)
    h_b = 60.0 * ((rf - gf) / dsafe + 4.0)
    h = np.where(mxf == rf, h_r, np.where(mxf == gf, h_g, h_b))
    h = np.where(df == 0, 0.0, h)

    ok = (h >= h_min) & (h <= h_max) & (s >= s_min) & (v >= v_min)
    out[idx[ok]] = True
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def _yellow_mask_jit(r, g, b, h_min, h_max, s_min, v_min, out):  # pragma: no cover
        for i in range(r.shape[0]):
            ri = r[i]
            gi = g[i]
            bi = b[i]
            mx = ri
            if gi > mx:
                mx = gi
            if bi > mx:
                mx = bi
            mn = ri
            if gi < mn:
                mn = gi
            if bi < mn:
                mn = bi
            mxf = np.float64(mx)
            v = mxf / 4095.0
            if v < v_min:
                out[i] = False
                continue
            delta = np.float64(mx - mn)
            if mx > 0:
                s = delta / mxf
            else:
                s = 0.0
            if s < s_min:
                out[i] = False
                continue
            if delta == 0.0:
                h = 0.0
            elif mx == ri:
                h = 60.0 * (((np.float64(gi) - np.float64(bi)) / delta) % 6.0)
            elif mx == gi:
                h = 60.0 * ((np.float64(bi) - np.float64(ri)) / delta + 2.0)
            else:
                h = 60.0 * ((np.float64(ri) - np.float64(gi)) / delta + 4.0)
            out[i] = (h_min <= h) and (h <= h_max)


def yellow_mask_channels(r, g, b, h_min, h_max, s_min, v_min):
    """Classify flat uint16 channel arrays; returns a boolean array."""
    if USE_NUMBA and HAVE_NUMBA:
        out = np.empty(r.shape[0], np.bool_)
        _yellow_mask_jit(r, g, b, h_min, h_max, s_min, v_min, out)
        return out
    return _yellow_mask_numpy(r, g, b, h_min, h_max, s_min, v_min)


# ---------------------------------------------------------------------------
# batched CRC-32


def _crc32_batch_numpy(rows):
    crc = np.full(rows.shape[0], 0xFFFFFFFF, np.uint32)
    eight = np.uint32(8)
    for j in range(rows.shape[1]):
        crc = _CRC_TABLE[(crc ^ rows[:, j]) & np.uint32(0xFF)] ^ (crc >> eight)
    return crc ^ np.uint32(0xFFFFFFFF)


if HAVE_NUMBA:

    @njit(cache=True)
    def _crc32_batch_jit(rows, table):  # pragma: no cover
        n, m = rows.shape
        res = np.empty(n, np.uint32)
        for i in range(n):
            crc = np.uint32(0xFFFFFFFF)
            for j in range(m):
                crc = table[(crc ^ rows[i, j]) & np.uint32(0xFF)] ^ (crc >> np.uint32(8))
            res[i] = crc ^ np.uint32(0xFFFFFFFF)
        return res


def crc32_batch(rows: np.ndarray) -> np.ndarray:
    """CRC-32 of each row of a (n, m) uint8 matrix."""
    rows = np.ascontiguousarray(rows, np.uint8)
    if USE_NUMBA and HAVE_NUMBA:
        return _crc32_batch_jit(rows, _CRC_TABLE)
    return _crc32_batch_numpy(rows)
