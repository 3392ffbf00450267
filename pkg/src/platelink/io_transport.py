"""File and socket I/O: netpbm images, packet captures, live UDP.

Two transmission paths exist on purpose. The capture-file path preserves
the exact wire bytes of every frame (preamble stripped, FCS retained, as
packet-capture tools expect for Ethernet link type). The live UDP path
sends only the 1024-octet payloads and lets the host stack build real
headers, because raw-frame injection would need elevated privileges.
"""

from __future__ import annotations

import socket
import struct
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .demosaic import MAX_SAMPLE, BayerFrame, BayerOrder, RgbFrame
from .detector import BinaryFrame
from .errors import (
    CaptureFormatError,
    CaptureTruncatedError,
    DimensionError,
    TransportError,
)
from .frame_codec import EthernetFrame, NetConfig, format_ip

PCAP_MAGIC = 0xA1B2C3D4
PCAP_LINKTYPE_ETHERNET = 1
PCAP_SNAPLEN = 65535
STORED_FRAME_LEN = 1070  # wire frame minus preamble/SFD


# ---------------------------------------------------------------------------
# netpbm images


def _read_pnm_tokens(data: bytes, count: int):
    """First `count` whitespace-separated header tokens, skipping # comments.

    Returns (tokens, offset of the raster, which begins one whitespace byte
    after the last token).
    """
    tokens = []
    i = 0
    while len(tokens) < count:
        if i >= len(data):
            raise ValueError("truncated netpbm header")
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace():
                j += 1
            tokens.append(data[i:j])
            i = j
    return tokens, i + 1


def write_pgm(path, image: np.ndarray, maxval: int = MAX_SAMPLE) -> None:
    """Binary PGM (P5); two bytes per sample MSB-first when maxval > 255."""
    image = np.asarray(image)
    header = f"P5\n{image.shape[1]} {image.shape[0]}\n{maxval}\n".encode()
    raster = image.astype(">u2" if maxval > 255 else np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + raster)


def read_pgm(path) -> tuple[np.ndarray, int]:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, offset = _read_pnm_tokens(data, 4)
    if tokens[0] != b"P5":
        raise ValueError(f"not a binary PGM file: magic {tokens[0]!r}")
    width, height, maxval = (int(t) for t in tokens[1:])
    dtype = ">u2" if maxval > 255 else np.uint8
    expected = width * height * (2 if maxval > 255 else 1)
    raster = data[offset : offset + expected]
    if len(raster) != expected:
        raise ValueError(f"PGM raster truncated: {len(raster)} of {expected} bytes")
    image = np.frombuffer(raster, dtype).reshape(height, width).astype(np.uint16)
    return image, maxval


def write_ppm(path, pixels: np.ndarray, maxval: int = MAX_SAMPLE) -> None:
    """Binary PPM (P6); two bytes per channel MSB-first when maxval > 255."""
    pixels = np.asarray(pixels)
    header = f"P6\n{pixels.shape[1]} {pixels.shape[0]}\n{maxval}\n".encode()
    raster = pixels.astype(">u2" if maxval > 255 else np.uint8).tobytes()
    with open(path, "wb") as fh:
        fh.write(header + raster)


def read_ppm(path) -> tuple[np.ndarray, int]:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, offset = _read_pnm_tokens(data, 4)
    if tokens[0] != b"P6":
        raise ValueError(f"not a binary PPM file: magic {tokens[0]!r}")
    width, height, maxval = (int(t) for t in tokens[1:])
    dtype = ">u2" if maxval > 255 else np.uint8
    expected = width * height * 3 * (2 if maxval > 255 else 1)
    raster = data[offset : offset + expected]
    if len(raster) != expected:
        raise ValueError(f"PPM raster truncated: {len(raster)} of {expected} bytes")
    pixels = np.frombuffer(raster, dtype).reshape(height, width, 3).astype(np.uint16)
    return pixels, maxval


def read_bayer_raw(path, width: int, height: int, order=BayerOrder.RGGB) -> BayerFrame:
    """Raw mosaic: width*height little-endian 16-bit samples, row-major."""
    with open(path, "rb") as fh:
        data = fh.read()
    expected = width * height * 2
    if len(data) != expected:
        raise DimensionError(f"raw file holds {len(data)} bytes, expected {expected}")
    samples = np.frombuffer(data, "<u2").reshape(height, width)
    return BayerFrame(samples, order)


def write_bayer_raw(path, frame: BayerFrame) -> None:
    with open(path, "wb") as fh:
        fh.write(frame.samples.astype("<u2").tobytes())


def load_bayer_image(path, width=None, height=None, order=BayerOrder.RGGB) -> BayerFrame:
    """Read a mosaic from 16-bit PGM (self-describing) or raw (needs geometry)."""
    text = str(path)
    if text.endswith(".pgm"):
        image, _ = read_pgm(path)
        return BayerFrame(image, order)
    if width is None or height is None:
        raise DimensionError("raw Bayer input needs width and height from the config")
    return read_bayer_raw(path, width, height, order)


def write_binary_pgm(path, frame: BinaryFrame) -> None:
    """Two-color output: white 255, black 0."""
    write_pgm(path, np.where(frame.bits, 255, 0).astype(np.uint8), maxval=255)


def read_binary_pgm(path) -> BinaryFrame:
    image, maxval = read_pgm(path)
    return BinaryFrame(image == maxval)


def write_rgb_ppm(path, frame: RgbFrame) -> None:
    write_ppm(path, frame.pixels, maxval=MAX_SAMPLE)


def read_rgb_ppm(path) -> RgbFrame:
    pixels, maxval = read_ppm(path)
    if maxval != MAX_SAMPLE:
        raise ValueError(f"expected a 12-bit PPM (maxval {MAX_SAMPLE}), got {maxval}")
    return RgbFrame(pixels)


# ---------------------------------------------------------------------------
# packet capture files


@dataclass(frozen=True)
class CaptureRecord:
    ts_sec: int
    ts_usec: int
    data: bytes


def _split_timestamp(seconds: float) -> tuple[int, int]:
    sec = int(seconds)
    usec = int(round((seconds - sec) * 1_000_000))
    if usec == 1_000_000:
        sec, usec = sec + 1, 0
    return sec, usec


def write_capture(frames: Sequence, schedule=None) -> bytes:
    """Standard capture container; one record per frame, 1070 octets stored.

    Timestamps come from the schedule's start times when given, else zeros.
    """
    out = bytearray()
    out += struct.pack(
        "<IHHiIII", PCAP_MAGIC, 2, 4, 0, 0, PCAP_SNAPLEN, PCAP_LINKTYPE_ETHERNET
    )
    for i, frame in enumerate(frames):
        data = frame.data if isinstance(frame, EthernetFrame) else bytes(frame)
        stored = data[8:]
        ts_sec = ts_usec = 0
        if schedule is not None:
            ts_sec, ts_usec = _split_timestamp(schedule[i][0])
        out += struct.pack("<IIII", ts_sec, ts_usec, len(stored), len(stored))
        out += stored
    return bytes(out)


def read_capture(data: bytes) -> list[CaptureRecord]:
    """Parse a capture regardless of its byte order."""
    if len(data) < 24:
        raise CaptureFormatError(f"global header needs 24 octets, got {len(data)}")
    magic = struct.unpack("<I", data[:4])[0]
    if magic == PCAP_MAGIC:
        endian = "<"
    elif struct.unpack(">I", data[:4])[0] == PCAP_MAGIC:
        endian = ">"
    else:
        raise CaptureFormatError(f"unrecognized magic 0x{magic:08X}")
    _, _, _, _, _, linktype = struct.unpack(endian + "HHiIII", data[4:24])
    if linktype != PCAP_LINKTYPE_ETHERNET:
        raise CaptureFormatError(f"unsupported link type {linktype}")

    records = []
    offset = 24
    index = 0
    while offset < len(data):
        if offset + 16 > len(data):
            raise CaptureTruncatedError(index, "incomplete record header")
        ts_sec, ts_usec, caplen, _ = struct.unpack(endian + "IIII", data[offset : offset + 16])
        offset += 16
        if offset + caplen > len(data):
            raise CaptureTruncatedError(index, f"{len(data) - offset} of {caplen} packet bytes")
        records.append(CaptureRecord(ts_sec, ts_usec, data[offset : offset + caplen]))
        offset += caplen
        index += 1
    return records


def frames_from_capture(data: bytes) -> list[bytes]:
    """Restore full wire frames (preamble/SFD re-attached) from a capture."""
    frames = []
    for record in read_capture(data):
        frames.append(b"\x55" * 7 + b"\xd5" + record.data)
    return frames


# ---------------------------------------------------------------------------
# live UDP


@dataclass(frozen=True)
class SendReport:
    sent: int
    destination: tuple[str, int]


@dataclass(frozen=True)
class ReceiveReport:
    payloads: list
    timed_out: bool

    @property
    def count(self) -> int:
        return len(self.payloads)


def udp_send(payloads: Sequence[bytes], cfg: NetConfig) -> SendReport:
    """Send each payload as one datagram to cfg's destination."""
    dest = (format_ip(cfg.dst_ip), cfg.dst_port)
    try:
        with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as sock:
            sent = 0
            for payload in payloads:
                sock.sendto(payload, dest)
                sent += 1
    except OSError as exc:
        raise TransportError(f"UDP send to {dest[0]}:{dest[1]} failed: {exc}") from exc
    return SendReport(sent, dest)


def udp_receive(
    bind_addr: tuple[str, int],
    expected: Optional[int] = None,
    timeout: Optional[float] = None,
) -> ReceiveReport:
    """Collect datagrams until `expected` arrive or `timeout` elapses.

    A timeout with fewer than expected datagrams is reported, not raised.
    """
    if expected is None and timeout is None:
        raise ValueError("need an expected count or a timeout to know when to stop")
    payloads = []
    try:
        with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as sock:
            sock.bind(bind_addr)
            sock.settimeout(timeout)
            while expected is None or len(payloads) < expected:
                try:
                    data, _ = sock.recvfrom(65536)
                except socket.timeout:
                    return ReceiveReport(payloads, True)
                payloads.append(data)
    except OSError as exc:
        raise TransportError(f"UDP receive on {bind_addr[0]}:{bind_addr[1]} failed: {exc}") from exc
    return ReceiveReport(payloads, False)
