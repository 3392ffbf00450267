"""Physical-side mechanics: DDR nibble stream, ping-pong buffer, line rate.

The nibble stream models double-data-rate transfer: each octet is sent as
its high nibble on the rising clock edge and its low nibble on the falling
edge. The ping-pong buffer is two one-frame slots whose read/write roles
swap when the read side has been drained and the write side holds a frame.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .errors import NibbleFramingError


class Edge(Enum):
    RISING = "rising"
    FALLING = "falling"


@dataclass(frozen=True)
class NibbleStream:
    """Alternating (edge, 4-bit value) symbols, starting on a rising edge."""

    symbols: tuple

    def __len__(self) -> int:
        return len(self.symbols)


def to_nibbles(data: bytes) -> NibbleStream:
    """Each octet b becomes (RISING, b >> 4) then (FALLING, b & 0x0F)."""
    symbols = []
    for b in data:
        symbols.append((Edge.RISING, b >> 4))
        symbols.append((Edge.FALLING, b & 0x0F))
    return NibbleStream(tuple(symbols))


def from_nibbles(stream: NibbleStream) -> bytes:
    """Exact inverse of to_nibbles; rejects malformed streams."""
    symbols = stream.symbols if isinstance(stream, NibbleStream) else tuple(stream)
    if len(symbols) % 2:
        raise NibbleFramingError(f"stream length {len(symbols)} is odd")
    out = bytearray(len(symbols) // 2)
    for i in range(0, len(symbols), 2):
        hi_edge, hi = symbols[i]
        lo_edge, lo = symbols[i + 1]
        if hi_edge is not Edge.RISING or lo_edge is not Edge.FALLING:
            raise NibbleFramingError(f"broken edge alternation at symbol {i}")
        if not (0 <= hi <= 0xF and 0 <= lo <= 0xF):
            raise NibbleFramingError(f"symbol value out of nibble range at symbol {i}")
        out[i // 2] = (hi << 4) | lo
    return bytes(out)


class PingPongBuffer:
    """Two alternating one-frame slots: write one while reading the other.

    Single-producer/single-consumer: exactly one context may submit and one
    may take. submit() returns False (backpressure) while the write slot is
    occupied; take() returns None while nothing is readable. Roles swap
    inside take() once the read slot is drained and the write slot is full,
    so frames come out in submission order.
    """

    def __init__(self):
        self._slots: list = [None, None]
        self._write = 0
        self._read = 1
        self._lock = threading.Lock()

    def submit(self, frame) -> bool:
        if frame is None:
            raise ValueError("cannot buffer None")
        with self._lock:
            if self._slots[self._write] is not None:
                return False
            self._slots[self._write] = frame
            return True

    def take(self):
        with self._lock:
            if self._slots[self._read] is None and self._slots[self._write] is not None:
                self._write, self._read = self._read, self._write
            frame = self._slots[self._read]
            self._slots[self._read] = None
            return frame

    @property
    def write_slot_full(self) -> bool:
        return self._slots[self._write] is not None

    @property
    def read_slot_full(self) -> bool:
        return self._slots[self._read] is not None


@dataclass(frozen=True)
class LineRate:
    """Gigabit line pacing: payload byte rate plus inter-frame gap."""

    bytes_per_second: int = 125_000_000
    interframe_gap: int = 12  # byte-times between frames

    def __post_init__(self):
        if self.bytes_per_second <= 0:
            raise ValueError("bytes_per_second must be positive")
        if self.interframe_gap < 0:
            raise ValueError("interframe_gap must be >= 0")


def schedule_transmission(
    frame_sizes: Sequence[int], rate: Optional[LineRate] = None
) -> list[tuple[float, float]]:
    """Back-to-back (start, end) times in seconds for each frame.

    Successive frames are separated by the inter-frame gap; double precision
    keeps results well inside a 1e-12 s tolerance at these scales.
    """
    rate = rate or LineRate()
    schedule = []
    cursor = 0.0
    for size in frame_sizes:
        start = cursor
        end = start + size / rate.bytes_per_second
        schedule.append((start, end))
        cursor = end + rate.interframe_gap / rate.bytes_per_second
    return schedule


def schedule_to_csv(schedule: Sequence[tuple[float, float]]) -> str:
    lines = ["index,start_s,end_s"]
    for i, (start, end) in enumerate(schedule):
        lines.append(f"{i},{start:.12f},{end:.12f}")
    return "\n".join(lines) + "\n"


def line_rate_images_per_second(
    frames_per_image: int, frame_size: int, rate: Optional[LineRate] = None
) -> float:
    """Theoretical image rate when every frame costs size + gap byte-times."""
    rate = rate or LineRate()
    return rate.bytes_per_second / (frames_per_image * (frame_size + rate.interframe_gap))
